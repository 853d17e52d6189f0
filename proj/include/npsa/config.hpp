#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace npsa {

// Plain-text `key = value` configuration with `#` comments; keys that a
// command does not know are rejected so typos fail loudly.
class KeyValueConfig {
  public:
    KeyValueConfig() = default;
    static KeyValueConfig from_file(const std::string& path);

    bool has(const std::string& key) const { return entries_.count(key) > 0; }
    void set(const std::string& key, std::string value) { entries_[key] = std::move(value); }

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    std::vector<int> get_int_list(const std::string& key, std::vector<int> fallback) const;

    // Throws if any key is outside the allowed set.
    void require_known_keys(const std::vector<std::string>& allowed) const;

  private:
    std::map<std::string, std::string> entries_;
};

std::vector<int> parse_int_list(const std::string& text);

}  // namespace npsa
