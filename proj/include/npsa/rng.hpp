#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace npsa {

// Seeded random stream with portable draw helpers. Substreams derived from a
// master seed are statistically independent (splitmix64 over the stream id),
// so realizations can be generated in any order or in parallel.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    static Rng substream(std::uint64_t master_seed, std::uint64_t stream_id) {
        return Rng(mix(master_seed + 0x9e3779b97f4a7c15ULL * (stream_id + 1)));
    }

    std::uint64_t next_u64() { return engine_(); }

    // uniform on [0, 1)
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // uniform on (0, 1]; safe as a log() argument
    double uniform_pos() { return 1.0 - uniform(); }

    double exponential(double mean) { return -mean * std::log(uniform_pos()); }

    // uniform integer in [0, n); n must be positive
    std::size_t index(std::size_t n) {
        if (n == 0) throw std::invalid_argument("Rng::index: empty range");
        return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
    }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::mt19937_64 engine_;
};

}  // namespace npsa
