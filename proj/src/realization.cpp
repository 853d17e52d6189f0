#include "npsa/realization.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace npsa {

void Realization::validate() const {
    if (!(horizon > 0.0)) throw std::invalid_argument("Realization: horizon must be > 0");
    double prev = -1.0;
    for (const Event& e : events) {
        if (!(e.t >= 0.0 && e.t <= horizon)) {
            throw std::invalid_argument("Realization: event time outside [0, T]");
        }
        if (!(e.t > prev)) throw std::invalid_argument("Realization: event times must be strictly increasing");
        if (!(e.value >= 0.0)) throw std::invalid_argument("Realization: event values must be >= 0");
        if (scored) {
            if (!(e.score >= 0.0 && e.score <= 1.0)) {
                throw std::invalid_argument("Realization: scores must lie in [0, 1]");
            }
            if (e.label != 0 && e.label != 1) {
                throw std::invalid_argument("Realization: labels must be 0 or 1");
            }
        }
        prev = e.t;
    }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

double parse_double(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("CSV: cannot parse " + what + " from '" + s + "'");
    }
}

}  // namespace

std::vector<Realization> read_realizations_csv(const std::string& path, double horizon) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open realization CSV: " + path);

    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("CSV: empty file: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto header = split_csv_line(line);
    bool scored;
    if (header.size() == 3 && header[0] == "realization_id" && header[1] == "t" && header[2] == "value") {
        scored = false;
    } else if (header.size() == 5 && header[0] == "realization_id" && header[1] == "t" &&
               header[2] == "value" && header[3] == "score" && header[4] == "label") {
        scored = true;
    } else {
        throw std::invalid_argument("CSV: expected header realization_id,t,value[,score,label] in " + path);
    }

    std::vector<Realization> out;
    std::string current_id;
    bool have_current = false;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != header.size()) {
            throw std::invalid_argument("CSV: wrong column count at line " + std::to_string(line_no));
        }
        if (!have_current || fields[0] != current_id) {
            current_id = fields[0];
            have_current = true;
            out.push_back(Realization{{}, horizon, scored});
        }
        Event e;
        e.t = parse_double(fields[1], "t");
        e.value = parse_double(fields[2], "value");
        if (scored) {
            e.score = parse_double(fields[3], "score");
            double lbl = parse_double(fields[4], "label");
            e.label = static_cast<int>(lbl);
            if (lbl != 0.0 && lbl != 1.0) {
                throw std::invalid_argument("CSV: label must be 0 or 1 at line " + std::to_string(line_no));
            }
        }
        out.back().events.push_back(e);
    }
    if (out.empty()) throw std::invalid_argument("CSV: no event rows in " + path);
    for (const auto& r : out) r.validate();
    return out;
}

void write_realizations_csv(const std::string& path, const std::vector<Realization>& realizations) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write realization CSV: " + path);
    bool scored = !realizations.empty() && realizations.front().scored;
    out << (scored ? "realization_id,t,value,score,label\n" : "realization_id,t,value\n");
    char buf[160];
    for (std::size_t i = 0; i < realizations.size(); ++i) {
        for (const Event& e : realizations[i].events) {
            if (scored) {
                std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g,%d\n", i, e.t, e.value,
                              e.score, e.label);
            } else {
                std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g\n", i, e.t, e.value);
            }
            out << buf;
        }
    }
}

}  // namespace npsa
