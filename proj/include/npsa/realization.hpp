#pragma once

#include <string>
#include <vector>

namespace npsa {

// One event of a marked arrival stream. score/label are present only in
// scored streams (score = classifier confidence, label = ground truth).
struct Event {
    double t = 0.0;
    double value = 0.0;
    double score = -1.0;  // in [0,1] when scored
    int label = -1;       // in {0,1} when scored

    double adjusted_value() const { return score * value; }
};

// One observed sample path over [0, T]: event times strictly increasing.
struct Realization {
    std::vector<Event> events;
    double horizon = 0.0;
    bool scored = false;

    void validate() const;  // throws std::invalid_argument on violation
};

// Shared CSV schema: header `realization_id,t,value[,score,label]`, one row
// per event, times ascending within each realization_id.
std::vector<Realization> read_realizations_csv(const std::string& path, double horizon);
void write_realizations_csv(const std::string& path, const std::vector<Realization>& realizations);

}  // namespace npsa
