#pragma once

#include <cstdint>
#include <vector>

#include "npsa/intensity.hpp"
#include "npsa/realization.hpp"
#include "npsa/rng.hpp"
#include "npsa/value_dist.hpp"

namespace npsa {

// One realization of the marked arrival process on [0, intensity.horizon()].
// Arrival times come from Lewis-Shedler thinning under the exact envelope
// max_rate(); constant intensities skip the acceptance draw. Values are
// i.i.d. draws from dist, independent of the times.
Realization simulate(const IntensityFunction& intensity, const ValueDistribution& dist, Rng& rng);

// M realizations, one independent substream per realization index.
std::vector<Realization> simulate_many(const IntensityFunction& intensity,
                                       const ValueDistribution& dist, std::size_t count,
                                       std::uint64_t master_seed);

// Synthetic scored stream: each arrival is fraudulent with probability
// fraud_prob; values come from the matching distribution; scores are exact
// labels perturbed toward 0.5 by score_noise in [0, 1).
struct ScoredStreamModel {
    double fraud_prob;
    ValueDistribution fraud_values;
    ValueDistribution legit_values;
    double score_noise = 0.0;
};

Realization simulate_scored(const IntensityFunction& intensity, const ScoredStreamModel& model,
                            Rng& rng);

std::vector<Realization> simulate_scored_many(const IntensityFunction& intensity,
                                              const ScoredStreamModel& model, std::size_t count,
                                              std::uint64_t master_seed);

}  // namespace npsa
