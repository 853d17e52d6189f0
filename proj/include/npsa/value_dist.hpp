#pragma once

#include <variant>
#include <vector>

#include "npsa/rng.hpp"

namespace npsa {

// Job-value distributions. The two analytic families admit closed-form
// cdf and mean-shortage expressions and serve as ground-truth oracles;
// Empirical wraps a fixed sample set.

struct Exponential {
    double mu;  // mean, > 0
    explicit Exponential(double mu);
};

struct Lomax {
    double alpha;  // shape, > 1 so the mean xi/(alpha-1) is finite
    double xi;     // scale, > 0
    Lomax(double alpha, double xi);
};

struct Empirical {
    std::vector<double> samples;  // nonnegative, stored sorted ascending
    explicit Empirical(std::vector<double> samples);
};

using ValueDistribution = std::variant<Exponential, Lomax, Empirical>;

// Inverse-cdf draw (uniform index draw for Empirical). Always >= 0.
double sample(const ValueDistribution& dist, Rng& rng);

// P[X <= z]; rejects z < 0.
double cdf(const ValueDistribution& dist, double z);

// P[X > z] = 1 - cdf, computed without cancellation for large z.
double survival(const ValueDistribution& dist, double z);

double mean(const ValueDistribution& dist);

// Mean shortage E[(X - y)^+] in closed form; analytic variants only,
// Empirical is rejected (use MeanShortageCache instead).
double phi_exact(const ValueDistribution& dist, double y);

// Upper tail value integral: expectation of X restricted to X > y.
// Satisfies phi(y) = tail_value(y) - y * survival(y).
double tail_value(const ValueDistribution& dist, double y);

}  // namespace npsa
