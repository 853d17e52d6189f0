#include "npsa/value_dist.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace npsa {

Exponential::Exponential(double mu) : mu(mu) {
    if (!(mu > 0.0)) throw std::invalid_argument("Exponential: mean must be > 0");
}

Lomax::Lomax(double alpha, double xi) : alpha(alpha), xi(xi) {
    if (!(alpha > 1.0)) throw std::invalid_argument("Lomax: shape must be > 1 for a finite mean");
    if (!(xi > 0.0)) throw std::invalid_argument("Lomax: scale must be > 0");
}

Empirical::Empirical(std::vector<double> s) : samples(std::move(s)) {
    if (samples.empty()) throw std::invalid_argument("Empirical: at least one sample required");
    for (double x : samples) {
        if (!(x >= 0.0)) throw std::invalid_argument("Empirical: samples must be nonnegative");
    }
    std::sort(samples.begin(), samples.end());
}

double sample(const ValueDistribution& dist, Rng& rng) {
    struct Visitor {
        Rng& rng;
        double operator()(const Exponential& d) { return rng.exponential(d.mu); }
        double operator()(const Lomax& d) {
            // F^{-1}(u) = xi * ((1-u)^{-1/alpha} - 1)
            return d.xi * (std::pow(rng.uniform_pos(), -1.0 / d.alpha) - 1.0);
        }
        double operator()(const Empirical& d) { return d.samples[rng.index(d.samples.size())]; }
    };
    return std::visit(Visitor{rng}, dist);
}

double cdf(const ValueDistribution& dist, double z) {
    if (!(z >= 0.0)) throw std::invalid_argument("cdf: argument must be >= 0");
    return 1.0 - survival(dist, z);
}

double survival(const ValueDistribution& dist, double z) {
    struct Visitor {
        double z;
        double operator()(const Exponential& d) const { return std::exp(-z / d.mu); }
        double operator()(const Lomax& d) const { return std::pow(1.0 + z / d.xi, -d.alpha); }
        double operator()(const Empirical& d) const {
            auto it = std::upper_bound(d.samples.begin(), d.samples.end(), z);
            return static_cast<double>(d.samples.end() - it) /
                   static_cast<double>(d.samples.size());
        }
    };
    return std::visit(Visitor{z}, dist);
}

double mean(const ValueDistribution& dist) {
    struct Visitor {
        double operator()(const Exponential& d) const { return d.mu; }
        double operator()(const Lomax& d) const { return d.xi / (d.alpha - 1.0); }
        double operator()(const Empirical& d) const {
            double sum = 0.0;
            for (double x : d.samples) sum += x;
            return sum / static_cast<double>(d.samples.size());
        }
    };
    return std::visit(Visitor{}, dist);
}

double phi_exact(const ValueDistribution& dist, double y) {
    if (!(y >= 0.0)) throw std::invalid_argument("phi_exact: argument must be >= 0");
    struct Visitor {
        double y;
        double operator()(const Exponential& d) const { return d.mu * std::exp(-y / d.mu); }
        double operator()(const Lomax& d) const {
            // xi/(alpha-1) * (1 + y/xi)^{1-alpha}
            return d.xi / (d.alpha - 1.0) * std::pow(1.0 + y / d.xi, 1.0 - d.alpha);
        }
        double operator()(const Empirical&) const {
            throw std::invalid_argument("phi_exact: not defined for Empirical; build a MeanShortageCache");
        }
    };
    return std::visit(Visitor{y}, dist);
}

double tail_value(const ValueDistribution& dist, double y) {
    return phi_exact(dist, y) + y * survival(dist, y);
}

}  // namespace npsa
