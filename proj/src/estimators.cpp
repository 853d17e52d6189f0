#include "npsa/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace npsa {

IntensityEstimate IntensityEstimate::fit(std::span<const Realization> realizations,
                                         double horizon) {
    if (realizations.empty()) {
        throw std::invalid_argument("IntensityEstimate: at least one realization required");
    }
    if (!(horizon > 0.0)) throw std::invalid_argument("IntensityEstimate: horizon must be > 0");

    const auto m = realizations.size();
    const double delta = horizon * std::pow(static_cast<double>(m), -1.0 / 3.0);
    const auto n_bins = static_cast<std::size_t>(std::ceil(horizon / delta - 1e-9));

    std::vector<double> counts(n_bins, 0.0);
    for (const Realization& r : realizations) {
        for (const Event& e : r.events) {
            if (!(e.t >= 0.0 && e.t <= horizon)) {
                throw std::invalid_argument("IntensityEstimate: event time outside [0, T]");
            }
            auto b = static_cast<std::size_t>(e.t / delta);
            counts[std::min(b, n_bins - 1)] += 1.0;
        }
    }

    IntensityEstimate est;
    est.bin_width_ = delta;
    est.horizon_ = horizon;
    est.realization_count_ = m;
    est.rates_.resize(n_bins);
    for (std::size_t b = 0; b < n_bins; ++b) {
        double lo = static_cast<double>(b) * delta;
        double width = std::min(lo + delta, horizon) - lo;
        est.rates_[b] = counts[b] / (static_cast<double>(m) * width);
    }
    return est;
}

double IntensityEstimate::rate_at(double t) const {
    t = std::clamp(t, 0.0, horizon_);
    auto b = static_cast<std::size_t>(t / bin_width_);
    return rates_[std::min(b, rates_.size() - 1)];
}

double IntensityEstimate::mean_rate() const {
    double total = 0.0;
    for (std::size_t b = 0; b < rates_.size(); ++b) {
        double lo = static_cast<double>(b) * bin_width_;
        double width = std::min(lo + bin_width_, horizon_) - lo;
        total += rates_[b] * width;
    }
    return total / horizon_;
}

IntensityFunction IntensityEstimate::as_intensity() const {
    return IntensityFunction(PiecewiseConstantRate{bin_width_, rates_}, horizon_);
}

MeanShortageCache::MeanShortageCache(std::vector<double> samples) : xs_(std::move(samples)) {
    if (xs_.empty()) throw std::invalid_argument("MeanShortageCache: at least one sample required");
    for (double x : xs_) {
        if (!(x >= 0.0)) throw std::invalid_argument("MeanShortageCache: samples must be >= 0");
    }
    std::sort(xs_.begin(), xs_.end());

    const std::size_t n = xs_.size();
    phis_.assign(n, 0.0);
    // phi_i = phi_{i+1} + (x_{i+1} - x_i) * (N - i - 1) / N, counting from 0;
    // duplicate samples contribute zero-width gaps.
    for (std::size_t i = n - 1; i-- > 0;) {
        phis_[i] = phis_[i + 1] + (xs_[i + 1] - xs_[i]) *
                                      (static_cast<double>(n - i - 1) / static_cast<double>(n));
    }

    double sum = 0.0;
    for (double x : xs_) sum += x;
    sample_mean_ = sum / static_cast<double>(n);
}

double MeanShortageCache::operator()(double y) const {
    if (!(y >= 0.0)) throw std::invalid_argument("MeanShortageCache: argument must be >= 0");
    if (y >= xs_.back()) return 0.0;
    if (y < xs_.front()) return sample_mean_ - y;  // 1 - F_N == 1 below x_1
    // x_l <= y < x_{l+1}: remaining suffix plus the partial segment at slope
    // -(N - l - 1)/N
    auto it = std::upper_bound(xs_.begin(), xs_.end(), y);
    auto l = static_cast<std::size_t>(it - xs_.begin()) - 1;
    const auto n = xs_.size();
    return phis_[l + 1] +
           (xs_[l + 1] - y) * (static_cast<double>(n - l - 1) / static_cast<double>(n));
}

double MeanShortageCache::ecdf(double x) const {
    auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    return static_cast<double>(it - xs_.begin()) / static_cast<double>(xs_.size());
}

void write_intensity_csv(const std::string& path, const IntensityEstimate& estimate) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write intensity CSV: " + path);
    out << "bin_start,bin_end,rate\n";
    char buf[120];
    const auto& rates = estimate.rates();
    for (std::size_t b = 0; b < rates.size(); ++b) {
        double lo = static_cast<double>(b) * estimate.bin_width();
        double hi = std::min(lo + estimate.bin_width(), estimate.horizon());
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", lo, hi, rates[b]);
        out << buf;
    }
}

void write_mean_shortage_csv(const std::string& path, const MeanShortageCache& cache) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write mean-shortage CSV: " + path);
    out << "x,phi\n";
    char buf[120];
    for (std::size_t i = 0; i < cache.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", cache.sorted_samples()[i],
                      cache.suffix_integrals()[i]);
        out << buf;
    }
}

}  // namespace npsa
