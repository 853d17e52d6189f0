#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "npsa/intensity.hpp"
#include "npsa/realization.hpp"

namespace npsa {

// Piecewise-constant arrival-rate estimate: per-bin event counts averaged
// over M realizations and normalized by bin width, with bin width
// delta = T * M^(-1/3). The final bin is truncated at T and normalized by
// its actual width, so the estimate integrates to (total events)/M exactly.
class IntensityEstimate {
  public:
    static IntensityEstimate fit(std::span<const Realization> realizations, double horizon);

    double bin_width() const { return bin_width_; }
    double horizon() const { return horizon_; }
    std::size_t realization_count() const { return realization_count_; }
    const std::vector<double>& rates() const { return rates_; }

    // Rate of the bin containing t; t == T maps to the last bin.
    double rate_at(double t) const;

    // Mean rate over [0, T].
    double mean_rate() const;

    IntensityFunction as_intensity() const;

  private:
    double bin_width_ = 0.0;
    double horizon_ = 0.0;
    std::size_t realization_count_ = 0;
    std::vector<double> rates_;
};

// Sorted value samples with suffix integrals of the ECDF complement,
// supporting O(log N) evaluation of the mean-shortage estimate
//   phi(y) = integral over [y, inf) of (1 - F_N(x)) dx.
class MeanShortageCache {
  public:
    explicit MeanShortageCache(std::vector<double> samples);

    // Mean-shortage estimate at y >= 0 (negative y rejected).
    double operator()(double y) const;

    // Empirical cdf F_N(x); step function with range {0, 1/N, ..., 1}.
    double ecdf(double x) const;

    double sample_mean() const { return sample_mean_; }
    std::size_t size() const { return xs_.size(); }
    const std::vector<double>& sorted_samples() const { return xs_; }
    const std::vector<double>& suffix_integrals() const { return phis_; }

  private:
    std::vector<double> xs_;    // sorted ascending, ties retained
    std::vector<double> phis_;  // phis_[i] = phi at xs_[i]; phis_.back() == 0
    double sample_mean_ = 0.0;
};

// Optional exports: `bin_start,bin_end,rate` and `x,phi`.
void write_intensity_csv(const std::string& path, const IntensityEstimate& estimate);
void write_mean_shortage_csv(const std::string& path, const MeanShortageCache& cache);

}  // namespace npsa
