#pragma once

#include <memory>
#include <variant>
#include <vector>

namespace npsa {

class IntensityFunction;

struct ConstantRate {
    double rate;  // jobs per unit time, > 0
};

// Piecewise-constant rate over [0, T]: bins of width bin_width, the last bin
// truncated at T. rates.size() == ceil(T / bin_width).
struct PiecewiseConstantRate {
    double bin_width;
    std::vector<double> rates;
};

struct ScaledRate {
    std::shared_ptr<const IntensityFunction> base;
    double factor;  // > 0
};

// Arrival intensity lambda(t) on a horizon [0, T]. Immutable and shareable.
class IntensityFunction {
  public:
    IntensityFunction(ConstantRate c, double horizon);
    IntensityFunction(PiecewiseConstantRate pc, double horizon);
    static IntensityFunction scaled(IntensityFunction base, double factor);

    double horizon() const { return horizon_; }

    // lambda(t); t clamped into [0, T].
    double rate_at(double t) const;

    // Exact integral of lambda over [a, b] (expected arrival count).
    // Rejects reversed or out-of-range intervals.
    double integrate(double a, double b) const;

    // Supremum of lambda over [0, T]; used as the thinning envelope.
    double max_rate() const;

    bool is_constant() const { return std::holds_alternative<ConstantRate>(form_); }

  private:
    std::variant<ConstantRate, PiecewiseConstantRate, ScaledRate> form_;
    double horizon_;
};

}  // namespace npsa
