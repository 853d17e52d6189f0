#include "npsa/intensity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace npsa {

namespace {

std::size_t bin_count_for(double horizon, double bin_width) {
    // horizon / bin_width up to rounding slack so an exact multiple does not
    // spill into a spurious extra bin
    return static_cast<std::size_t>(std::ceil(horizon / bin_width - 1e-9));
}

std::size_t bin_index(double t, double bin_width, std::size_t n_bins) {
    auto i = static_cast<std::size_t>(std::max(0.0, std::floor(t / bin_width)));
    return std::min(i, n_bins - 1);  // t == T maps to the last bin
}

}  // namespace

IntensityFunction::IntensityFunction(ConstantRate c, double horizon)
    : form_(c), horizon_(horizon) {
    if (!(horizon > 0.0)) throw std::invalid_argument("IntensityFunction: horizon must be > 0");
    if (!(c.rate > 0.0)) throw std::invalid_argument("IntensityFunction: constant rate must be > 0");
}

IntensityFunction::IntensityFunction(PiecewiseConstantRate pc, double horizon)
    : form_(std::move(pc)), horizon_(horizon) {
    if (!(horizon > 0.0)) throw std::invalid_argument("IntensityFunction: horizon must be > 0");
    const auto& p = std::get<PiecewiseConstantRate>(form_);
    if (!(p.bin_width > 0.0)) throw std::invalid_argument("IntensityFunction: bin width must be > 0");
    if (p.rates.size() != bin_count_for(horizon, p.bin_width)) {
        throw std::invalid_argument("IntensityFunction: rates must cover [0, T] with ceil(T/bin_width) bins");
    }
    bool any_positive = false;
    for (double r : p.rates) {
        if (!(r >= 0.0)) throw std::invalid_argument("IntensityFunction: rates must be >= 0");
        any_positive |= r > 0.0;
    }
    if (!any_positive) throw std::invalid_argument("IntensityFunction: at least one rate must be > 0");
}

IntensityFunction IntensityFunction::scaled(IntensityFunction base, double factor) {
    if (!(factor > 0.0)) throw std::invalid_argument("IntensityFunction: scale factor must be > 0");
    double horizon = base.horizon_;
    IntensityFunction out(ConstantRate{1.0}, horizon);
    out.form_ = ScaledRate{std::make_shared<const IntensityFunction>(std::move(base)), factor};
    return out;
}

double IntensityFunction::rate_at(double t) const {
    t = std::clamp(t, 0.0, horizon_);
    struct Visitor {
        double t;
        double operator()(const ConstantRate& c) const { return c.rate; }
        double operator()(const PiecewiseConstantRate& p) const {
            return p.rates[bin_index(t, p.bin_width, p.rates.size())];
        }
        double operator()(const ScaledRate& s) const { return s.factor * s.base->rate_at(t); }
    };
    return std::visit(Visitor{t}, form_);
}

double IntensityFunction::integrate(double a, double b) const {
    if (!(0.0 <= a && a <= b && b <= horizon_ + 1e-12)) {
        throw std::invalid_argument("IntensityFunction::integrate: need 0 <= a <= b <= T");
    }
    b = std::min(b, horizon_);
    struct Visitor {
        double a, b, horizon;
        double operator()(const ConstantRate& c) const { return c.rate * (b - a); }
        double operator()(const PiecewiseConstantRate& p) const {
            double total = 0.0;
            std::size_t n = p.rates.size();
            for (std::size_t i = 0; i < n; ++i) {
                double lo = static_cast<double>(i) * p.bin_width;
                double hi = std::min(lo + p.bin_width, horizon);
                double overlap = std::min(b, hi) - std::max(a, lo);
                if (overlap > 0.0) total += p.rates[i] * overlap;
            }
            return total;
        }
        double operator()(const ScaledRate& s) const { return s.factor * s.base->integrate(a, b); }
    };
    return std::visit(Visitor{a, b, horizon_}, form_);
}

double IntensityFunction::max_rate() const {
    struct Visitor {
        double operator()(const ConstantRate& c) const { return c.rate; }
        double operator()(const PiecewiseConstantRate& p) const {
            return *std::max_element(p.rates.begin(), p.rates.end());
        }
        double operator()(const ScaledRate& s) const { return s.factor * s.base->max_rate(); }
    };
    return std::visit(Visitor{}, form_);
}

}  // namespace npsa
