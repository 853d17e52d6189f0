#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace npsa {

struct SolverConfig {
    double rtol = 1e-6;
    double atol = 1e-8;
    std::size_t max_steps = 1000000;
    double initial_step = 0.0;  // 0 selects the step automatically
    double min_step = 0.0;      // 0 selects a machine-precision floor
};

struct SolverError : std::runtime_error {
    SolverError(const std::string& what, double t) : std::runtime_error(what), t(t) {}
    double t;  // time at which integration failed
};

// Right-hand side f(t, y) -> dy/dt, written into dydt.
using OdeRhs = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

// Continuous solution on [t0, t1] built from the accepted step mesh and the
// quartic interpolant of the 5(4) pair. Evaluation at mesh points reproduces
// the stored states exactly; immutable and safe for concurrent evaluation.
class DenseSolution {
  public:
    double t_begin() const { return mesh_.front(); }
    double t_end() const { return mesh_.back(); }
    std::size_t dimension() const { return dim_; }
    const std::vector<double>& mesh() const { return mesh_; }

    // State at t (clamped into [t0, t1]).
    std::vector<double> eval(double t) const;
    void eval(double t, std::span<double> out) const;

    // Convenience for one-dimensional systems.
    double eval_scalar(double t) const;

    std::span<const double> state_at_end() const;

  private:
    friend DenseSolution solve_ivp(const OdeRhs&, std::array<double, 2>, std::span<const double>,
                                   const SolverConfig&);
    std::size_t segment_index(double t) const;

    std::size_t dim_ = 0;
    std::vector<double> mesh_;    // accepted step times, strictly increasing
    std::vector<double> coeffs_;  // 5 interpolation vectors per step, dim_ each
    std::vector<double> final_state_;
};

// Adaptive Dormand-Prince 5(4) with PI step control and dense output.
// Integrates forward from t_span[0] to t_span[1]; callers integrate reversed
// systems by substituting s = T - t themselves. The rhs is only ever
// evaluated at times clamped into t_span.
DenseSolution solve_ivp(const OdeRhs& rhs, std::array<double, 2> t_span,
                        std::span<const double> y0, const SolverConfig& config = {});

// Fixed-step variant of the same tableau (no error control, no dense
// output); returns the endpoint state. Used to verify convergence order.
std::vector<double> fixed_step_solve(const OdeRhs& rhs, std::array<double, 2> t_span,
                                     std::span<const double> y0, std::size_t n_steps);

}  // namespace npsa
