#pragma once

#include <algorithm>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "npsa/estimators.hpp"
#include "npsa/intensity.hpp"
#include "npsa/ode.hpp"
#include "npsa/realization.hpp"
#include "npsa/value_dist.hpp"

namespace npsa {

// Acceptance-threshold curves y_1(t) >= ... >= y_n(t) on [0, T] with
// y_k(T) = 0. Worker k is the number of still-unassigned workers, so replay
// starts at curve n and walks down to curve 1.
class CriticalCurveSet {
  public:
    int num_workers() const { return static_cast<int>(solutions_.size()); }
    double horizon() const { return horizon_; }

    // y_k(t) for k in 1..n, clamped at 0 from below.
    double threshold(int worker, double t) const {
        return std::max(0.0, solutions_[static_cast<std::size_t>(worker - 1)].eval_scalar(horizon_ - t));
    }

    // Sum of y_k(0); equals the expected optimal reward for derived curves.
    double initial_threshold_sum() const {
        double sum = 0.0;
        for (int k = 1; k <= num_workers(); ++k) sum += threshold(k, 0.0);
        return sum;
    }

    const std::string& intensity_descriptor() const { return intensity_desc_; }
    const std::string& shortage_descriptor() const { return shortage_desc_; }

  private:
    friend CriticalCurveSet derive_critical_curves(const IntensityFunction&,
                                                   const std::function<double(double)>&, int,
                                                   const SolverConfig&, std::string, std::string);
    std::vector<DenseSolution> solutions_;  // in reversed time s = T - t
    double horizon_ = 0.0;
    std::string intensity_desc_, shortage_desc_;
};

// Solve the threshold ODE system sequentially for k = 1..n: each curve is
// integrated in reversed time from y(T) = 0, with curve k's right-hand side
// -lambda(t) * (phi(y_k) - phi(y_{k-1})) querying curve k-1 through its
// dense interpolant (phi(y_0) taken as 0).
CriticalCurveSet derive_critical_curves(const IntensityFunction& intensity,
                                        const std::function<double(double)>& mean_shortage, int n,
                                        const SolverConfig& config = {},
                                        std::string intensity_desc = "",
                                        std::string shortage_desc = "");

struct Acceptance {
    int worker;  // counts down from n
    std::size_t event_index;
    double t;
    double value;  // the value compared against the threshold
};

struct ReplayResult {
    std::vector<Acceptance> accepted;
    double total_reward = 0.0;
    int workers_used = 0;
};

// Replay a threshold policy over one realization: events in time order,
// accepted iff value strictly exceeds the active curve, the active index
// decrementing from n to 0. Works with any curve provider exposing
// num_workers() and threshold(k, t).
template <typename Curves, typename ValueOf>
ReplayResult replay_policy(const Curves& curves, const Realization& realization,
                           ValueOf&& value_of) {
    ReplayResult result;
    int k = curves.num_workers();
    for (std::size_t i = 0; i < realization.events.size() && k > 0; ++i) {
        const Event& e = realization.events[i];
        double v = value_of(e);
        if (v > curves.threshold(k, e.t)) {
            result.accepted.push_back(Acceptance{k, i, e.t, v});
            result.total_reward += v;
            --k;
        }
    }
    result.workers_used = static_cast<int>(result.accepted.size());
    return result;
}

template <typename Curves>
ReplayResult replay_policy(const Curves& curves, const Realization& realization) {
    return replay_policy(curves, realization, [](const Event& e) { return e.value; });
}

// True data-generating process as seen by the reward recursion: the
// mean-shortage function and the cdf complement, from which the tail value
// integral is H(y) = phi(y) + y * (1 - F(y)).
struct RewardModel {
    std::function<double(double)> phi;
    std::function<double(double)> survival;

    double tail_value(double y) const { return phi(y) + y * survival(y); }
};

RewardModel make_reward_model(const ValueDistribution& dist);
RewardModel make_reward_model(const MeanShortageCache& cache);

// Expected rewards E_1(0), ..., E_n(0) of replaying the given curves against
// the true process, via the terminal-value ODE system
//   dE_k/dt = -lambda(t) * [H(y_k(t)) - (1 - F(y_k(t))) * (E_k(t) - E_{k-1}(t))],
// E_k(T) = 0, all k solved jointly in one reversed-time pass. Entry k-1 is
// the expected reward of a k-worker replay using curves y_k, ..., y_1.
template <typename Curves>
std::vector<double> expected_rewards_all(const Curves& curves,
                                         const IntensityFunction& true_intensity,
                                         const RewardModel& model,
                                         const SolverConfig& config = {}) {
    const int n = curves.num_workers();
    const double horizon = true_intensity.horizon();
    OdeRhs rhs = [&](double s, std::span<const double> e, std::span<double> de) {
        double t = horizon - s;
        double rate = true_intensity.rate_at(t);
        for (int k = 1; k <= n; ++k) {
            double y = curves.threshold(k, t);
            double fbar = model.survival(y);
            double h = model.phi(y) + y * fbar;
            double e_prev = k == 1 ? 0.0 : e[static_cast<std::size_t>(k - 2)];
            de[static_cast<std::size_t>(k - 1)] =
                rate * (h - fbar * (e[static_cast<std::size_t>(k - 1)] - e_prev));
        }
    };
    std::vector<double> zero(static_cast<std::size_t>(n), 0.0);
    DenseSolution sol = solve_ivp(rhs, {0.0, horizon}, zero, config);
    auto end_state = sol.state_at_end();
    return std::vector<double>(end_state.begin(), end_state.end());
}

template <typename Curves>
double expected_reward(const Curves& curves, const IntensityFunction& true_intensity,
                       const RewardModel& model, const SolverConfig& config = {}) {
    return expected_rewards_all(curves, true_intensity, model, config).back();
}

// View of the first n curves of a larger set; replaying it is an n-worker
// policy (curves 1..n do not depend on the total worker count).
template <typename Curves>
struct CurvePrefix {
    const Curves& base;
    int n;

    int num_workers() const { return n; }
    double horizon() const { return base.horizon(); }
    double threshold(int worker, double t) const { return base.threshold(worker, t); }
};

// Sum of curve values at t = 0; the optimal expected reward when the curves
// came from derive_critical_curves.
template <typename Curves>
double optimal_reward(const Curves& curves) {
    double sum = 0.0;
    for (int k = 1; k <= curves.num_workers(); ++k) sum += curves.threshold(k, 0.0);
    return sum;
}

// Lossy uniform-grid snapshot for plotting and interchange; replay against
// it snaps query times down to the nearest grid point.
class SampledCurveSet {
  public:
    SampledCurveSet(std::vector<double> grid, std::vector<std::vector<double>> values);

    int num_workers() const { return static_cast<int>(values_.size()); }
    double horizon() const { return grid_.back(); }
    const std::vector<double>& grid() const { return grid_; }
    const std::vector<std::vector<double>>& values() const { return values_; }

    double threshold(int worker, double t) const;

  private:
    std::vector<double> grid_;
    std::vector<std::vector<double>> values_;  // values_[k-1][i] = y_k(grid_[i])
};

// Sample a curve set onto a uniform grid with the given point count.
template <typename Curves>
SampledCurveSet sample_curves(const Curves& curves, std::size_t grid_points = 1024) {
    if (grid_points < 2) throw std::invalid_argument("sample_curves: need at least two grid points");
    std::vector<double> grid(grid_points);
    double horizon = curves.horizon();
    for (std::size_t i = 0; i < grid_points; ++i) {
        grid[i] = horizon * static_cast<double>(i) / static_cast<double>(grid_points - 1);
    }
    std::vector<std::vector<double>> values(static_cast<std::size_t>(curves.num_workers()));
    for (int k = 1; k <= curves.num_workers(); ++k) {
        auto& row = values[static_cast<std::size_t>(k - 1)];
        row.resize(grid_points);
        for (std::size_t i = 0; i < grid_points; ++i) row[i] = curves.threshold(k, grid[i]);
    }
    return SampledCurveSet(std::move(grid), std::move(values));
}

// CSV snapshot `t,y_1,...,y_n` on a uniform grid.
void write_curves_csv(const std::string& path, const SampledCurveSet& curves);
SampledCurveSet read_curves_csv(const std::string& path);

}  // namespace npsa
