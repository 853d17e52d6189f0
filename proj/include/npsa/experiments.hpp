#pragma once

#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "npsa/curves.hpp"
#include "npsa/intensity.hpp"
#include "npsa/ode.hpp"
#include "npsa/value_dist.hpp"

namespace npsa {

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;  // NaN when undefined (fewer than two samples)
};

MeanSe mean_se(const std::vector<double>& xs);

// --- convergence-to-optimality sweep -------------------------------------

struct ConvergenceConfig {
    ValueDistribution dist = Exponential(5.0);
    double rate = 1.0;
    double horizon = 2.0 * std::numbers::pi;
    std::vector<int> workers = {1, 5};
    int m_max = 100;   // training realizations at the top of the sweep
    int m_step = 1;
    int m_test = 50;   // replays per sweep cell
    std::uint64_t seed = 1;
    SolverConfig solver;
};

struct ConvergenceRow {
    int m;
    int n;
    double mean_norm_reward;
    double se_norm_reward;
    double cesaro_avg;  // running mean of mean_norm_reward over the M sweep
};

// For each M in the sweep: fit estimators on the first M realizations of a
// common training pool, derive curves, replay them on a fixed test set of
// m_test fresh realizations, and normalize by the optimal reward of the
// exact-(lambda, phi) curves.
std::vector<ConvergenceRow> run_convergence(const ConvergenceConfig& config);

// --- train/test distribution-shift sweep ----------------------------------

struct RobustnessConfig {
    double rate = 500.0;  // training arrival rate
    double mu = 200.0;    // training exponential value mean
    double horizon = 2.0 * std::numbers::pi;
    std::vector<int> workers = {1, 5};
    int m_train = 30;
    int m_test = 20;
    int num_deltas = 20;  // log-spaced modifiers over [delta_min, delta_max]
    double delta_min = 1e-2;
    double delta_max = 1e2;
    std::uint64_t seed = 1;
    SolverConfig solver;
};

struct RobustnessRow {
    std::string sweep;  // "lambda" or "mu"
    double delta;
    int n;
    double mc_norm_mean;   // Monte-Carlo replay estimate over m_test streams
    double mc_norm_se;
    double expected_norm;  // exact expectation via the reward ODE system
};

// Curves are fitted once at the training scenario, then evaluated against
// processes with the arrival rate (resp. value mean) scaled by each
// modifier; rewards are normalized by the optimal reward of the modified
// scenario.
std::vector<RobustnessRow> run_robustness(const RobustnessConfig& config);

// --- scored-stream replay against baselines -------------------------------

struct FraudReplayConfig {
    std::string train_csv;
    std::string test_csv;
    double horizon = 2.0 * std::numbers::pi;
    std::vector<int> workers = {1, 5, 10, 25};
    double positive_threshold = 0.5;
    std::uint64_t seed = 1;
    SolverConfig solver;
};

struct FraudRow {
    int n;
    std::string policy;  // npsa | greedy | uniform | hindsight | full_knowledge
    double value_fraction_mean;
    double value_fraction_se;
    double capture_fraction_mean;
    double capture_fraction_se;
};

// Fits the intensity and the mean-shortage cache of score-adjusted values on
// the training streams, derives curves once at max(workers), then replays
// the threshold policy and the four baselines on each test stream.
std::vector<FraudRow> run_fraud_replay(const FraudReplayConfig& config);

// --- fit/export plumbing ---------------------------------------------------

struct FitExportResult {
    std::string intensity_path;
    std::string shortage_path;
    std::string curves_path;
};

// Writes <prefix>_intensity.csv, <prefix>_shortage.csv and
// <prefix>_curves.csv from a training CSV. use_adjusted selects
// score-adjusted values (requires a scored stream).
FitExportResult fit_and_export(const std::string& train_csv, double horizon, int n,
                               const std::string& out_prefix, bool use_adjusted = false,
                               std::size_t grid_points = 1024, const SolverConfig& solver = {});

void write_convergence_csv(const std::string& path, const std::vector<ConvergenceRow>& rows);
void write_robustness_csv(const std::string& path, const std::vector<RobustnessRow>& rows);
void write_fraud_csv(const std::string& path, const std::vector<FraudRow>& rows);

}  // namespace npsa
