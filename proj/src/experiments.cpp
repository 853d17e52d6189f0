#include "npsa/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "npsa/baselines.hpp"
#include "npsa/simulate.hpp"

namespace npsa {

namespace {

// fixed tags feeding Rng::substream so train/test pools never collide
constexpr std::uint64_t kTrainTag = 0x7261696e;
constexpr std::uint64_t kTestTag = 0x74657374;

std::uint64_t tagged_seed(std::uint64_t seed, std::uint64_t tag) {
    return Rng::substream(seed, tag).next_u64();
}

MeanShortageCache pooled_value_cache(std::span<const Realization> realizations,
                                     bool use_adjusted) {
    std::vector<double> values;
    for (const Realization& r : realizations) {
        for (const Event& e : r.events) {
            values.push_back(use_adjusted ? e.adjusted_value() : e.value);
        }
    }
    return MeanShortageCache(std::move(values));
}

std::vector<double> normalized_replay_rewards(const CriticalCurveSet& curves, int n,
                                              const std::vector<Realization>& test_set,
                                              double r_star) {
    std::vector<double> rewards;
    rewards.reserve(test_set.size());
    CurvePrefix<CriticalCurveSet> policy{curves, n};
    for (const Realization& r : test_set) {
        rewards.push_back(replay_policy(policy, r).total_reward / r_star);
    }
    return rewards;
}

}  // namespace

MeanSe mean_se(const std::vector<double>& xs) {
    MeanSe out;
    const auto n = xs.size();
    if (n == 0) {
        out.mean = std::numeric_limits<double>::quiet_NaN();
        out.se = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    double sum = 0.0;
    for (double x : xs) sum += x;
    out.mean = sum / static_cast<double>(n);
    if (n < 2) {
        out.se = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.se = std::sqrt(ss / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n));
    return out;
}

std::vector<ConvergenceRow> run_convergence(const ConvergenceConfig& config) {
    if (config.m_max < 1 || config.m_step < 1 || config.m_test < 1) {
        throw std::invalid_argument("run_convergence: M, M step and M' must be >= 1");
    }
    if (config.workers.empty()) throw std::invalid_argument("run_convergence: need worker counts");
    for (int n : config.workers) {
        if (n < 1) throw std::invalid_argument("run_convergence: worker counts must be >= 1");
    }
    if (std::holds_alternative<Empirical>(config.dist)) {
        throw std::invalid_argument("run_convergence: scenario must be analytic (exponential or Lomax)");
    }

    const IntensityFunction intensity(ConstantRate{config.rate}, config.horizon);
    const auto train_pool = simulate_many(intensity, config.dist,
                                          static_cast<std::size_t>(config.m_max),
                                          tagged_seed(config.seed, kTrainTag));
    const std::uint64_t test_master = tagged_seed(config.seed, kTestTag);

    const int n_max = *std::max_element(config.workers.begin(), config.workers.end());
    auto phi_true = [&](double y) { return phi_exact(config.dist, y); };
    const CriticalCurveSet exact_curves =
        derive_critical_curves(intensity, phi_true, n_max, config.solver, "exact", "exact");

    std::vector<ConvergenceRow> rows;
    for (int n : config.workers) {
        double r_star = optimal_reward(CurvePrefix<CriticalCurveSet>{exact_curves, n});
        double cesaro_sum = 0.0;
        int cells = 0;
        for (int m = config.m_step; m <= config.m_max; m += config.m_step) {
            std::span<const Realization> train(train_pool.data(), static_cast<std::size_t>(m));
            std::size_t event_count = 0;
            for (const Realization& r : train) event_count += r.events.size();
            if (event_count == 0) {
                // nothing observed, nothing accepted
                cesaro_sum += 0.0;
                ++cells;
                rows.push_back(ConvergenceRow{m, n, 0.0, 0.0,
                                              cesaro_sum / static_cast<double>(cells)});
                continue;
            }
            IntensityEstimate est = IntensityEstimate::fit(train, config.horizon);
            MeanShortageCache cache = pooled_value_cache(train, false);
            CriticalCurveSet curves = derive_critical_curves(
                est.as_intensity(), [&](double y) { return cache(y); }, n, config.solver,
                "estimated", "estimated");
            // fresh test draws for every sweep cell
            auto test_set = simulate_many(
                intensity, config.dist, static_cast<std::size_t>(config.m_test),
                Rng::substream(test_master,
                               static_cast<std::uint64_t>(n) * 1000003 +
                                   static_cast<std::uint64_t>(m))
                    .next_u64());
            MeanSe stats =
                mean_se(normalized_replay_rewards(curves, n, test_set, r_star));
            cesaro_sum += stats.mean;
            ++cells;
            rows.push_back(ConvergenceRow{m, n, stats.mean, stats.se,
                                          cesaro_sum / static_cast<double>(cells)});
        }
    }
    return rows;
}

std::vector<RobustnessRow> run_robustness(const RobustnessConfig& config) {
    if (config.m_train < 1 || config.m_test < 1) {
        throw std::invalid_argument("run_robustness: M and M' must be >= 1");
    }
    if (config.num_deltas < 2 || !(config.delta_min > 0.0) ||
        !(config.delta_max > config.delta_min)) {
        throw std::invalid_argument("run_robustness: need >= 2 modifiers over a positive range");
    }
    if (config.workers.empty()) throw std::invalid_argument("run_robustness: need worker counts");

    const IntensityFunction train_intensity(ConstantRate{config.rate}, config.horizon);
    const ValueDistribution train_dist = Exponential(config.mu);
    const int n_max = *std::max_element(config.workers.begin(), config.workers.end());

    const auto train_set = simulate_many(train_intensity, train_dist,
                                         static_cast<std::size_t>(config.m_train),
                                         tagged_seed(config.seed, kTrainTag));
    IntensityEstimate est = IntensityEstimate::fit(train_set, config.horizon);
    MeanShortageCache cache = pooled_value_cache(train_set, false);
    const CriticalCurveSet fitted_curves = derive_critical_curves(
        est.as_intensity(), [&](double y) { return cache(y); }, n_max, config.solver,
        "estimated", "estimated");

    std::vector<double> deltas(static_cast<std::size_t>(config.num_deltas));
    const double log_lo = std::log10(config.delta_min), log_hi = std::log10(config.delta_max);
    for (int j = 0; j < config.num_deltas; ++j) {
        deltas[static_cast<std::size_t>(j)] = std::pow(
            10.0, log_lo + (log_hi - log_lo) * static_cast<double>(j) /
                               static_cast<double>(config.num_deltas - 1));
    }

    std::vector<RobustnessRow> rows;
    for (const char* sweep_name : {"lambda", "mu"}) {
        const std::string sweep = sweep_name;
        for (std::size_t j = 0; j < deltas.size(); ++j) {
            double delta = deltas[j];
            double test_rate = sweep == "lambda" ? delta * config.rate : config.rate;
            double test_mu = sweep == "mu" ? delta * config.mu : config.mu;
            IntensityFunction test_intensity(ConstantRate{test_rate}, config.horizon);
            ValueDistribution test_dist = Exponential(test_mu);

            auto phi_test = [&](double y) { return phi_exact(test_dist, y); };
            CriticalCurveSet optimal_curves = derive_critical_curves(
                test_intensity, phi_test, n_max, config.solver, "exact", "exact");

            std::vector<double> expected = expected_rewards_all(
                fitted_curves, test_intensity, make_reward_model(test_dist), config.solver);

            std::uint64_t test_seed =
                tagged_seed(config.seed, kTestTag ^ (j * 2 + (sweep == "mu" ? 1 : 0)));
            auto test_set = simulate_many(test_intensity, test_dist,
                                          static_cast<std::size_t>(config.m_test), test_seed);

            for (int n : config.workers) {
                double r_star = optimal_reward(CurvePrefix<CriticalCurveSet>{optimal_curves, n});
                MeanSe stats =
                    mean_se(normalized_replay_rewards(fitted_curves, n, test_set, r_star));
                rows.push_back(RobustnessRow{sweep, delta, n, stats.mean, stats.se,
                                             expected[static_cast<std::size_t>(n - 1)] / r_star});
            }
        }
    }
    return rows;
}

std::vector<FraudRow> run_fraud_replay(const FraudReplayConfig& config) {
    if (config.workers.empty()) throw std::invalid_argument("run_fraud_replay: need worker counts");
    for (int n : config.workers) {
        if (n < 1) throw std::invalid_argument("run_fraud_replay: worker counts must be >= 1");
    }
    auto train_set = read_realizations_csv(config.train_csv, config.horizon);
    auto test_set = read_realizations_csv(config.test_csv, config.horizon);
    for (const auto& r : train_set) {
        if (!r.scored) throw std::invalid_argument("run_fraud_replay: training stream must carry score,label");
    }
    for (const auto& r : test_set) {
        if (!r.scored) throw std::invalid_argument("run_fraud_replay: test stream must carry score,label");
    }

    IntensityEstimate est = IntensityEstimate::fit(train_set, config.horizon);
    MeanShortageCache cache = pooled_value_cache(train_set, true);
    const int n_max = *std::max_element(config.workers.begin(), config.workers.end());
    const CriticalCurveSet curves = derive_critical_curves(
        est.as_intensity(), [&](double y) { return cache(y); }, n_max, config.solver,
        "estimated", "estimated:adjusted");

    const std::vector<std::string> policies = {"npsa", "greedy", "uniform", "hindsight",
                                               "full_knowledge"};
    std::vector<FraudRow> rows;
    for (int n : config.workers) {
        std::vector<std::vector<double>> value_frac(policies.size());
        std::vector<std::vector<double>> capture_frac(policies.size());
        for (std::size_t i = 0; i < test_set.size(); ++i) {
            const Realization& stream = test_set[i];
            Rng uniform_rng = Rng::substream(config.seed, i * 100003 + static_cast<std::size_t>(n));
            CurvePrefix<CriticalCurveSet> policy{curves, n};
            const ReplayResult results[] = {
                replay_policy(policy, stream, [](const Event& e) { return e.adjusted_value(); }),
                greedy_policy(stream, n, config.positive_threshold),
                uniform_policy(stream, n, config.positive_threshold, uniform_rng),
                hindsight_policy(stream, n, config.positive_threshold),
                full_knowledge_policy(stream, n)};
            for (std::size_t p = 0; p < policies.size(); ++p) {
                FraudMetrics m = fraud_metrics(results[p], stream);
                value_frac[p].push_back(m.value_fraction);
                capture_frac[p].push_back(m.capture_fraction);
            }
        }
        for (std::size_t p = 0; p < policies.size(); ++p) {
            MeanSe v = mean_se(value_frac[p]);
            MeanSe c = mean_se(capture_frac[p]);
            rows.push_back(FraudRow{n, policies[p], v.mean, v.se, c.mean, c.se});
        }
    }
    return rows;
}

FitExportResult fit_and_export(const std::string& train_csv, double horizon, int n,
                               const std::string& out_prefix, bool use_adjusted,
                               std::size_t grid_points, const SolverConfig& solver) {
    if (n < 1) throw std::invalid_argument("fit_and_export: need n >= 1");
    auto train_set = read_realizations_csv(train_csv, horizon);
    if (use_adjusted) {
        for (const auto& r : train_set) {
            if (!r.scored) {
                throw std::invalid_argument("fit_and_export: adjusted values need a scored stream");
            }
        }
    }
    IntensityEstimate est = IntensityEstimate::fit(train_set, horizon);
    MeanShortageCache cache = pooled_value_cache(train_set, use_adjusted);
    CriticalCurveSet curves = derive_critical_curves(
        est.as_intensity(), [&](double y) { return cache(y); }, n, solver, "estimated",
        use_adjusted ? "estimated:adjusted" : "estimated");

    FitExportResult out{out_prefix + "_intensity.csv", out_prefix + "_shortage.csv",
                        out_prefix + "_curves.csv"};
    write_intensity_csv(out.intensity_path, est);
    write_mean_shortage_csv(out.shortage_path, cache);
    write_curves_csv(out.curves_path, sample_curves(curves, grid_points));
    return out;
}

namespace {

void write_csv_rows(const std::string& path, const std::string& header,
                    const std::vector<std::string>& lines) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write results CSV: " + path);
    out << header << "\n";
    for (const auto& line : lines) out << line << "\n";
}

std::string format_row(const char* fmt, ...) __attribute__((format(printf, 1, 2)));

std::string format_row(const char* fmt, ...) {
    char buf[256];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof(buf), fmt, args);
    va_end(args);
    return buf;
}

}  // namespace

void write_convergence_csv(const std::string& path, const std::vector<ConvergenceRow>& rows) {
    std::vector<std::string> lines;
    lines.reserve(rows.size());
    for (const auto& r : rows) {
        lines.push_back(format_row("%d,%d,%.17g,%.17g,%.17g", r.m, r.n, r.mean_norm_reward,
                                   r.se_norm_reward, r.cesaro_avg));
    }
    write_csv_rows(path, "M,n,mean_norm_reward,se_norm_reward,cesaro_avg", lines);
}

void write_robustness_csv(const std::string& path, const std::vector<RobustnessRow>& rows) {
    std::vector<std::string> lines;
    lines.reserve(rows.size());
    for (const auto& r : rows) {
        lines.push_back(format_row("%s,%.17g,%d,%.17g,%.17g,%.17g", r.sweep.c_str(), r.delta,
                                   r.n, r.mc_norm_mean, r.mc_norm_se, r.expected_norm));
    }
    write_csv_rows(path, "sweep,delta,n,mc_norm_mean,mc_norm_se,expected_norm", lines);
}

void write_fraud_csv(const std::string& path, const std::vector<FraudRow>& rows) {
    std::vector<std::string> lines;
    lines.reserve(rows.size());
    for (const auto& r : rows) {
        lines.push_back(format_row("%d,%s,%.17g,%.17g,%.17g,%.17g", r.n, r.policy.c_str(),
                                   r.value_fraction_mean, r.value_fraction_se,
                                   r.capture_fraction_mean, r.capture_fraction_se));
    }
    write_csv_rows(path, "n,policy,value_fraction_mean,value_fraction_se,capture_fraction_mean,capture_fraction_se",
                   lines);
}

}  // namespace npsa
