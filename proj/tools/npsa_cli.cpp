// Command-line harness: stream simulation, estimator fitting, curve
// derivation, policy replay, and the three experiment sweeps, all over the
// shared realization CSV schema `realization_id,t,value[,score,label]`.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "npsa/baselines.hpp"
#include "npsa/config.hpp"
#include "npsa/curves.hpp"
#include "npsa/estimators.hpp"
#include "npsa/experiments.hpp"
#include "npsa/simulate.hpp"

namespace {

constexpr double kDefaultHorizon = 2.0 * std::numbers::pi;

npsa::ValueDistribution make_distribution(const std::string& kind, double mu, double alpha,
                                          double xi) {
    if (kind == "exponential") return npsa::Exponential(mu);
    if (kind == "lomax") return npsa::Lomax(alpha, xi);
    throw CLI::ValidationError("--dist", "expected 'exponential' or 'lomax'");
}

npsa::KeyValueConfig load_config(const std::string& path) {
    return path.empty() ? npsa::KeyValueConfig() : npsa::KeyValueConfig::from_file(path);
}

// config-file value applies only when the flag was not given on the line
bool use_config(const CLI::App* cmd, const char* flag) { return cmd->count(flag) == 0; }

void add_solver_options(CLI::App* cmd, npsa::SolverConfig& solver) {
    cmd->add_option("--rtol", solver.rtol, "Solver relative tolerance")->capture_default_str();
    cmd->add_option("--atol", solver.atol, "Solver absolute tolerance")->capture_default_str();
}

struct SimulateArgs {
    std::string out;
    std::size_t count = 1;
    std::uint64_t seed = 1;
    double horizon = kDefaultHorizon;
    double rate = 1.0;
    std::string rates_text;
    double bin_width = 0.0;
    std::string dist = "exponential";
    double mu = 5.0, alpha = 3.5, xi = 5.0;
    bool scored = false;
    double fraud_prob = 0.05;
    double legit_mu = 1.0;
    double score_noise = 0.0;
};

int cmd_simulate(const SimulateArgs& args) {
    npsa::IntensityFunction intensity =
        args.rates_text.empty()
            ? npsa::IntensityFunction(npsa::ConstantRate{args.rate}, args.horizon)
            : npsa::IntensityFunction(
                  npsa::PiecewiseConstantRate{
                      args.bin_width,
                      [&] {
                          std::vector<double> rates;
                          std::stringstream ss(args.rates_text);
                          std::string item;
                          while (std::getline(ss, item, ',')) rates.push_back(std::stod(item));
                          return rates;
                      }()},
                  args.horizon);

    std::vector<npsa::Realization> realizations;
    if (args.scored) {
        npsa::ScoredStreamModel model{args.fraud_prob,
                                      make_distribution(args.dist, args.mu, args.alpha, args.xi),
                                      npsa::Exponential(args.legit_mu), args.score_noise};
        realizations = npsa::simulate_scored_many(intensity, model, args.count, args.seed);
    } else {
        realizations = npsa::simulate_many(
            intensity, make_distribution(args.dist, args.mu, args.alpha, args.xi), args.count,
            args.seed);
    }
    npsa::write_realizations_csv(args.out, realizations);
    std::size_t events = 0;
    for (const auto& r : realizations) events += r.events.size();
    std::cout << "wrote " << realizations.size() << " realizations (" << events << " events) to "
              << args.out << "\n";
    return 0;
}

struct ReplayArgs {
    std::string test_csv, train_csv, curves_csv, out;
    double horizon = kDefaultHorizon;
    int n = 1;
    bool adjusted = false;
    npsa::SolverConfig solver;
};

template <typename Curves>
int replay_and_report(const Curves& curves, const ReplayArgs& args) {
    auto test_set = npsa::read_realizations_csv(args.test_csv, args.horizon);
    auto value_of = [&](const npsa::Event& e) {
        return args.adjusted ? e.adjusted_value() : e.value;
    };
    std::vector<std::string> lines;
    double total = 0.0;
    for (std::size_t i = 0; i < test_set.size(); ++i) {
        if (args.adjusted && !test_set[i].scored) {
            throw std::invalid_argument("replay: --adjusted needs a scored stream");
        }
        npsa::ReplayResult r = npsa::replay_policy(curves, test_set[i], value_of);
        total += r.total_reward;
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%zu,%d,%.17g", i, r.workers_used, r.total_reward);
        lines.emplace_back(buf);
    }
    if (!args.out.empty()) {
        std::ofstream out(args.out);
        if (!out) throw std::runtime_error("cannot write replay CSV: " + args.out);
        out << "realization_id,workers_used,total_reward\n";
        for (const auto& line : lines) out << line << "\n";
    }
    std::cout << "replayed " << test_set.size() << " realizations, mean reward "
              << total / static_cast<double>(test_set.size()) << "\n";
    return 0;
}

int cmd_replay(const ReplayArgs& args) {
    if (args.train_csv.empty() == args.curves_csv.empty()) {
        throw CLI::ValidationError("replay", "pass exactly one of --train or --curves");
    }
    if (!args.curves_csv.empty()) {
        return replay_and_report(npsa::read_curves_csv(args.curves_csv), args);
    }
    auto train_set = npsa::read_realizations_csv(args.train_csv, args.horizon);
    npsa::IntensityEstimate est = npsa::IntensityEstimate::fit(train_set, args.horizon);
    std::vector<double> values;
    for (const auto& r : train_set) {
        for (const auto& e : r.events) values.push_back(args.adjusted ? e.adjusted_value() : e.value);
    }
    npsa::MeanShortageCache cache(std::move(values));
    npsa::CriticalCurveSet curves = npsa::derive_critical_curves(
        est.as_intensity(), [&](double y) { return cache(y); }, args.n, args.solver);
    return replay_and_report(curves, args);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Non-parametric sequential allocation: threshold curves from observed job streams"};
    app.require_subcommand(1);

    // --- simulate ---
    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Generate realization CSVs of a marked Poisson stream");
    simulate->add_option("--out", sim.out, "Output realization CSV")->required();
    simulate->add_option("--count", sim.count, "Number of realizations")->capture_default_str();
    simulate->add_option("--seed", sim.seed, "Master seed")->capture_default_str();
    simulate->add_option("--horizon", sim.horizon, "Horizon T")->capture_default_str();
    simulate->add_option("--rate", sim.rate, "Constant arrival rate")->capture_default_str();
    simulate->add_option("--rates", sim.rates_text, "Piecewise rates r1,r2,... (overrides --rate)");
    simulate->add_option("--bin-width", sim.bin_width, "Bin width for --rates");
    simulate->add_option("--dist", sim.dist, "Value distribution: exponential|lomax")->capture_default_str();
    simulate->add_option("--mu", sim.mu, "Exponential mean")->capture_default_str();
    simulate->add_option("--alpha", sim.alpha, "Lomax shape")->capture_default_str();
    simulate->add_option("--xi", sim.xi, "Lomax scale")->capture_default_str();
    simulate->add_flag("--scored", sim.scored, "Emit score,label columns (synthetic fraud stream)");
    simulate->add_option("--fraud-prob", sim.fraud_prob, "P(label=1) per event")->capture_default_str();
    simulate->add_option("--legit-mu", sim.legit_mu, "Mean value of label-0 events (exponential)")->capture_default_str();
    simulate->add_option("--score-noise", sim.score_noise, "Score perturbation toward 0.5, in [0,1)")->capture_default_str();
    simulate->callback([&] { cmd_simulate(sim); });

    // --- fit ---
    struct {
        std::string train, out_prefix;
        double horizon = kDefaultHorizon;
        bool adjusted = false;
    } fit;
    auto* fit_cmd = app.add_subcommand("fit", "Fit intensity and mean-shortage estimates, export CSVs");
    fit_cmd->add_option("--train", fit.train, "Training realization CSV")->required();
    fit_cmd->add_option("--horizon", fit.horizon, "Horizon T")->capture_default_str();
    fit_cmd->add_option("--out-prefix", fit.out_prefix, "Output prefix")->required();
    fit_cmd->add_flag("--adjusted", fit.adjusted, "Fit values as score*value (scored streams)");
    fit_cmd->callback([&] {
        auto train_set = npsa::read_realizations_csv(fit.train, fit.horizon);
        npsa::IntensityEstimate est = npsa::IntensityEstimate::fit(train_set, fit.horizon);
        std::vector<double> values;
        for (const auto& r : train_set) {
            if (fit.adjusted && !r.scored) {
                throw std::invalid_argument("fit: --adjusted needs a scored stream");
            }
            for (const auto& e : r.events) {
                values.push_back(fit.adjusted ? e.adjusted_value() : e.value);
            }
        }
        npsa::MeanShortageCache cache(std::move(values));
        npsa::write_intensity_csv(fit.out_prefix + "_intensity.csv", est);
        npsa::write_mean_shortage_csv(fit.out_prefix + "_shortage.csv", cache);
        std::cout << "wrote " << fit.out_prefix << "_intensity.csv and " << fit.out_prefix
                  << "_shortage.csv\n";
    });

    // --- curves ---
    struct {
        std::string train, out_prefix;
        double horizon = kDefaultHorizon;
        int n = 1;
        std::size_t grid = 1024;
        bool adjusted = false;
        npsa::SolverConfig solver;
    } curves_args;
    auto* curves_cmd = app.add_subcommand("curves", "Fit estimators and export threshold curves");
    curves_cmd->add_option("--train", curves_args.train, "Training realization CSV")->required();
    curves_cmd->add_option("--horizon", curves_args.horizon, "Horizon T")->capture_default_str();
    curves_cmd->add_option("--n", curves_args.n, "Worker count")->required();
    curves_cmd->add_option("--grid", curves_args.grid, "Export grid points")->capture_default_str();
    curves_cmd->add_option("--out-prefix", curves_args.out_prefix, "Output prefix")->required();
    curves_cmd->add_flag("--adjusted", curves_args.adjusted, "Fit values as score*value");
    add_solver_options(curves_cmd, curves_args.solver);
    curves_cmd->callback([&] {
        auto files = npsa::fit_and_export(curves_args.train, curves_args.horizon, curves_args.n,
                                          curves_args.out_prefix, curves_args.adjusted,
                                          curves_args.grid, curves_args.solver);
        std::cout << "wrote " << files.intensity_path << ", " << files.shortage_path << ", "
                  << files.curves_path << "\n";
    });

    // --- replay ---
    ReplayArgs replay;
    auto* replay_cmd = app.add_subcommand("replay", "Replay threshold curves over a test stream");
    replay_cmd->add_option("--test", replay.test_csv, "Test realization CSV")->required();
    replay_cmd->add_option("--train", replay.train_csv, "Derive curves from this training CSV");
    replay_cmd->add_option("--curves", replay.curves_csv, "Replay a curves CSV (grid-snapped)");
    replay_cmd->add_option("--horizon", replay.horizon, "Horizon T")->capture_default_str();
    replay_cmd->add_option("--n", replay.n, "Worker count (with --train)")->capture_default_str();
    replay_cmd->add_flag("--adjusted", replay.adjusted, "Threshold score*value instead of value");
    replay_cmd->add_option("--out", replay.out,
                           "Per-realization result CSV (realization_id,workers_used,total_reward)");
    add_solver_options(replay_cmd, replay.solver);
    replay_cmd->callback([&] { cmd_replay(replay); });

    // --- expt-convergence ---
    struct {
        std::string config_path, out = "convergence.csv";
        std::string dist = "exponential";
        double mu = 5.0, alpha = 3.5, xi = 5.0;
        npsa::ConvergenceConfig cfg;
        std::string workers_text = "1,5";
    } conv;
    auto* conv_cmd = app.add_subcommand(
        "expt-convergence",
        "Reward convergence toward optimality as training realizations grow.\n"
        "Output columns: M,n,mean_norm_reward,se_norm_reward,cesaro_avg");
    conv_cmd->add_option("--config", conv.config_path, "Key-value config file");
    conv_cmd->add_option("--out", conv.out, "Results CSV")->capture_default_str();
    conv_cmd->add_option("--dist", conv.dist, "exponential|lomax")->capture_default_str();
    conv_cmd->add_option("--mu", conv.mu, "Exponential mean")->capture_default_str();
    conv_cmd->add_option("--alpha", conv.alpha, "Lomax shape")->capture_default_str();
    conv_cmd->add_option("--xi", conv.xi, "Lomax scale")->capture_default_str();
    conv_cmd->add_option("--rate", conv.cfg.rate, "Arrival rate")->capture_default_str();
    conv_cmd->add_option("--horizon", conv.cfg.horizon, "Horizon T")->capture_default_str();
    conv_cmd->add_option("--workers", conv.workers_text, "Worker counts, e.g. 1,5")->capture_default_str();
    conv_cmd->add_option("--m-max", conv.cfg.m_max, "Largest training-M in the sweep")->capture_default_str();
    conv_cmd->add_option("--m-step", conv.cfg.m_step, "Sweep step")->capture_default_str();
    conv_cmd->add_option("--m-test", conv.cfg.m_test, "Test replays per cell (M')")->capture_default_str();
    conv_cmd->add_option("--seed", conv.cfg.seed, "Master seed")->capture_default_str();
    add_solver_options(conv_cmd, conv.cfg.solver);
    conv_cmd->callback([&] {
        auto cfg = load_config(conv.config_path);
        cfg.require_known_keys({"out", "dist", "mu", "alpha", "xi", "rate", "horizon", "workers",
                                "m_max", "m_step", "m_test", "seed", "rtol", "atol"});
        if (use_config(conv_cmd, "--out")) conv.out = cfg.get_string("out", conv.out);
        if (use_config(conv_cmd, "--dist")) conv.dist = cfg.get_string("dist", conv.dist);
        if (use_config(conv_cmd, "--mu")) conv.mu = cfg.get_double("mu", conv.mu);
        if (use_config(conv_cmd, "--alpha")) conv.alpha = cfg.get_double("alpha", conv.alpha);
        if (use_config(conv_cmd, "--xi")) conv.xi = cfg.get_double("xi", conv.xi);
        if (use_config(conv_cmd, "--rate")) conv.cfg.rate = cfg.get_double("rate", conv.cfg.rate);
        if (use_config(conv_cmd, "--horizon")) conv.cfg.horizon = cfg.get_double("horizon", conv.cfg.horizon);
        if (use_config(conv_cmd, "--workers")) conv.workers_text = cfg.get_string("workers", conv.workers_text);
        if (use_config(conv_cmd, "--m-max")) conv.cfg.m_max = cfg.get_int("m_max", conv.cfg.m_max);
        if (use_config(conv_cmd, "--m-step")) conv.cfg.m_step = cfg.get_int("m_step", conv.cfg.m_step);
        if (use_config(conv_cmd, "--m-test")) conv.cfg.m_test = cfg.get_int("m_test", conv.cfg.m_test);
        if (use_config(conv_cmd, "--seed")) conv.cfg.seed = cfg.get_u64("seed", conv.cfg.seed);
        if (use_config(conv_cmd, "--rtol")) conv.cfg.solver.rtol = cfg.get_double("rtol", conv.cfg.solver.rtol);
        if (use_config(conv_cmd, "--atol")) conv.cfg.solver.atol = cfg.get_double("atol", conv.cfg.solver.atol);
        conv.cfg.dist = make_distribution(conv.dist, conv.mu, conv.alpha, conv.xi);
        conv.cfg.workers = npsa::parse_int_list(conv.workers_text);
        npsa::write_convergence_csv(conv.out, npsa::run_convergence(conv.cfg));
        std::cout << "wrote " << conv.out << "\n";
    });

    // --- expt-robustness ---
    struct {
        std::string config_path, out = "robustness.csv";
        npsa::RobustnessConfig cfg;
        std::string workers_text = "1,5";
    } robust;
    auto* robust_cmd = app.add_subcommand(
        "expt-robustness",
        "Reward under test-time scaling of arrival rate and value mean.\n"
        "Output columns: sweep,delta,n,mc_norm_mean,mc_norm_se,expected_norm");
    robust_cmd->add_option("--config", robust.config_path, "Key-value config file");
    robust_cmd->add_option("--out", robust.out, "Results CSV")->capture_default_str();
    robust_cmd->add_option("--rate", robust.cfg.rate, "Training arrival rate")->capture_default_str();
    robust_cmd->add_option("--mu", robust.cfg.mu, "Training value mean")->capture_default_str();
    robust_cmd->add_option("--horizon", robust.cfg.horizon, "Horizon T")->capture_default_str();
    robust_cmd->add_option("--workers", robust.workers_text, "Worker counts")->capture_default_str();
    robust_cmd->add_option("--m-train", robust.cfg.m_train, "Training realizations")->capture_default_str();
    robust_cmd->add_option("--m-test", robust.cfg.m_test, "Test replays per modifier (M')")->capture_default_str();
    robust_cmd->add_option("--num-deltas", robust.cfg.num_deltas, "Modifier count")->capture_default_str();
    robust_cmd->add_option("--delta-min", robust.cfg.delta_min, "Smallest modifier")->capture_default_str();
    robust_cmd->add_option("--delta-max", robust.cfg.delta_max, "Largest modifier")->capture_default_str();
    robust_cmd->add_option("--seed", robust.cfg.seed, "Master seed")->capture_default_str();
    add_solver_options(robust_cmd, robust.cfg.solver);
    robust_cmd->callback([&] {
        auto cfg = load_config(robust.config_path);
        cfg.require_known_keys({"out", "rate", "mu", "horizon", "workers", "m_train", "m_test",
                                "num_deltas", "delta_min", "delta_max", "seed", "rtol", "atol"});
        if (use_config(robust_cmd, "--out")) robust.out = cfg.get_string("out", robust.out);
        if (use_config(robust_cmd, "--rate")) robust.cfg.rate = cfg.get_double("rate", robust.cfg.rate);
        if (use_config(robust_cmd, "--mu")) robust.cfg.mu = cfg.get_double("mu", robust.cfg.mu);
        if (use_config(robust_cmd, "--horizon")) robust.cfg.horizon = cfg.get_double("horizon", robust.cfg.horizon);
        if (use_config(robust_cmd, "--workers")) robust.workers_text = cfg.get_string("workers", robust.workers_text);
        if (use_config(robust_cmd, "--m-train")) robust.cfg.m_train = cfg.get_int("m_train", robust.cfg.m_train);
        if (use_config(robust_cmd, "--m-test")) robust.cfg.m_test = cfg.get_int("m_test", robust.cfg.m_test);
        if (use_config(robust_cmd, "--num-deltas")) robust.cfg.num_deltas = cfg.get_int("num_deltas", robust.cfg.num_deltas);
        if (use_config(robust_cmd, "--delta-min")) robust.cfg.delta_min = cfg.get_double("delta_min", robust.cfg.delta_min);
        if (use_config(robust_cmd, "--delta-max")) robust.cfg.delta_max = cfg.get_double("delta_max", robust.cfg.delta_max);
        if (use_config(robust_cmd, "--seed")) robust.cfg.seed = cfg.get_u64("seed", robust.cfg.seed);
        if (use_config(robust_cmd, "--rtol")) robust.cfg.solver.rtol = cfg.get_double("rtol", robust.cfg.solver.rtol);
        if (use_config(robust_cmd, "--atol")) robust.cfg.solver.atol = cfg.get_double("atol", robust.cfg.solver.atol);
        robust.cfg.workers = npsa::parse_int_list(robust.workers_text);
        npsa::write_robustness_csv(robust.out, npsa::run_robustness(robust.cfg));
        std::cout << "wrote " << robust.out << "\n";
    });

    // --- expt-fraud ---
    struct {
        std::string config_path, out = "fraud.csv";
        npsa::FraudReplayConfig cfg;
        std::string workers_text = "1,5,10,25";
    } fraud;
    auto* fraud_cmd = app.add_subcommand(
        "expt-fraud",
        "Replay threshold policy and baselines over scored streams.\n"
        "Output columns: n,policy,value_fraction_mean,value_fraction_se,"
        "capture_fraction_mean,capture_fraction_se");
    fraud_cmd->add_option("--config", fraud.config_path, "Key-value config file");
    fraud_cmd->add_option("--out", fraud.out, "Results CSV")->capture_default_str();
    fraud_cmd->add_option("--train", fraud.cfg.train_csv, "Training scored CSV");
    fraud_cmd->add_option("--test", fraud.cfg.test_csv, "Test scored CSV");
    fraud_cmd->add_option("--horizon", fraud.cfg.horizon, "Horizon T")->capture_default_str();
    fraud_cmd->add_option("--workers", fraud.workers_text, "Worker counts")->capture_default_str();
    fraud_cmd->add_option("--threshold", fraud.cfg.positive_threshold, "Positive-class score threshold")->capture_default_str();
    fraud_cmd->add_option("--seed", fraud.cfg.seed, "Master seed (uniform baseline)")->capture_default_str();
    add_solver_options(fraud_cmd, fraud.cfg.solver);
    fraud_cmd->callback([&] {
        auto cfg = load_config(fraud.config_path);
        cfg.require_known_keys({"out", "train", "test", "horizon", "workers", "threshold", "seed",
                                "rtol", "atol"});
        if (use_config(fraud_cmd, "--out")) fraud.out = cfg.get_string("out", fraud.out);
        if (use_config(fraud_cmd, "--train")) fraud.cfg.train_csv = cfg.get_string("train", fraud.cfg.train_csv);
        if (use_config(fraud_cmd, "--test")) fraud.cfg.test_csv = cfg.get_string("test", fraud.cfg.test_csv);
        if (use_config(fraud_cmd, "--horizon")) fraud.cfg.horizon = cfg.get_double("horizon", fraud.cfg.horizon);
        if (use_config(fraud_cmd, "--workers")) fraud.workers_text = cfg.get_string("workers", fraud.workers_text);
        if (use_config(fraud_cmd, "--threshold")) fraud.cfg.positive_threshold = cfg.get_double("threshold", fraud.cfg.positive_threshold);
        if (use_config(fraud_cmd, "--seed")) fraud.cfg.seed = cfg.get_u64("seed", fraud.cfg.seed);
        if (use_config(fraud_cmd, "--rtol")) fraud.cfg.solver.rtol = cfg.get_double("rtol", fraud.cfg.solver.rtol);
        if (use_config(fraud_cmd, "--atol")) fraud.cfg.solver.atol = cfg.get_double("atol", fraud.cfg.solver.atol);
        if (fraud.cfg.train_csv.empty() || fraud.cfg.test_csv.empty()) {
            throw CLI::ValidationError("expt-fraud", "--train and --test are required");
        }
        fraud.cfg.workers = npsa::parse_int_list(fraud.workers_text);
        npsa::write_fraud_csv(fraud.out, npsa::run_fraud_replay(fraud.cfg));
        std::cout << "wrote " << fraud.out << "\n";
    });

    try {
        CLI11_PARSE(app, argc, argv);
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 0;
}
