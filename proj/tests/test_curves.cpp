#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <numbers>

#include "npsa/curves.hpp"
#include "npsa/simulate.hpp"
#include "test_helpers.hpp"

using namespace npsa;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// closed-form n=1 threshold for exponential values under a constant rate
double exp_curve(double t, double mu, double rate, double horizon) {
    return mu * std::log(1.0 + rate * (horizon - t));
}

// closed-form n=1 threshold for Lomax values under a constant rate
double lomax_curve(double t, double alpha, double xi, double rate, double horizon) {
    double s = horizon - t;
    return xi * (std::pow(1.0 + alpha * rate * s / (alpha - 1.0), 1.0 / alpha) - 1.0);
}

CriticalCurveSet exp_oracle_curves(int n) {
    IntensityFunction intensity(ConstantRate{1.0}, kTwoPi);
    ValueDistribution dist = Exponential(5.0);
    return derive_critical_curves(intensity, [dist](double y) { return phi_exact(dist, y); }, n);
}

struct RejectAll {
    int n;
    double T;
    int num_workers() const { return n; }
    double horizon() const { return T; }
    double threshold(int, double) const { return 1e300; }
};

}  // namespace

TEST_CASE("n=1 exponential curve matches the closed form") {
    auto curves = exp_oracle_curves(1);
    CHECK(curves.threshold(1, 0.0) == doctest::Approx(9.927841543549594).epsilon(1e-5));
    double sup = 0.0;
    for (int i = 0; i < 1024; ++i) {
        double t = kTwoPi * i / 1023.0;
        sup = std::max(sup, std::abs(curves.threshold(1, t) - exp_curve(t, 5.0, 1.0, kTwoPi)));
    }
    CHECK(sup < 1e-4);
}

TEST_CASE("n=1 lomax curve matches the closed form") {
    IntensityFunction intensity(ConstantRate{1.0}, kTwoPi);
    ValueDistribution dist = Lomax(3.5, 5.0);
    auto curves =
        derive_critical_curves(intensity, [dist](double y) { return phi_exact(dist, y); }, 1);
    CHECK(curves.threshold(1, 0.0) == doctest::Approx(4.596936406500589).epsilon(2e-4));
    double sup = 0.0;
    for (int i = 0; i < 1024; ++i) {
        double t = kTwoPi * i / 1023.0;
        sup = std::max(sup,
                       std::abs(curves.threshold(1, t) - lomax_curve(t, 3.5, 5.0, 1.0, kTwoPi)));
    }
    CHECK(sup < 1e-4);
}

TEST_CASE("terminal condition and ordering") {
    auto curves = exp_oracle_curves(5);
    for (int k = 1; k <= 5; ++k) CHECK(std::abs(curves.threshold(k, kTwoPi)) < 1e-9);
    for (int i = 0; i < 256; ++i) {
        double t = kTwoPi * i / 255.0;
        for (int k = 1; k < 5; ++k) {
            CHECK(curves.threshold(k + 1, t) <= curves.threshold(k, t) + 1e-6);
        }
    }
}

TEST_CASE("curves never increase over time") {
    auto curves = exp_oracle_curves(3);
    for (int k = 1; k <= 3; ++k) {
        double prev = curves.threshold(k, 0.0);
        for (int i = 1; i < 1024; ++i) {
            double t = kTwoPi * i / 1023.0;
            double cur = curves.threshold(k, t);
            CHECK(cur - prev <= 1e-8);
            prev = cur;
        }
    }
}

TEST_CASE("initial threshold bounded by the total expected value") {
    IntensityFunction intensity(ConstantRate{1.0}, kTwoPi);
    ValueDistribution dist = Exponential(5.0);
    auto curves =
        derive_critical_curves(intensity, [dist](double y) { return phi_exact(dist, y); }, 1);
    CHECK(curves.threshold(1, 0.0) <= 5.0 * kTwoPi * 1.0 + 1e-6);
}

TEST_CASE("derivation validates inputs") {
    IntensityFunction intensity(ConstantRate{1.0}, 1.0);
    CHECK_THROWS_AS(derive_critical_curves(intensity, [](double) { return 1.0; }, 0),
                    std::invalid_argument);
    CHECK_THROWS_AS(derive_critical_curves(
                        intensity, [](double) { return std::numeric_limits<double>::infinity(); },
                        1),
                    std::invalid_argument);
}

TEST_CASE("solver failures report the failing curve") {
    IntensityFunction intensity(ConstantRate{1.0}, 1.0);
    SolverConfig tiny;
    tiny.max_steps = 1;
    try {
        derive_critical_curves(intensity, [](double y) { return std::exp(-y); }, 2, tiny);
        FAIL("expected SolverError");
    } catch (const SolverError& err) {
        CHECK(std::string(err.what()).find("curve 1") != std::string::npos);
    }
}

TEST_CASE("replay on the oracle curve") {
    auto curves = exp_oracle_curves(1);

    SUBCASE("empty stream") {
        Realization empty{{}, kTwoPi, false};
        auto r = replay_policy(curves, empty);
        CHECK(r.accepted.empty());
        CHECK(r.total_reward == 0.0);
    }
    SUBCASE("any positive value is accepted just before the horizon") {
        Realization r{{Event{kTwoPi - 1e-9, 1e9}}, kTwoPi, false};
        CHECK(replay_policy(curves, r).workers_used == 1);
    }
    SUBCASE("threshold comparison at t = 0 is strict") {
        Realization below{{Event{0.0, 9.0}}, kTwoPi, false};
        CHECK(replay_policy(curves, below).workers_used == 0);
        Realization above{{Event{0.0, 10.0}}, kTwoPi, false};
        CHECK(replay_policy(curves, above).workers_used == 1);
    }
}

TEST_CASE("replay walks the worker index down from n") {
    auto curves = exp_oracle_curves(3);
    // three huge values late in the horizon are all accepted
    Realization r{{Event{6.0, 100.0}, Event{6.1, 100.0}, Event{6.2, 100.0}}, kTwoPi, false};
    auto result = replay_policy(curves, r);
    REQUIRE(result.workers_used == 3);
    CHECK(result.accepted[0].worker == 3);
    CHECK(result.accepted[1].worker == 2);
    CHECK(result.accepted[2].worker == 1);
    CHECK(result.total_reward == doctest::Approx(300.0));
}

TEST_CASE("expected reward of the optimal curves equals the threshold sum") {
    IntensityFunction intensity(ConstantRate{1.0}, kTwoPi);
    ValueDistribution dist = Exponential(5.0);
    RewardModel model = make_reward_model(dist);
    for (int n : {1, 2, 5}) {
        auto curves = exp_oracle_curves(n);
        double identity = optimal_reward(curves);
        double via_ode = expected_reward(curves, intensity, model);
        CHECK(std::abs(via_ode - identity) / identity < 1e-3);
    }
}

TEST_CASE("expected reward of an always-reject policy is zero") {
    IntensityFunction intensity(ConstantRate{1.0}, kTwoPi);
    RewardModel model = make_reward_model(ValueDistribution(Exponential(5.0)));
    CHECK(expected_reward(RejectAll{2, kTwoPi}, intensity, model) == 0.0);
}

TEST_CASE("monte-carlo replay agrees with the reward ODE") {
    IntensityFunction intensity(ConstantRate{1.0}, kTwoPi);
    ValueDistribution dist = Exponential(5.0);
    RewardModel model = make_reward_model(dist);
    auto curves = exp_oracle_curves(2);

    // deliberately non-optimal curves exercise the recursion off the optimum
    struct Scaled {
        const CriticalCurveSet& base;
        double factor;
        int num_workers() const { return base.num_workers(); }
        double horizon() const { return base.horizon(); }
        double threshold(int k, double t) const { return factor * base.threshold(k, t); }
    };

    auto check_agreement = [&](auto&& policy) {
        const std::size_t runs = 4000;
        std::vector<double> rewards(runs);
        for (std::size_t i = 0; i < runs; ++i) {
            Rng rng = Rng::substream(404, i);
            rewards[i] = replay_policy(policy, simulate(intensity, dist, rng)).total_reward;
        }
        double sum = 0.0;
        for (double r : rewards) sum += r;
        double mc = sum / static_cast<double>(runs);
        double ss = 0.0;
        for (double r : rewards) ss += (r - mc) * (r - mc);
        double se = std::sqrt(ss / static_cast<double>(runs - 1) / static_cast<double>(runs));
        double ode = expected_reward(policy, intensity, model);
        CHECK(std::abs(mc - ode) < 3.0 * se);
    };
    check_agreement(CurvePrefix<CriticalCurveSet>{curves, 2});
    check_agreement(Scaled{curves, 1.35});
}

TEST_CASE("more workers never hurt") {
    auto curves = exp_oracle_curves(10);
    double prev = 0.0;
    for (int n = 1; n <= 10; ++n) {
        double total = optimal_reward(CurvePrefix<CriticalCurveSet>{curves, n});
        CHECK(total >= prev);
        prev = total;
    }
}

TEST_CASE("curves fitted from realizations stay near optimal") {
    IntensityFunction intensity(ConstantRate{1.0}, kTwoPi);
    ValueDistribution dist = Exponential(5.0);
    RewardModel model = make_reward_model(dist);
    double r_star = optimal_reward(exp_oracle_curves(1));

    std::vector<double> ratios;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto rs = simulate_many(intensity, dist, 100, seed);
        auto est = IntensityEstimate::fit(rs, kTwoPi);
        std::vector<double> values;
        for (const auto& r : rs) {
            for (const auto& e : r.events) values.push_back(e.value);
        }
        MeanShortageCache cache(std::move(values));
        auto curves = derive_critical_curves(
            est.as_intensity(), [&](double y) { return cache(y); }, 1);
        ratios.push_back(expected_reward(curves, intensity, model) / r_star);
    }
    CHECK(test::median(ratios) >= 0.9);
}

TEST_CASE("curve CSV round trip reproduces grid-snapped decisions") {
    auto curves = exp_oracle_curves(3);
    auto sampled = sample_curves(curves, 512);
    auto path = std::filesystem::temp_directory_path() / "npsa_curves_roundtrip.csv";
    write_curves_csv(path.string(), sampled);
    auto loaded = read_curves_csv(path.string());
    REQUIRE(loaded.num_workers() == 3);
    REQUIRE(loaded.grid().size() == 512);

    IntensityFunction intensity(ConstantRate{1.0}, kTwoPi);
    ValueDistribution dist = Exponential(5.0);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng = Rng::substream(777, seed);
        Realization r = simulate(intensity, dist, rng);
        auto a = replay_policy(sampled, r);
        auto b = replay_policy(loaded, r);
        REQUIRE(a.accepted.size() == b.accepted.size());
        for (std::size_t i = 0; i < a.accepted.size(); ++i) {
            CHECK(a.accepted[i].event_index == b.accepted[i].event_index);
            CHECK(a.accepted[i].worker == b.accepted[i].worker);
        }
    }
    std::filesystem::remove(path);
}
