#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "npsa/estimators.hpp"
#include "npsa/simulate.hpp"
#include "test_helpers.hpp"

using namespace npsa;

namespace {

Realization from_times(std::vector<double> times, double horizon) {
    Realization r{{}, horizon, false};
    for (double t : times) r.events.push_back(Event{t, 1.0});
    return r;
}

}  // namespace

TEST_CASE("intensity estimate with a single realization and bin") {
    // M = 1 gives delta = T, so a single bin carrying the raw count
    auto r = from_times({0.1, 0.5, 0.9}, 1.0);
    auto est = IntensityEstimate::fit(std::vector<Realization>{r}, 1.0);
    CHECK(est.bin_width() == doctest::Approx(1.0));
    REQUIRE(est.rates().size() == 1);
    CHECK(est.rate_at(0.0) == doctest::Approx(3.0));
    CHECK(est.rate_at(0.7) == doctest::Approx(3.0));
    CHECK(est.rate_at(1.0) == doctest::Approx(3.0));  // t = T maps into the last bin
}

TEST_CASE("intensity estimate of empty streams is zero") {
    std::vector<Realization> rs{from_times({}, 1.0), from_times({}, 1.0)};
    auto est = IntensityEstimate::fit(rs, 1.0);
    for (double r : est.rates()) CHECK(r == 0.0);
}

TEST_CASE("intensity estimate validation") {
    CHECK_THROWS_AS(IntensityEstimate::fit(std::vector<Realization>{}, 1.0),
                    std::invalid_argument);
    auto outside = from_times({1.5}, 1.0);
    outside.horizon = 2.0;  // event beyond the fitting horizon
    CHECK_THROWS_AS(IntensityEstimate::fit(std::vector<Realization>{outside}, 1.0),
                    std::invalid_argument);
}

TEST_CASE("estimated rate concentrates near the true rate") {
    const double horizon = 1.0;
    IntensityFunction intensity(ConstantRate{1.0}, horizon);
    auto rs = simulate_many(intensity, Exponential(1.0), 1000, 2025);
    auto est = IntensityEstimate::fit(rs, horizon);
    double tol = 3.0 * std::sqrt(1.0 / (1000.0 * est.bin_width()));
    for (double rate : est.rates()) CHECK(std::abs(rate - 1.0) < tol);
}

TEST_CASE("estimate integrates to the mean event count") {
    // property holds whatever the bin truncation at T does
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        for (std::size_t m : {1u, 7u, 40u, 64u}) {
            const double horizon = 2.7;
            IntensityFunction intensity(PiecewiseConstantRate{0.9, {3.0, 1.0, 4.0}}, horizon);
            auto rs = simulate_many(intensity, Exponential(1.0), m, seed);
            std::size_t total = 0;
            for (const auto& r : rs) total += r.events.size();
            auto est = IntensityEstimate::fit(rs, horizon);
            double mass = est.as_intensity().integrate(0.0, horizon);
            CHECK(mass == doctest::Approx(static_cast<double>(total) / static_cast<double>(m))
                              .epsilon(1e-9));
        }
    }
}

TEST_CASE("estimate round-trips through IntensityFunction") {
    auto r = from_times({0.1, 0.2, 1.4, 2.2}, 2.5);
    auto est = IntensityEstimate::fit(std::vector<Realization>{r}, 2.5);
    auto intensity = est.as_intensity();
    for (double t : {0.0, 0.3, 1.0, 1.9, 2.5}) {
        CHECK(intensity.rate_at(t) == doctest::Approx(est.rate_at(t)));
    }
    CHECK(intensity.max_rate() > 0.0);
}

TEST_CASE("mean-shortage cache recurrence") {
    MeanShortageCache cache({1.0, 2.0, 3.0});
    REQUIRE(cache.suffix_integrals().size() == 3);
    CHECK(cache.suffix_integrals()[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(cache.suffix_integrals()[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(cache.suffix_integrals()[2] == 0.0);

    MeanShortageCache single({4.2});
    CHECK(single.suffix_integrals() == std::vector<double>{0.0});

    MeanShortageCache ties({5.0, 5.0, 5.0});
    CHECK(ties.suffix_integrals() == std::vector<double>{0.0, 0.0, 0.0});
}

TEST_CASE("mean-shortage evaluation branches") {
    MeanShortageCache cache({1.0, 2.0, 3.0});
    CHECK(cache(0.0) == 2.0);  // the sample mean, exactly
    CHECK(cache(1.5) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(cache(10.0) == 0.0);
    CHECK(cache.ecdf(2.0) == doctest::Approx(2.0 / 3.0));
    CHECK(cache.ecdf(0.5) == 0.0);
    CHECK(cache.ecdf(3.0) == 1.0);
    CHECK_THROWS_AS(cache(-0.1), std::invalid_argument);
}

TEST_CASE("cache construction validation") {
    CHECK_THROWS_AS(MeanShortageCache({}), std::invalid_argument);
    CHECK_THROWS_AS(MeanShortageCache({1.0, -0.5}), std::invalid_argument);
}

TEST_CASE("cache invariants hold on random samples") {
    Rng rng(5);
    for (int rep = 0; rep < 50; ++rep) {
        std::size_t n = 1 + rng.index(60);
        std::vector<double> samples(n);
        for (auto& x : samples) x = 10.0 * rng.uniform();
        MeanShortageCache cache(samples);

        const auto& phis = cache.suffix_integrals();
        const auto& xs = cache.sorted_samples();
        CHECK(phis.back() == 0.0);
        for (std::size_t i = 1; i < phis.size(); ++i) CHECK(phis[i] <= phis[i - 1] + 1e-15);
        // phi(0) = x_1 + phi_1 since the complement is 1 below the smallest sample
        CHECK(cache(0.0) == doctest::Approx(xs.front() + phis.front()).epsilon(1e-12));
        for (std::size_t i = 0; i + 1 < phis.size(); ++i) {
            double expected = phis[i + 1] + (xs[i + 1] - xs[i]) *
                                                (static_cast<double>(n - i - 1) /
                                                 static_cast<double>(n));
            CHECK(phis[i] == doctest::Approx(expected).epsilon(1e-13));
        }
    }
}

TEST_CASE("evaluation equals the brute-force rectangle sum") {
    Rng rng(6);
    for (int rep = 0; rep < 60; ++rep) {
        std::size_t n = 1 + rng.index(200);
        std::vector<double> samples(n);
        for (auto& x : samples) x = 20.0 * rng.uniform();
        MeanShortageCache cache(samples);
        for (int q = 0; q < 40; ++q) {
            double y = 25.0 * rng.uniform();
            double oracle = test::ecdf_tail_integral(samples, y);
            CHECK(std::abs(cache(y) - oracle) < 1e-12);
        }
    }
}

TEST_CASE("estimate is piecewise linear, nonincreasing and convex") {
    Rng rng(8);
    std::vector<double> samples(500);
    for (auto& x : samples) x = rng.exponential(3.0);
    MeanShortageCache cache(samples);
    double prev = cache(0.0);
    double prev_slope = -1.0;
    for (double y = 0.01; y < 25.0; y += 0.01) {
        double cur = cache(y);
        CHECK(cur <= prev + 1e-12);
        CHECK(cur >= 0.0);
        double slope = (cur - prev) / 0.01;
        CHECK(slope >= prev_slope - 1e-9);  // slopes nondecreasing within [-1, 0]
        CHECK(slope <= 1e-9);
        prev = cur;
        prev_slope = slope;
    }
}

TEST_CASE("estimator CSV exports") {
    auto dir = std::filesystem::temp_directory_path();
    auto r = from_times({0.1, 0.5}, 1.0);
    auto est = IntensityEstimate::fit(std::vector<Realization>{r}, 1.0);
    MeanShortageCache cache({1.0, 2.0});
    auto ipath = dir / "npsa_intensity.csv";
    auto spath = dir / "npsa_shortage.csv";
    write_intensity_csv(ipath.string(), est);
    write_mean_shortage_csv(spath.string(), cache);
    CHECK(std::filesystem::file_size(ipath) > 20);
    CHECK(std::filesystem::file_size(spath) > 10);
    std::filesystem::remove(ipath);
    std::filesystem::remove(spath);
}
