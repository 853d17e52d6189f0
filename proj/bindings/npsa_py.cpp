// Python bindings for the core operations: simulation, estimation, curve
// derivation, replay, reward evaluation, and the baseline policies.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "npsa/baselines.hpp"
#include "npsa/curves.hpp"
#include "npsa/estimators.hpp"
#include "npsa/experiments.hpp"
#include "npsa/simulate.hpp"

namespace py = pybind11;
using namespace npsa;

// The stock variant caster needs a default-constructible first alternative,
// which ValueDistribution deliberately lacks; this caster accepts any of the
// three registered classes wherever a ValueDistribution is expected.
namespace pybind11::detail {
template <>
struct type_caster<ValueDistribution> {
    static constexpr auto name = const_name("Exponential | Lomax | Empirical");

    std::optional<ValueDistribution> storage;

    template <typename T>
    bool try_load(handle src, bool convert) {
        make_caster<T> caster;
        if (!caster.load(src, convert)) return false;
        storage.emplace(cast_op<T&>(caster));
        return true;
    }

    bool load(handle src, bool convert) {
        return try_load<Exponential>(src, convert) || try_load<Lomax>(src, convert) ||
               try_load<Empirical>(src, convert);
    }

    static handle cast(const ValueDistribution& src, return_value_policy policy, handle parent) {
        return std::visit(
            [&](const auto& alt) {
                return make_caster<std::decay_t<decltype(alt)>>::cast(alt, policy, parent);
            },
            src);
    }

    operator ValueDistribution*() { return &*storage; }
    operator ValueDistribution&() { return *storage; }
    operator ValueDistribution&&() && { return std::move(*storage); }
    template <typename T_>
    using cast_op_type = movable_cast_op_type<T_>;
};
}  // namespace pybind11::detail

PYBIND11_MODULE(_npsa, m) {
    m.doc() = "Sequential allocation with estimated arrival intensity and value distribution";

    // the three value-distribution variants; functions taking a
    // ValueDistribution accept any of them
    py::class_<Exponential>(m, "Exponential")
        .def(py::init<double>(), py::arg("mu"))
        .def_readonly("mu", &Exponential::mu);
    py::class_<Lomax>(m, "Lomax")
        .def(py::init<double, double>(), py::arg("alpha"), py::arg("xi"))
        .def_readonly("alpha", &Lomax::alpha)
        .def_readonly("xi", &Lomax::xi);
    py::class_<Empirical>(m, "Empirical")
        .def(py::init<std::vector<double>>(), py::arg("samples"))
        .def_readonly("samples", &Empirical::samples);

    m.def("sample_values", [](const ValueDistribution& d, std::uint64_t seed, std::size_t count) {
        Rng rng(seed);
        std::vector<double> out(count);
        for (auto& x : out) x = sample(d, rng);
        return out;
    }, py::arg("dist"), py::arg("seed"), py::arg("count") = 1);
    m.def("cdf", [](const ValueDistribution& d, double z) { return cdf(d, z); },
          py::arg("dist"), py::arg("z"));
    m.def("survival", [](const ValueDistribution& d, double z) { return survival(d, z); },
          py::arg("dist"), py::arg("z"));
    m.def("phi_exact", [](const ValueDistribution& d, double y) { return phi_exact(d, y); },
          py::arg("dist"), py::arg("y"));
    m.def("dist_mean", [](const ValueDistribution& d) { return mean(d); }, py::arg("dist"));

    py::class_<IntensityFunction>(m, "IntensityFunction")
        .def_static("constant", [](double rate, double horizon) {
            return IntensityFunction(ConstantRate{rate}, horizon);
        }, py::arg("rate"), py::arg("horizon"))
        .def_static("piecewise", [](double bin_width, std::vector<double> rates, double horizon) {
            return IntensityFunction(PiecewiseConstantRate{bin_width, std::move(rates)}, horizon);
        }, py::arg("bin_width"), py::arg("rates"), py::arg("horizon"))
        .def("scaled", [](const IntensityFunction& base, double factor) {
            return IntensityFunction::scaled(base, factor);
        }, py::arg("factor"))
        .def("rate_at", &IntensityFunction::rate_at)
        .def("integrate", &IntensityFunction::integrate)
        .def("max_rate", &IntensityFunction::max_rate)
        .def_property_readonly("horizon", &IntensityFunction::horizon);

    py::class_<Event>(m, "Event")
        .def(py::init([](double t, double value, double score, int label) {
            return Event{t, value, score, label};
        }), py::arg("t"), py::arg("value"), py::arg("score") = -1.0, py::arg("label") = -1)
        .def_readonly("t", &Event::t)
        .def_readonly("value", &Event::value)
        .def_readonly("score", &Event::score)
        .def_readonly("label", &Event::label)
        .def_property_readonly("adjusted_value", &Event::adjusted_value);

    py::class_<Realization>(m, "Realization")
        .def(py::init([](std::vector<Event> events, double horizon, bool scored) {
            Realization r{std::move(events), horizon, scored};
            r.validate();
            return r;
        }), py::arg("events"), py::arg("horizon"), py::arg("scored") = false)
        .def_readonly("events", &Realization::events)
        .def_readonly("horizon", &Realization::horizon)
        .def_readonly("scored", &Realization::scored);

    m.def("simulate", [](const IntensityFunction& intensity, const ValueDistribution& dist,
                         std::uint64_t seed) {
        Rng rng(seed);
        return simulate(intensity, dist, rng);
    }, py::arg("intensity"), py::arg("dist"), py::arg("seed"));
    m.def("simulate_many", &simulate_many, py::arg("intensity"), py::arg("dist"),
          py::arg("count"), py::arg("seed"));

    m.def("read_realizations_csv", &read_realizations_csv, py::arg("path"), py::arg("horizon"));
    m.def("write_realizations_csv", &write_realizations_csv, py::arg("path"),
          py::arg("realizations"));

    py::class_<IntensityEstimate>(m, "IntensityEstimate")
        .def_static("fit", [](const std::vector<Realization>& rs, double horizon) {
            return IntensityEstimate::fit(rs, horizon);
        }, py::arg("realizations"), py::arg("horizon"))
        .def("rate_at", &IntensityEstimate::rate_at)
        .def("as_intensity", &IntensityEstimate::as_intensity)
        .def_property_readonly("bin_width", &IntensityEstimate::bin_width)
        .def_property_readonly("rates", &IntensityEstimate::rates)
        .def_property_readonly("mean_rate", &IntensityEstimate::mean_rate);

    py::class_<MeanShortageCache>(m, "MeanShortageCache")
        .def(py::init<std::vector<double>>(), py::arg("samples"))
        .def("__call__", &MeanShortageCache::operator())
        .def("ecdf", &MeanShortageCache::ecdf)
        .def_property_readonly("sample_mean", &MeanShortageCache::sample_mean)
        .def_property_readonly("sorted_samples", &MeanShortageCache::sorted_samples)
        .def_property_readonly("suffix_integrals", &MeanShortageCache::suffix_integrals);

    py::class_<SolverConfig>(m, "SolverConfig")
        .def(py::init([](double rtol, double atol) {
            SolverConfig c;
            c.rtol = rtol;
            c.atol = atol;
            return c;
        }), py::arg("rtol") = 1e-6, py::arg("atol") = 1e-8)
        .def_readwrite("rtol", &SolverConfig::rtol)
        .def_readwrite("atol", &SolverConfig::atol);

    py::class_<CriticalCurveSet>(m, "CriticalCurveSet")
        .def_property_readonly("num_workers", &CriticalCurveSet::num_workers)
        .def_property_readonly("horizon", &CriticalCurveSet::horizon)
        .def("threshold", &CriticalCurveSet::threshold, py::arg("worker"), py::arg("t"))
        .def("initial_threshold_sum", &CriticalCurveSet::initial_threshold_sum);

    m.def("derive_critical_curves",
          [](const IntensityFunction& intensity, const std::function<double(double)>& phi, int n,
             const SolverConfig& config) {
              return derive_critical_curves(intensity, phi, n, config);
          },
          py::arg("intensity"), py::arg("mean_shortage"), py::arg("n"),
          py::arg("config") = SolverConfig{});
    m.def("derive_critical_curves_exact",
          [](const IntensityFunction& intensity, const ValueDistribution& dist, int n,
             const SolverConfig& config) {
              return derive_critical_curves(
                  intensity, [&dist](double y) { return phi_exact(dist, y); }, n, config);
          },
          py::arg("intensity"), py::arg("dist"), py::arg("n"),
          py::arg("config") = SolverConfig{});
    m.def("derive_critical_curves_from_cache",
          [](const IntensityFunction& intensity, const MeanShortageCache& cache, int n,
             const SolverConfig& config) {
              return derive_critical_curves(
                  intensity, [&cache](double y) { return cache(y); }, n, config);
          },
          py::arg("intensity"), py::arg("cache"), py::arg("n"),
          py::arg("config") = SolverConfig{});

    py::class_<Acceptance>(m, "Acceptance")
        .def_readonly("worker", &Acceptance::worker)
        .def_readonly("event_index", &Acceptance::event_index)
        .def_readonly("t", &Acceptance::t)
        .def_readonly("value", &Acceptance::value);

    py::class_<ReplayResult>(m, "ReplayResult")
        .def_readonly("accepted", &ReplayResult::accepted)
        .def_readonly("total_reward", &ReplayResult::total_reward)
        .def_readonly("workers_used", &ReplayResult::workers_used);

    m.def("replay_policy",
          [](const CriticalCurveSet& curves, const Realization& r, bool adjusted) {
              return adjusted ? replay_policy(curves, r, [](const Event& e) {
                  return e.adjusted_value();
              })
                              : replay_policy(curves, r);
          },
          py::arg("curves"), py::arg("realization"), py::arg("adjusted") = false);

    m.def("expected_reward",
          [](const CriticalCurveSet& curves, const IntensityFunction& intensity,
             const ValueDistribution& dist, const SolverConfig& config) {
              return expected_reward(curves, intensity, make_reward_model(dist), config);
          },
          py::arg("curves"), py::arg("intensity"), py::arg("dist"),
          py::arg("config") = SolverConfig{});
    m.def("expected_reward_from_cache",
          [](const CriticalCurveSet& curves, const IntensityFunction& intensity,
             const MeanShortageCache& cache, const SolverConfig& config) {
              return expected_reward(curves, intensity, make_reward_model(cache), config);
          },
          py::arg("curves"), py::arg("intensity"), py::arg("cache"),
          py::arg("config") = SolverConfig{});
    m.def("optimal_reward",
          [](const CriticalCurveSet& curves) { return optimal_reward(curves); });

    m.def("greedy_policy", &greedy_policy, py::arg("stream"), py::arg("n"),
          py::arg("positive_threshold") = 0.5);
    m.def("uniform_policy",
          [](const Realization& stream, int n, double positive_threshold, std::uint64_t seed) {
              Rng rng(seed);
              return uniform_policy(stream, n, positive_threshold, rng);
          },
          py::arg("stream"), py::arg("n"), py::arg("positive_threshold"), py::arg("seed"));
    m.def("hindsight_policy", &hindsight_policy, py::arg("stream"), py::arg("n"),
          py::arg("positive_threshold") = 0.5);
    m.def("full_knowledge_policy", &full_knowledge_policy, py::arg("stream"), py::arg("n"));

    py::class_<FraudMetrics>(m, "FraudMetrics")
        .def_readonly("realized_value", &FraudMetrics::realized_value)
        .def_readonly("captured_frauds", &FraudMetrics::captured_frauds)
        .def_readonly("value_fraction", &FraudMetrics::value_fraction)
        .def_readonly("capture_fraction", &FraudMetrics::capture_fraction);
    m.def("fraud_metrics", &fraud_metrics, py::arg("result"), py::arg("stream"));
}
