#include "npsa/simulate.hpp"

#include "npsa/value_dist.hpp"

namespace npsa {

namespace {

// Candidate arrival times at the envelope rate, thinned to lambda(t).
template <typename OnArrival>
void thin_arrivals(const IntensityFunction& intensity, Rng& rng, OnArrival&& on_arrival) {
    const double horizon = intensity.horizon();
    const double envelope = intensity.max_rate();
    const bool constant = intensity.is_constant();
    double t = 0.0;
    for (;;) {
        t += rng.exponential(1.0 / envelope);
        if (t >= horizon) break;
        if (!constant && rng.uniform() * envelope >= intensity.rate_at(t)) continue;
        on_arrival(t);
    }
}

}  // namespace

Realization simulate(const IntensityFunction& intensity, const ValueDistribution& dist, Rng& rng) {
    Realization r{{}, intensity.horizon(), false};
    thin_arrivals(intensity, rng, [&](double t) {
        r.events.push_back(Event{t, sample(dist, rng)});
    });
    return r;
}

std::vector<Realization> simulate_many(const IntensityFunction& intensity,
                                       const ValueDistribution& dist, std::size_t count,
                                       std::uint64_t master_seed) {
    std::vector<Realization> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        Rng rng = Rng::substream(master_seed, i);
        out.push_back(simulate(intensity, dist, rng));
    }
    return out;
}

Realization simulate_scored(const IntensityFunction& intensity, const ScoredStreamModel& model,
                            Rng& rng) {
    Realization r{{}, intensity.horizon(), true};
    thin_arrivals(intensity, rng, [&](double t) {
        Event e;
        e.t = t;
        e.label = rng.uniform() < model.fraud_prob ? 1 : 0;
        e.value = sample(e.label ? model.fraud_values : model.legit_values, rng);
        double noise = model.score_noise * rng.uniform();
        e.score = e.label ? 1.0 - noise : noise;
        r.events.push_back(e);
    });
    return r;
}

std::vector<Realization> simulate_scored_many(const IntensityFunction& intensity,
                                              const ScoredStreamModel& model, std::size_t count,
                                              std::uint64_t master_seed) {
    std::vector<Realization> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        Rng rng = Rng::substream(master_seed, i);
        out.push_back(simulate_scored(intensity, model, rng));
    }
    return out;
}

}  // namespace npsa
