#include "npsa/baselines.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace npsa {

namespace {

void require_scored(const Realization& stream) {
    if (!stream.scored) throw std::invalid_argument("baseline policies need a scored stream");
}

void require_budget(int n) {
    if (n < 1) throw std::invalid_argument("baseline policies need n >= 1");
}

std::vector<std::size_t> positive_indices(const Realization& stream, double positive_threshold) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < stream.events.size(); ++i) {
        if (stream.events[i].score >= positive_threshold) idx.push_back(i);
    }
    return idx;
}

// Build a result from chosen event indices, reported in arrival order with
// the worker index counting down from n.
ReplayResult make_result(const Realization& stream, std::vector<std::size_t> chosen, int n) {
    std::sort(chosen.begin(), chosen.end());
    ReplayResult result;
    int k = n;
    for (std::size_t i : chosen) {
        const Event& e = stream.events[i];
        result.accepted.push_back(Acceptance{k--, i, e.t, e.value});
        result.total_reward += e.value;
    }
    result.workers_used = static_cast<int>(result.accepted.size());
    return result;
}

}  // namespace

ReplayResult greedy_policy(const Realization& stream, int n, double positive_threshold) {
    require_scored(stream);
    require_budget(n);
    std::vector<std::size_t> chosen;
    for (std::size_t i = 0; i < stream.events.size(); ++i) {
        if (static_cast<int>(chosen.size()) == n) break;
        if (stream.events[i].score >= positive_threshold) chosen.push_back(i);
    }
    return make_result(stream, std::move(chosen), n);
}

ReplayResult uniform_policy(const Realization& stream, int n, double positive_threshold,
                            Rng& rng) {
    require_scored(stream);
    require_budget(n);
    auto positives = positive_indices(stream, positive_threshold);
    std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(n), positives.size());
    // partial Fisher-Yates over the positive indices
    for (std::size_t i = 0; i < take; ++i) {
        std::size_t j = i + rng.index(positives.size() - i);
        std::swap(positives[i], positives[j]);
    }
    positives.resize(take);
    return make_result(stream, std::move(positives), n);
}

ReplayResult hindsight_policy(const Realization& stream, int n, double positive_threshold) {
    require_scored(stream);
    require_budget(n);
    auto positives = positive_indices(stream, positive_threshold);
    std::stable_sort(positives.begin(), positives.end(), [&](std::size_t a, std::size_t b) {
        return stream.events[a].value > stream.events[b].value;  // stable: earlier arrival wins ties
    });
    if (positives.size() > static_cast<std::size_t>(n)) positives.resize(static_cast<std::size_t>(n));
    return make_result(stream, std::move(positives), n);
}

ReplayResult full_knowledge_policy(const Realization& stream, int n) {
    require_scored(stream);
    require_budget(n);
    std::vector<std::size_t> frauds;
    for (std::size_t i = 0; i < stream.events.size(); ++i) {
        if (stream.events[i].label == 1) frauds.push_back(i);
    }
    std::stable_sort(frauds.begin(), frauds.end(), [&](std::size_t a, std::size_t b) {
        return stream.events[a].value > stream.events[b].value;
    });
    if (frauds.size() > static_cast<std::size_t>(n)) frauds.resize(static_cast<std::size_t>(n));
    return make_result(stream, std::move(frauds), n);
}

FraudMetrics fraud_metrics(const ReplayResult& result, const Realization& stream) {
    require_scored(stream);
    double total_fraud_value = 0.0;
    int total_frauds = 0;
    for (const Event& e : stream.events) {
        if (e.label == 1) {
            total_fraud_value += e.value;
            ++total_frauds;
        }
    }
    FraudMetrics m;
    for (const Acceptance& a : result.accepted) {
        const Event& e = stream.events[a.event_index];
        if (e.label == 1) {
            m.realized_value += e.value;
            ++m.captured_frauds;
        }
    }
    // nothing to capture counts as fully captured
    m.value_fraction = total_fraud_value > 0.0 ? m.realized_value / total_fraud_value : 1.0;
    m.capture_fraction = total_frauds > 0 ? static_cast<double>(m.captured_frauds) /
                                                static_cast<double>(total_frauds)
                                          : 1.0;
    return m;
}

}  // namespace npsa
