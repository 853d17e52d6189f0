#pragma once

#include "npsa/curves.hpp"
#include "npsa/realization.hpp"
#include "npsa/rng.hpp"

namespace npsa {

// Comparison policies over score-annotated streams. An event is
// "clf-positive" when its score is at least positive_threshold. Each policy
// accepts at most n events; only greedy is single-pass.

// First n positives in time order.
ReplayResult greedy_policy(const Realization& stream, int n, double positive_threshold);

// min(n, #positives) positives uniformly at random, without replacement.
ReplayResult uniform_policy(const Realization& stream, int n, double positive_threshold, Rng& rng);

// The n highest-raw-value positives; value ties broken by earlier arrival.
ReplayResult hindsight_policy(const Realization& stream, int n, double positive_threshold);

// The n highest-raw-value events with true label 1.
ReplayResult full_knowledge_policy(const Realization& stream, int n);

// Totals over accepted events whose true label is 1, as fractions of the
// realization's fraudulent value and count; a stream with no positive labels
// reports both fractions as 1 (nothing was missed).
struct FraudMetrics {
    double realized_value = 0.0;   // sum of raw values of accepted label-1 events
    int captured_frauds = 0;       // count of accepted label-1 events
    double value_fraction = 0.0;   // realized_value / total fraud value
    double capture_fraction = 0.0; // captured_frauds / total frauds
};

FraudMetrics fraud_metrics(const ReplayResult& result, const Realization& stream);

}  // namespace npsa
