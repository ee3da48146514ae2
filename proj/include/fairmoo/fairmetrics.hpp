#pragma once

// Evaluation criteria: generalized entropy indices over per-sample benefits,
// confusion-matrix fairness metrics comparing the privileged side against
// the rest, accuracy, and cross entropy. All values are minimized, optimum 0.

#include <cstddef>
#include <vector>

#include "fairmoo/dataset.hpp"
#include "fairmoo/metric.hpp"
#include "fairmoo/nnet.hpp"

namespace fairmoo {

struct SideCounts {
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    std::size_t total() const { return tp + fp + tn + fn; }
};

// Confusion counts split by the privileged flag of each sample's group:
// g1 pools the privileged groups, g2 everything else.
struct GroupConfusion {
    SideCounts g1, g2;
};

// b_i = p_i - y_i + 1; strictly positive whenever p is inside (0,1).
std::vector<double> benefit_vector(const std::vector<double>& probs,
                                   const std::vector<int>& labels);

// (1 / (n a (a-1))) * sum_i ((b_i / mu)^a - 1). Requires b_i > 0 and
// a outside {0,1}; the limit forms are not implemented.
double generalized_entropy(const std::vector<double>& b, double alpha);

// Between-group share of the same index: each sample's benefit replaced by
// its group mean. Every group must have at least one member in b; compact()
// a restricted partition first.
double group_entropy(const std::vector<double>& b, const GroupPartition& part, double alpha);

// preds and labels in {0,1}; the partition must carry privileged flags.
GroupConfusion confusion(const std::vector<int>& preds, const std::vector<int>& labels,
                         const GroupPartition& part);

// Table of Fair1..Fair16 over a group confusion. Difference metrics return
// the absolute difference; ratio metrics fold with 1 - min(r, 1/r). A rate
// pair where both sides are undefined or both zero scores 0 (no evidence of
// disparity); exactly one undefined or zero side scores 1.
double fairness_metric(Metric id, const GroupConfusion& c);

// Mean binary cross entropy; probabilities clamped to
// [kProbClamp, 1 - kProbClamp] before the logs.
double cross_entropy(const std::vector<double>& probs, const std::vector<int>& labels);

// p >= 0.5 predicts the positive class.
std::vector<int> threshold_preds(const std::vector<double>& probs);

// All requested criteria from one shared prediction vector. ACC is reported
// as 1 - accuracy so every entry is minimized.
std::vector<double> evaluate_probs(const std::vector<double>& probs,
                                   const std::vector<int>& labels,
                                   const GroupPartition& part,
                                   const std::vector<Metric>& criteria, double alpha);

// Convenience wrapper: one forward pass over ds, then evaluate_probs.
std::vector<double> evaluate(const NetSpec& net, const Genome& g, const Dataset& ds,
                             const GroupPartition& part, const std::vector<Metric>& criteria,
                             double alpha);

}  // namespace fairmoo
