#pragma once

#include "smip/cost_model.hpp"
#include "smip/selective.hpp"

#include <span>
#include <vector>

namespace smip {

struct ConfusionCounts {
    std::size_t c = 0;     // decided and correct
    std::size_t c_bar = 0; // decided and wrong
    std::size_t r = 0;     // rejected, would have been wrong
    std::size_t r_bar = 0; // rejected, would have been right

    std::size_t total() const { return c + c_bar + r + r_bar; }
    friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

/// Rejected instance i is scored as if decided `counterfactual[i]`.
ConfusionCounts confusion_counts(std::span<const Decision> decisions,
                                 std::span<const LabeledInstance> instances,
                                 std::span<const DecisionKind> counterfactual);

/// 0.5 cut on mu for every instance (baselines).
std::vector<DecisionKind> mean_cut_counterfactual(std::span<const LabeledInstance> instances);

/// Region polarity under the given thresholds (MIPSC and MIPCSC).
std::vector<DecisionKind> region_counterfactual(std::span<const LabeledInstance> instances,
                                                const ThresholdSolution& th);

/// NaN marks an undefined value; RQ is +inf when r > 0 and r_bar = 0 and
/// 1 when r = r_bar = 0.
struct RejectMetrics {
    double nra = 0.0;
    double cq = 0.0;
    double rq = 0.0;
};

RejectMetrics reject_metrics(const ConfusionCounts& k);

struct ProfitTriple {
    double model = 0.0;
    double oracle = 0.0;
    double majority = 0.0;
};

/// (model - majority) / (oracle - majority); NaN when oracle == majority.
double profit_gain(const ProfitTriple& p);

/// Same formula as objective_mipcsc.
double profit_of(std::span<const Decision> decisions, std::span<const LabeledInstance> instances,
                 const CostModel& cm);

/// Every instance decided by its true class, no rejections.
double oracle_profit(std::span<const LabeledInstance> instances, const CostModel& cm);

/// Every instance decided by the majority polarity of the training labels
/// (`majority_label` 0 -> Positive, 1 -> Negative).
double majority_profit(std::span<const LabeledInstance> instances, int majority_label,
                       const CostModel& cm);

} // namespace smip
