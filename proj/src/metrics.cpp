#include "smip/metrics.hpp"

#include "smip/mipcsc_solver.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace smip {

ConfusionCounts confusion_counts(std::span<const Decision> decisions,
                                 std::span<const LabeledInstance> instances,
                                 std::span<const DecisionKind> counterfactual)
{
    if (decisions.size() != instances.size() || counterfactual.size() != instances.size())
        throw std::invalid_argument("confusion_counts: inputs differ in length");
    ConfusionCounts k;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        const int y = instances[i].y;
        if (!decisions[i].rejected()) {
            (is_correct(decisions[i].kind, y) ? k.c : k.c_bar) += 1;
            continue;
        }
        if (counterfactual[i] == DecisionKind::Reject)
            throw std::invalid_argument("confusion_counts: counterfactual decision must not be Reject");
        (is_correct(counterfactual[i], y) ? k.r_bar : k.r) += 1;
    }
    return k;
}

std::vector<DecisionKind> mean_cut_counterfactual(std::span<const LabeledInstance> instances)
{
    std::vector<DecisionKind> out;
    out.reserve(instances.size());
    for (const auto& inst : instances)
        out.push_back(mean_cut_decision(inst.est.mu));
    return out;
}

std::vector<DecisionKind> region_counterfactual(std::span<const LabeledInstance> instances,
                                                const ThresholdSolution& th)
{
    std::vector<DecisionKind> out;
    out.reserve(instances.size());
    for (const auto& inst : instances)
        out.push_back(region_polarity(assign_region(inst.est, th), inst.est.mu));
    return out;
}

RejectMetrics reject_metrics(const ConfusionCounts& k)
{
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double c = static_cast<double>(k.c);
    const double cb = static_cast<double>(k.c_bar);
    const double r = static_cast<double>(k.r);
    const double rb = static_cast<double>(k.r_bar);

    RejectMetrics m;
    m.nra = k.c + k.c_bar == 0 ? nan : c / (c + cb);
    m.cq = k.total() == 0 ? nan : (c + r) / (c + r + cb + rb);
    if (k.r_bar == 0)
        m.rq = k.r > 0 ? std::numeric_limits<double>::infinity() : 1.0;
    else if (k.c_bar + k.r == 0)
        m.rq = nan;
    else
        m.rq = (r / rb) / ((cb + r) / (c + rb));
    return m;
}

double profit_gain(const ProfitTriple& p)
{
    const double den = p.oracle - p.majority;
    if (den == 0.0)
        return std::numeric_limits<double>::quiet_NaN();
    return (p.model - p.majority) / den;
}

double profit_of(std::span<const Decision> decisions, std::span<const LabeledInstance> instances,
                 const CostModel& cm)
{
    return objective_mipcsc(decisions, instances, cm);
}

double oracle_profit(std::span<const LabeledInstance> instances, const CostModel& cm)
{
    std::vector<Decision> d;
    for (const auto& inst : instances)
        d.push_back(inst.y == 0 ? Decision::positive() : Decision::negative());
    return profit_of(d, instances, cm);
}

double majority_profit(std::span<const LabeledInstance> instances, int majority_label,
                       const CostModel& cm)
{
    if (majority_label != 0 && majority_label != 1)
        throw std::invalid_argument("majority_profit: label must be 0 or 1");
    const Decision d = majority_label == 0 ? Decision::positive() : Decision::negative();
    std::vector<Decision> ds(instances.size(), d);
    return profit_of(ds, instances, cm);
}

} // namespace smip
