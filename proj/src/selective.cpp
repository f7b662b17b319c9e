#include "smip/selective.hpp"

#include <stdexcept>

namespace smip {

ThresholdSolution ThresholdSolution::from_cuts(double left_cut, double right_cut,
                                               double sigma_left, double sigma_right)
{
    return ThresholdSolution{0.5 - left_cut, right_cut - 0.5, sigma_left, sigma_right};
}

bool is_correct(DecisionKind kind, int y)
{
    switch (kind) {
    case DecisionKind::Positive:
        return y == 0;
    case DecisionKind::Negative:
        return y == 1;
    case DecisionKind::Reject:
        break;
    }
    return false;
}

DecisionKind mean_cut_decision(double mu)
{
    return mu > 0.5 ? DecisionKind::Negative : DecisionKind::Positive;
}

RegionIndicators indicators(const UncertaintyEstimate& est, const ThresholdSolution& th)
{
    RegionIndicators ind;
    ind.L = est.mu < th.left_bound();
    ind.R = est.mu > th.right_bound();
    ind.D_L = est.sigma < th.sigma_L;
    ind.D_R = est.sigma < th.sigma_R;
    ind.Q = est.mu > 0.5;
    return ind;
}

Region assign_region(const UncertaintyEstimate& est, const ThresholdSolution& th)
{
    if (!th.disjoint())
        throw std::invalid_argument("thresholds overlap: mu_L + mu_R must be >= 0");
    const auto ind = indicators(est, th);
    if (ind.L)
        return ind.D_L ? Region::A1 : Region::A2;
    if (ind.R)
        return ind.D_R ? Region::A4 : Region::A5;
    return Region::A3;
}

Decision decide_mipsc(const UncertaintyEstimate& est, const ThresholdSolution& th)
{
    switch (assign_region(est, th)) {
    case Region::A1:
        return Decision::positive();
    case Region::A4:
        return Decision::negative();
    default:
        return Decision::reject();
    }
}

Decision decide_mipcsc(const LabeledInstance& inst, const ThresholdSolution& th,
                       const ValueThresholds& vt)
{
    if (!inst.value)
        throw std::invalid_argument("instance " + std::to_string(inst.id) + " has no value");
    const double t = *inst.value;
    switch (assign_region(inst.est, th)) {
    case Region::A1:
        return t < vt.t_DL ? Decision::positive(1) : Decision::reject();
    case Region::A2:
        return t < vt.t_UL ? Decision::positive(2) : Decision::reject();
    case Region::A4:
        return t < vt.t_DR ? Decision::negative(1) : Decision::reject();
    case Region::A5:
        return t < vt.t_UR ? Decision::negative(2) : Decision::reject();
    case Region::A3:
        if (!(t < vt.t_M))
            return Decision::reject();
        return inst.est.mu > 0.5 ? Decision::negative(3) : Decision::positive(3);
    }
    return Decision::reject();
}

DecisionKind region_polarity(Region region, double mu)
{
    switch (region) {
    case Region::A1:
    case Region::A2:
        return DecisionKind::Positive;
    case Region::A4:
    case Region::A5:
        return DecisionKind::Negative;
    case Region::A3:
        break;
    }
    return mean_cut_decision(mu);
}

std::vector<Decision> decide_all_mipsc(std::span<const LabeledInstance> instances,
                                       const ThresholdSolution& th)
{
    std::vector<Decision> out;
    out.reserve(instances.size());
    for (const auto& inst : instances)
        out.push_back(decide_mipsc(inst.est, th));
    return out;
}

std::vector<Decision> decide_all_mipcsc(std::span<const LabeledInstance> instances,
                                        const ThresholdSolution& th,
                                        const ValueThresholds& vt)
{
    std::vector<Decision> out;
    out.reserve(instances.size());
    for (const auto& inst : instances)
        out.push_back(decide_mipcsc(inst, th, vt));
    return out;
}

std::size_t count_rejections(std::span<const Decision> decisions)
{
    std::size_t n = 0;
    for (const auto& d : decisions)
        n += d.rejected() ? 1 : 0;
    return n;
}

std::string to_string(Region r)
{
    return "A" + std::to_string(static_cast<int>(r));
}

std::string to_string(DecisionKind k)
{
    switch (k) {
    case DecisionKind::Positive:
        return "positive";
    case DecisionKind::Negative:
        return "negative";
    case DecisionKind::Reject:
        break;
    }
    return "reject";
}

std::ostream& operator<<(std::ostream& os, const ThresholdSolution& th)
{
    return os << "{mu_L=" << th.mu_L << ", mu_R=" << th.mu_R << ", sigma_L=" << th.sigma_L
              << ", sigma_R=" << th.sigma_R << "}";
}

std::ostream& operator<<(std::ostream& os, const ValueThresholds& vt)
{
    return os << "{t_DL=" << vt.t_DL << ", t_UL=" << vt.t_UL << ", t_M=" << vt.t_M
              << ", t_DR=" << vt.t_DR << ", t_UR=" << vt.t_UR << "}";
}

void write_decisions_csv(std::ostream& os, std::span<const LabeledInstance> instances,
                         std::span<const Decision> decisions,
                         std::span<const Region> regions)
{
    if (instances.size() != decisions.size())
        throw std::invalid_argument("write_decisions_csv: instances and decisions differ in length");
    if (!regions.empty() && regions.size() != decisions.size())
        throw std::invalid_argument("write_decisions_csv: regions and decisions differ in length");
    os << "instance_id,region,decision,firing_rule_j\n";
    for (std::size_t i = 0; i < decisions.size(); ++i) {
        os << instances[i].id << ',' << (regions.empty() ? std::string("-") : to_string(regions[i]))
           << ',' << to_string(decisions[i].kind) << ',' << decisions[i].rule << '\n';
    }
}

} // namespace smip
