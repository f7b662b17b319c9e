#include "smip/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace smip {

std::string to_string(BaselineKind k)
{
    switch (k) {
    case BaselineKind::Random:
        return "random";
    case BaselineKind::PredictiveMean:
        return "predictive_mean";
    case BaselineKind::ModelUncertainty:
        return "model_uncertainty";
    case BaselineKind::TransactionAmount:
        return "transaction_amount";
    case BaselineKind::Risk:
        break;
    }
    return "risk";
}

BaselineKind baseline_from_string(const std::string& s)
{
    for (auto k : {BaselineKind::Random, BaselineKind::PredictiveMean, BaselineKind::ModelUncertainty,
                   BaselineKind::TransactionAmount, BaselineKind::Risk})
        if (to_string(k) == s)
            return k;
    throw std::invalid_argument("unknown baseline '" + s + "'");
}

bool needs_values(BaselineKind k)
{
    return k == BaselineKind::TransactionAmount || k == BaselineKind::Risk;
}

std::vector<Decision> baseline_decide(BaselineKind kind, std::span<const LabeledInstance> instances,
                                      std::size_t rcap, std::uint64_t seed)
{
    const std::size_t m = instances.size();
    if (needs_values(kind))
        for (const auto& inst : instances)
            if (!inst.value)
                throw std::invalid_argument(to_string(kind) + " baseline: instance " +
                                            std::to_string(inst.id) + " has no value");

    // Higher score = rejected first.
    std::vector<double> score(m);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t i = 0; i < m; ++i) {
        const auto& inst = instances[i];
        switch (kind) {
        case BaselineKind::Random:
            score[i] = unit(rng);
            break;
        case BaselineKind::PredictiveMean:
            score[i] = -std::abs(inst.est.mu - 0.5);
            break;
        case BaselineKind::ModelUncertainty:
            score[i] = inst.est.sigma;
            break;
        case BaselineKind::TransactionAmount:
            score[i] = *inst.value;
            break;
        case BaselineKind::Risk:
            score[i] = inst.est.sigma * *inst.value;
            break;
        }
    }
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });

    std::vector<Decision> out;
    out.reserve(m);
    for (const auto& inst : instances)
        out.push_back(mean_cut_decision(inst.est.mu) == DecisionKind::Negative ? Decision::negative()
                                                                               : Decision::positive());
    for (std::size_t r = 0; r < std::min(rcap, m); ++r)
        out[order[r]] = Decision::reject();
    return out;
}

} // namespace smip
