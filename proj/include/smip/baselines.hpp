#pragma once

#include "smip/selective.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace smip {

enum class BaselineKind { Random, PredictiveMean, ModelUncertainty, TransactionAmount, Risk };

std::string to_string(BaselineKind k);
/// Accepts the names produced by to_string. Throws std::invalid_argument.
BaselineKind baseline_from_string(const std::string& s);
bool needs_values(BaselineKind k);

/// Rejects exactly min(rcap, m) instances ranked by the baseline's score
/// (ties by position ascending); the rest follow the 0.5 cut on mu.
///
/// Random:            uniform key from `seed`
/// PredictiveMean:    |mu - 0.5| ascending
/// ModelUncertainty:  sigma descending
/// TransactionAmount: value descending
/// Risk:              sigma * value descending
std::vector<Decision> baseline_decide(BaselineKind kind, std::span<const LabeledInstance> instances,
                                      std::size_t rcap, std::uint64_t seed = 0);

} // namespace smip
