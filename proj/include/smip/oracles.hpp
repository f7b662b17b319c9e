#pragma once

#include "smip/mipcsc_solver.hpp"

#include <cstdint>
#include <optional>

namespace smip {

struct OracleResult {
    double objective = 0.0;
    ThresholdSolution thresholds;
    std::optional<ValueThresholds> value_thresholds;
    std::size_t rejections = 0;
    /// Number of candidate tuples visited, including skipped ones.
    std::size_t exhaustive_count = 0;
};

constexpr std::size_t mipsc_oracle_max_m = 20;
constexpr std::size_t mipcsc_oracle_max_m = 6;

/// Every (mu cut, mu cut, sigma cut, sigma cut) tuple, evaluated through
/// decide_mipsc. Throws std::invalid_argument for m > 20 unless `force`.
OracleResult brute_force_mipsc(std::span<const LabeledInstance> instances, const SolverConfig& cfg,
                               bool force = false);

/// Every 9-tuple of mu, sigma and value cuts, evaluated through
/// decide_mipcsc. Throws std::invalid_argument for m > 6 unless `force`.
OracleResult brute_force_mipcsc(std::span<const LabeledInstance> instances, const SolverConfig& cfg,
                                const CostModel& cm, bool force = false);

/// Small random instance with deliberate ties in mu, sigma and value.
/// Values are attached when `with_values`.
std::vector<LabeledInstance> random_instances(std::uint64_t seed, std::size_t m, bool with_values);

} // namespace smip
