#pragma once

#include "smip/cost_model.hpp"
#include "smip/mipsc_solver.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace smip {

struct MipcscSolution {
    ThresholdSolution thresholds;
    ValueThresholds value_thresholds;
    std::vector<Decision> decisions;
    double objective = 0.0;
    std::size_t rejections = 0;
};

/// Polarity of a region: Positive (A1, A2), Negative (A4, A5), or the
/// middle band where each instance follows the 0.5 cut on mu.
enum class RegionRule { Positive, Negative, Middle };

struct RegionFrontierEntry {
    double value = 0.0;
    /// Value cut: instances with t below it are decided, the rest rejected.
    double t_cut = 0.0;
};

/// Rejection count k -> best contribution with exactly k rejections.
/// Entries are empty where no value cut rejects exactly k instances.
struct RegionFrontier {
    std::vector<std::optional<RegionFrontierEntry>> by_rejections;
};

double objective_mipcsc(std::span<const Decision> decisions,
                        std::span<const LabeledInstance> instances, const CostModel& cm);
Money objective_mipcsc_money(std::span<const Decision> decisions,
                             std::span<const LabeledInstance> instances, const CostModel& cm);

/// Frontier over the value cuts of the region's own t values.
RegionFrontier region_value_frontier(std::span<const LabeledInstance> region, RegionRule rule,
                                     const CostModel& cm);

/// Exact maximiser over the candidate grid (exact over all real thresholds
/// when cfg.coarsen_to is unset). Among equal objectives fewer rejections
/// win; remaining ties go to the first configuration in enumeration order
/// (ascending cut indices).
///
/// Throws std::invalid_argument if an instance has no value or if the exact
/// grid would exceed the memory guard; set cfg.coarsen_to in that case.
MipcscSolution solve_mipcsc(std::span<const LabeledInstance> instances, const SolverConfig& cfg,
                            const CostModel& cm);

/// The Big-M cost-sensitive formulation in CPLEX LP format.
std::string export_mipcsc_lp(std::span<const LabeledInstance> instances, const SolverConfig& cfg,
                             const CostModel& cm, const LpExportConfig& lp);

} // namespace smip
