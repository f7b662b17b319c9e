#pragma once

#include "smip/selective.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace smip {

struct SolverConfig {
    /// Maximum number of rejected instances.
    std::size_t rcap = 0;
    /// Accuracy of the underlying network without rejection.
    double rho = 1.0;
    /// Cap on candidate cuts per threshold dimension. Empty means exact.
    std::optional<std::size_t> coarsen_to;

    /// Throws std::invalid_argument unless rcap <= m, rho in [0, 1] and
    /// coarsen_to (when set) is at least 2.
    void validate(std::size_t m) const;
};

struct MipscSolution {
    ThresholdSolution thresholds;
    std::vector<Decision> decisions;
    double objective = 0.0;
    std::size_t mistakes = 0;
    std::size_t rejections = 0;
};

/// Big-M constants for the literal MIP export.
struct LpExportConfig {
    double big_M = 1e4;
    double epsilon = 1e-6;
};

/// Sorted distinct values v1 < ... < vk give the cuts
/// {v1 - 1, (vj + vj+1) / 2 ..., vk + 1}. With `coarsen_to` set and more
/// cuts than that, an evenly spaced subset keeping both sentinels.
std::vector<double> candidate_cuts(std::span<const double> values,
                                   std::optional<std::size_t> coarsen_to = std::nullopt);

/// mistakes + (1 - rho) / m * rejections.
double objective_mipsc(std::size_t mistakes, std::size_t rejections, double rho, std::size_t m);

/// Counts mistakes (Positive with y = 1, Negative with y = 0) and rejections
/// and evaluates the objective with m = decisions.size().
double objective_mipsc(std::span<const Decision> decisions, std::span<const int> labels,
                       double rho);

enum class Side { Left, Right };

/// One achievable accepted-count on a side of the middle band.
struct FrontierPoint {
    std::size_t accepted = 0;
    std::size_t mistakes = 0;
    /// Smallest sigma cut that accepts exactly `accepted` instances.
    double sigma_cut = 0.0;
};

/// Accepted count -> minimum mistakes for one side of the band. Entry `a`
/// is empty when no sigma cut accepts exactly `a` instances.
struct SideFrontier {
    std::vector<std::optional<FrontierPoint>> by_accepted;

    std::size_t region_size() const { return by_accepted.empty() ? 0 : by_accepted.size() - 1; }
    std::vector<FrontierPoint> points() const;
};

/// Frontier of the instances strictly left of (or right of) `boundary` on
/// the mu axis. Accepted instances are those with sigma below the cut; on
/// the left they are decided Positive, on the right Negative. When
/// `sigma_cuts` is empty the cuts come from the region's own sigma values.
SideFrontier side_frontier(std::span<const LabeledInstance> instances, Side side,
                           double boundary, std::span<const double> sigma_cuts = {});

/// Exact minimiser of the MIPSC objective over all real thresholds (or over
/// the coarsened candidate grid when cfg.coarsen_to is set).
///
/// Ties are broken by fewer rejections, then lexicographically smaller
/// (mu_L, mu_R, sigma_L, sigma_R).
MipscSolution solve_mipsc(std::span<const LabeledInstance> instances, const SolverConfig& cfg);

/// The Big-M formulation in CPLEX LP format, one block of constraints per
/// instance. Throws std::invalid_argument when big_M does not dominate the
/// data range or epsilon is not below the smallest gap between distinct mu
/// or sigma values.
std::string export_mipsc_lp(std::span<const LabeledInstance> instances, const SolverConfig& cfg,
                            const LpExportConfig& lp);

namespace detail {

/// Shared by both LP writers.
void validate_lp_config(const LpExportConfig& lp, std::span<const std::vector<double>> columns);
std::string lp_number(double v);

} // namespace detail

} // namespace smip
