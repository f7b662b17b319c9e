#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace smip {

/// Predictive mean and model uncertainty of one instance, summarised from
/// T stochastic forward passes.
struct UncertaintyEstimate {
    double mu = 0.0;
    double sigma = 0.0;
};

/// One row fed to the solvers, baselines and metrics.
///
/// Label polarity follows the mistake term of the MIPSC objective: a
/// Positive decision is correct iff y == 0 and a Negative decision is
/// correct iff y == 1. With y == 1 meaning "fraud", Positive means "let the
/// transaction through". Positive decisions therefore live at low mu.
struct LabeledInstance {
    std::size_t id = 0;
    UncertaintyEstimate est;
    int y = 0;
    std::optional<double> value;
};

/// Decision boundaries of the five regions A1..A5.
///
/// Left area:  mu < 0.5 - mu_L.  Right area: mu > 0.5 + mu_R.
/// sigma_L splits the left area into A1 (below) and A2; sigma_R splits the
/// right area into A4 (below) and A5.
struct ThresholdSolution {
    double mu_L = 0.0;
    double mu_R = 0.0;
    double sigma_L = 0.0;
    double sigma_R = 0.0;

    double left_bound() const { return 0.5 - mu_L; }
    double right_bound() const { return 0.5 + mu_R; }
    /// Left and right areas cannot overlap (mu_L + mu_R >= 0).
    bool disjoint() const { return left_bound() <= right_bound(); }

    /// Builds thresholds from raw cut positions on the mu axis.
    static ThresholdSolution from_cuts(double left_cut, double right_cut,
                                       double sigma_left, double sigma_right);

    friend bool operator==(const ThresholdSolution&, const ThresholdSolution&) = default;
};

/// Per-region value cutoffs of the cost-sensitive model. An instance in a
/// region is decided when its value is strictly below the region's cutoff
/// and rejected otherwise.
struct ValueThresholds {
    double t_DL = 0.0; // A1
    double t_UL = 0.0; // A2
    double t_M = 0.0;  // A3
    double t_DR = 0.0; // A4
    double t_UR = 0.0; // A5

    friend bool operator==(const ValueThresholds&, const ValueThresholds&) = default;
};

enum class Region { A1 = 1, A2 = 2, A3 = 3, A4 = 4, A5 = 5 };

struct RegionIndicators {
    bool L = false;
    bool R = false;
    bool D_L = false;
    bool D_R = false;
    bool Q = false;
};

enum class DecisionKind { Positive, Negative, Reject };

struct Decision {
    DecisionKind kind = DecisionKind::Reject;
    /// Index j of the firing rule for cost-sensitive decisions (1..3);
    /// 0 for rejections and for cost-insensitive decisions.
    int rule = 0;

    static Decision positive(int rule = 0) { return {DecisionKind::Positive, rule}; }
    static Decision negative(int rule = 0) { return {DecisionKind::Negative, rule}; }
    static Decision reject() { return {DecisionKind::Reject, 0}; }

    bool rejected() const { return kind == DecisionKind::Reject; }
    friend bool operator==(const Decision&, const Decision&) = default;
};

/// True when a non-rejected decision agrees with the label.
bool is_correct(DecisionKind kind, int y);

/// The decision an instance gets when it is not rejected: Negative above
/// mu = 0.5, Positive at or below it.
DecisionKind mean_cut_decision(double mu);

RegionIndicators indicators(const UncertaintyEstimate& est, const ThresholdSolution& th);

/// Maps an estimate to its region. Throws std::invalid_argument when the
/// thresholds overlap.
Region assign_region(const UncertaintyEstimate& est, const ThresholdSolution& th);

/// A1 -> Positive, A4 -> Negative, anything else -> Reject.
Decision decide_mipsc(const UncertaintyEstimate& est, const ThresholdSolution& th);

/// Region rule plus the region's value cutoff. The middle region decides by
/// the 0.5 cut on mu (strictly above is Negative).
Decision decide_mipcsc(const LabeledInstance& inst, const ThresholdSolution& th,
                       const ValueThresholds& vt);

/// What a region would have decided had it not rejected. Used to score
/// rejected instances in the counterfactual metrics.
DecisionKind region_polarity(Region region, double mu);

std::vector<Decision> decide_all_mipsc(std::span<const LabeledInstance> instances,
                                       const ThresholdSolution& th);
std::vector<Decision> decide_all_mipcsc(std::span<const LabeledInstance> instances,
                                        const ThresholdSolution& th,
                                        const ValueThresholds& vt);

std::size_t count_rejections(std::span<const Decision> decisions);

std::string to_string(Region r);
std::string to_string(DecisionKind k);
std::ostream& operator<<(std::ostream& os, const ThresholdSolution& th);
std::ostream& operator<<(std::ostream& os, const ValueThresholds& vt);

/// Writes `instance_id,region,decision,firing_rule_j` rows. `regions` may be
/// empty for methods without regions (baselines); the column is then "-".
void write_decisions_csv(std::ostream& os, std::span<const LabeledInstance> instances,
                         std::span<const Decision> decisions,
                         std::span<const Region> regions);

} // namespace smip
