#pragma once

#include "smip/baselines.hpp"
#include "smip/datasets.hpp"
#include "smip/metrics.hpp"
#include "smip/mipcsc_solver.hpp"
#include "smip/uncertainty.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <filesystem>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace smip {

struct DatasetRef {
    std::string name;
    /// CSV with a sibling schema file, resolved relative to the config file.
    std::optional<std::filesystem::path> path;
    /// Generated instead of loaded when set.
    std::optional<SynthConfig> synth;
    bool label_flip = false;
};

struct ExperimentConfig {
    std::string name = "experiment";
    std::vector<DatasetRef> datasets;
    std::array<double, 4> split_ratios{0.4, 0.2, 0.2, 0.2};
    std::vector<double> dropout_grid = default_dropout_grid;
    std::vector<double> l2_grid = default_l2_grid;
    TrainConfig train;
    std::size_t T = 100;
    std::vector<double> rcap_fractions{0.1, 0.15, 0.2, 0.25};
    std::size_t repeats = 32;
    std::uint64_t seed = 1;
    /// Worker threads over (dataset, repeat) pairs; output does not depend on it.
    std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
    /// "mipsc", "mipcsc" or a baseline name.
    std::vector<std::string> methods{"mipsc", "random", "predictive_mean", "model_uncertainty"};
    CostModel cost_model;
    std::optional<std::size_t> coarsen_to = 64;
    std::filesystem::path output_dir = "results";

    void validate() const;
    nlohmann::json to_json() const;
    /// Relative dataset paths are resolved against `base_dir`.
    static ExperimentConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
    static ExperimentConfig load(const std::filesystem::path& path);
};

/// One (dataset, repeat, rCap fraction, method) evaluation on the test split.
struct ResultRow {
    std::string dataset;
    std::string method;
    double rcap_fraction = 0.0;
    std::size_t rcap_train = 0;
    std::size_t rcap_test = 0;
    std::size_t repeat = 0;
    std::size_t rejections = 0;
    /// Threshold rejections on test beyond rcap_test, decided by region
    /// polarity instead.
    std::size_t released = 0;
    ConfusionCounts counts;
    RejectMetrics metrics;
    double profit = std::numeric_limits<double>::quiet_NaN();
    double profit_gain = std::numeric_limits<double>::quiet_NaN();
};

struct Failure {
    std::string dataset;
    std::size_t repeat = 0;
    std::string message;
};

struct ExperimentResult {
    std::vector<ResultRow> rows;
    std::vector<Failure> failures;
    /// Capacity or partition violations seen on solver and baseline outputs.
    std::size_t invariant_violations = 0;
    std::vector<std::string> violation_messages;
};

/// Runs the full protocol and writes rows.csv, aggregates.csv,
/// aggregates.json and failures.csv into cfg.output_dir.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Fraction -> count conversion used for both splits.
std::size_t rcap_count(double fraction, std::size_t split_size);

/// Decisions after applying learned thresholds to a split whose capacity is
/// `rcap`: when they reject more, the surplus is released (lowest `priority`
/// first, ties by position) and decided by region polarity. Returns the
/// number released.
std::size_t enforce_capacity(std::vector<Decision>& decisions, std::span<const LabeledInstance> instances,
                             const ThresholdSolution& th, std::span<const double> priority, std::size_t rcap);

struct AggregateRow {
    std::string dataset;
    std::string method;
    double rcap_fraction = 0.0;
    std::size_t n = 0;
    // mean, sample sd for nra, cq, rq, profit_gain
    std::array<double, 4> mean{};
    std::array<double, 4> sd{};
};

inline const std::array<const char*, 4> metric_names{"nra", "cq", "rq", "profit_gain"};

/// Ordered as (dataset, method, fraction) first appearance. NaN values are
/// left out of each metric's mean and sd.
std::vector<AggregateRow> aggregate(const std::vector<ResultRow>& rows);

std::string rows_csv(const std::vector<ResultRow>& rows);
std::string aggregates_csv(const std::vector<AggregateRow>& agg);

/// Reads aggregates.csv from `results_dir` and writes one plot-ready CSV per
/// (dataset, metric) into results_dir/report. Returns the files written.
std::vector<std::filesystem::path> report(const std::filesystem::path& results_dir);

using MipscObjective = std::function<double(std::span<const LabeledInstance>, const SolverConfig&)>;
using MipcscObjective =
    std::function<double(std::span<const LabeledInstance>, const SolverConfig&, const CostModel&)>;

struct VerifyReport {
    bool passed = true;
    std::size_t trials = 0;
    std::size_t agreements = 0;
    double seconds = 0.0;
    std::string counterexample;
};

/// Random instances with m uniform in [min_m, max_m], random rCap and rho;
/// compares `solver` with brute_force_mipsc. Stops at the first mismatch.
VerifyReport verify_mipsc(std::size_t trials, std::size_t min_m, std::size_t max_m, std::uint64_t seed,
                          const MipscObjective& solver = {});
VerifyReport verify_mipcsc(std::size_t trials, std::size_t min_m, std::size_t max_m, std::uint64_t seed,
                           const CostModel& cm = {}, const MipcscObjective& solver = {});

/// instance_id,mu,sigma,y,value
std::string instances_csv(std::span<const LabeledInstance> instances);
std::vector<LabeledInstance> load_instances(const std::filesystem::path& path);

nlohmann::json to_json(const ThresholdSolution& th);
nlohmann::json to_json(const ValueThresholds& vt);

} // namespace smip
