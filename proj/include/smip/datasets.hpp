#pragma once

#include "smip/matrix.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace smip {

struct Dataset {
    std::string name;
    Matrix X;
    std::vector<int> y;
    std::optional<std::vector<double>> values;
    std::vector<std::string> feature_names;
    bool label_flip = false;

    std::size_t size() const { return y.size(); }
};

enum class ColumnType { Numeric, Categorical, Ignore };

/// Declares how each CSV column is read. Columns not listed are numeric.
/// Categorical columns are one-hot encoded over their sorted distinct values.
struct Schema {
    std::string label_column;
    /// Label token mapped to y = 1. Without it labels must be 0 or 1.
    std::optional<std::string> positive_label;
    std::optional<std::string> value_column;
    std::vector<std::pair<std::string, ColumnType>> columns;
    /// Rows holding one of these tokens are dropped.
    std::vector<std::string> missing{"?"};

    ColumnType type_of(const std::string& column) const;

    nlohmann::json to_json() const;
    static Schema from_json(const nlohmann::json& j);
};

/// Headered CSV per schema. Errors name the offending row and column.
Dataset load_csv(const std::filesystem::path& path, const Schema& schema, bool label_flip = false);

/// All non-label, non-value columns numeric.
Dataset load_csv(const std::filesystem::path& path, const std::string& label_column,
                 const std::optional<std::string>& value_column, bool label_flip = false);

/// Loads `<stem>.csv` using `<stem>.schema.json` next to it.
Dataset load_with_schema(const std::filesystem::path& csv_path, bool label_flip = false);

struct FourWaySplit {
    std::vector<std::size_t> dnn_train, dnn_val, mip_train, test;

    const std::vector<std::size_t>& part(std::size_t k) const;
};

/// Stratified shuffle split. Per class, part sizes follow the largest
/// remainder rule on ratio * class count (ties to the earlier part).
/// Indices within each part are ascending.
FourWaySplit split4(const Dataset& ds, const std::array<double, 4>& ratios, std::uint64_t seed);

/// Per-feature mean and standard deviation from a set of rows.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> sd;

    static Standardizer fit(const Matrix& X, std::span<const std::size_t> rows);
    Matrix apply(const Matrix& X, std::span<const std::size_t> rows) const;
};

struct SynthConfig {
    std::size_t n = 10000;
    double fraud_ratio = 0.081;
    double avg_amount = 79.29;
    std::uint64_t seed = 0;
    /// Mahalanobis distance between the class means of the 12 features.
    double separation = 2.0;
    /// Log-scale spread of the amounts.
    double amount_sigma = 1.0;
    std::string name = "synthetic";

    void validate() const;
};

constexpr std::size_t synth_feature_count = 12;

/// Labels ~ Bernoulli(fraud_ratio) (y = 1 is fraud); features are unit
/// Gaussians whose mean shifts by `separation` for fraud; amounts are
/// log-normal with mean avg_amount, independent of the label.
Dataset synth_transactions(const SynthConfig& cfg);

/// Writes `<stem>.csv` and `<stem>.schema.json`.
void write_dataset(const Dataset& ds, const std::filesystem::path& csv_path);

} // namespace smip
