#pragma once

#include "smip/matrix.hpp"
#include "smip/selective.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

namespace smip {

/// Three affine layers input -> h1 -> h2 -> 1. weights[l] is row-major with
/// shape layer_sizes[l] x layer_sizes[l + 1].
struct NetworkParams {
    std::vector<std::size_t> layer_sizes;
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;
    double dropout_rate = 0.0;

    std::size_t input_dim() const { return layer_sizes.empty() ? 0 : layer_sizes.front(); }
    std::size_t num_params() const;

    /// All weights then biases, layer by layer.
    std::vector<double> flatten() const;
    void assign(std::span<const double> flat);

    nlohmann::json to_json() const;
    static NetworkParams from_json(const nlohmann::json& j);

    friend bool operator==(const NetworkParams&, const NetworkParams&) = default;
};

struct TrainConfig {
    double dropout_rate = 0.05;
    double l2_coeff = 0.1;
    std::size_t epochs = 200;
    double learning_rate = 0.01;
    std::size_t batch_size = 32;
    std::size_t hidden_width = 50;
    std::uint64_t seed = 0;

    void validate() const;
};

struct MCConfig {
    std::size_t T = 100;
    std::uint64_t seed = 0;
};

/// Glorot-uniform weights, zero biases.
NetworkParams init_network(std::size_t input_dim, std::size_t hidden_width, std::uint64_t seed);

/// Output probability. Dropout (inverted scaling) is applied before each
/// affine layer only when `rng` is non-null.
double forward(const NetworkParams& p, std::span<const double> x, double dropout_rate,
               std::mt19937_64* rng = nullptr);

/// Mean binary cross-entropy over `rows` plus l2_scale * ||theta||^2. When
/// `grad` is non-null it receives the gradient in flatten() order. Dropout
/// masks are drawn from `rng` when non-null.
double loss_gradient(const NetworkParams& p, const Matrix& X, std::span<const int> y,
                     std::span<const std::size_t> rows, double dropout_rate, double l2_scale,
                     std::mt19937_64* rng, std::vector<double>* grad);

/// Mini-batch SGD on sum-BCE + l2_coeff * ||theta||^2, scaled by 1/N.
/// Throws std::runtime_error on a non-finite loss.
NetworkParams train(const Matrix& X, std::span<const int> y, const TrainConfig& cfg);

/// Deterministic-pass accuracy with the 0.5 cut.
double accuracy(const NetworkParams& p, const Matrix& X, std::span<const int> y);

struct GridCell {
    double dropout_rate = 0.0;
    double l2_coeff = 0.0;
    double val_accuracy = 0.0;
    bool failed = false;
};

struct GridSearchResult {
    TrainConfig best;
    NetworkParams params;
    double val_accuracy = 0.0;
    std::vector<GridCell> cells;
};

inline const std::vector<double> default_dropout_grid{0.05, 0.01, 0.02};
inline const std::vector<double> default_l2_grid{0.1, 0.25};

/// One network per (dropout, l2) cell; best validation accuracy wins, ties
/// to lower dropout then lower l2. A failing cell is skipped.
GridSearchResult grid_search(const Matrix& X_train, std::span<const int> y_train,
                             const Matrix& X_val, std::span<const int> y_val,
                             std::span<const double> dropout_grid, std::span<const double> l2_grid,
                             const TrainConfig& base);

/// T stochastic passes for one input.
std::vector<double> mc_samples(const NetworkParams& p, std::span<const double> x, double dropout_rate,
                               std::size_t T, std::mt19937_64& rng);

/// Mean and population standard deviation.
UncertaintyEstimate summarize(std::span<const double> samples);

UncertaintyEstimate mc_predict(const NetworkParams& p, std::span<const double> x, double dropout_rate,
                               const MCConfig& mc);

/// Row-by-row MC prediction sharing one generator seeded by mc.seed. When
/// `raw` is non-null it receives the T outputs of every row.
std::vector<UncertaintyEstimate> mc_predict_all(const NetworkParams& p, const Matrix& X,
                                                double dropout_rate, const MCConfig& mc,
                                                std::vector<std::vector<double>>* raw = nullptr);

/// instance_id,pass_index,output
void write_mc_samples_csv(std::ostream& os, std::span<const std::size_t> ids,
                          const std::vector<std::vector<double>>& raw);

} // namespace smip
