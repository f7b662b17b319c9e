#include "smip/uncertainty.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace smip {

namespace {

constexpr std::size_t n_layers = 3;

double sigmoid(double z)
{
    if (z >= 0.0)
        return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// -log p(y | logit z), computed without forming p.
double bce_from_logit(double z, int y)
{
    return std::max(z, 0.0) - z * static_cast<double>(y) + std::log1p(std::exp(-std::abs(z)));
}

void check_shapes(const NetworkParams& p)
{
    if (p.layer_sizes.size() != n_layers + 1 || p.weights.size() != n_layers || p.biases.size() != n_layers)
        throw std::invalid_argument("NetworkParams: expected three affine layers");
    if (p.layer_sizes.back() != 1)
        throw std::invalid_argument("NetworkParams: output layer must have width 1");
    for (std::size_t l = 0; l < n_layers; ++l) {
        if (p.weights[l].size() != p.layer_sizes[l] * p.layer_sizes[l + 1] ||
            p.biases[l].size() != p.layer_sizes[l + 1])
            throw std::invalid_argument("NetworkParams: inconsistent shapes in layer " + std::to_string(l));
    }
}

void draw_mask(std::vector<double>& mask, std::size_t n, double rate, std::mt19937_64& rng)
{
    std::bernoulli_distribution keep(1.0 - rate);
    const double scale = 1.0 / (1.0 - rate);
    mask.resize(n);
    for (auto& v : mask)
        v = keep(rng) ? scale : 0.0;
}

// Activations of one pass, kept for backpropagation.
struct Pass {
    std::array<std::vector<double>, n_layers> in;   // layer inputs after dropout
    std::array<std::vector<double>, n_layers> mask; // empty without dropout
    std::array<std::vector<double>, n_layers> pre;  // pre-activations
};

double run(const NetworkParams& p, std::span<const double> x, double rate, std::mt19937_64* rng,
           Pass& s)
{
    if (x.size() != p.input_dim())
        throw std::invalid_argument("forward: input has " + std::to_string(x.size()) + " features, expected " +
                                    std::to_string(p.input_dim()));
    std::vector<double> cur(x.begin(), x.end());
    for (std::size_t l = 0; l < n_layers; ++l) {
        const std::size_t nin = p.layer_sizes[l];
        const std::size_t nout = p.layer_sizes[l + 1];
        if (rng) {
            draw_mask(s.mask[l], nin, rate, *rng);
            for (std::size_t i = 0; i < nin; ++i)
                cur[i] *= s.mask[l][i];
        } else {
            s.mask[l].clear();
        }
        s.in[l] = cur;
        auto& z = s.pre[l];
        z.assign(p.biases[l].begin(), p.biases[l].end());
        const double* w = p.weights[l].data();
        for (std::size_t i = 0; i < nin; ++i) {
            const double a = cur[i];
            if (a == 0.0)
                continue;
            const double* wr = w + i * nout;
            for (std::size_t o = 0; o < nout; ++o)
                z[o] += a * wr[o];
        }
        cur.resize(nout);
        for (std::size_t o = 0; o < nout; ++o)
            cur[o] = l + 1 < n_layers ? std::max(z[o], 0.0) : z[o];
    }
    return s.pre[n_layers - 1][0];
}

struct Grad {
    std::vector<std::vector<double>> w, b;

    explicit Grad(const NetworkParams& p)
    {
        for (std::size_t l = 0; l < n_layers; ++l) {
            w.emplace_back(p.weights[l].size(), 0.0);
            b.emplace_back(p.biases[l].size(), 0.0);
        }
    }
};

double accumulate(const NetworkParams& p, const Matrix& X, std::span<const int> y,
                  std::span<const std::size_t> rows, double rate, double l2_scale, std::mt19937_64* rng,
                  Grad* g)
{
    if (rows.empty())
        throw std::invalid_argument("loss_gradient: no rows");
    const double inv = 1.0 / static_cast<double>(rows.size());
    Pass s;
    double loss = 0.0;
    std::vector<double> dz, dprev;
    for (std::size_t r : rows) {
        const double logit = run(p, X.row(r), rate, rng, s);
        loss += bce_from_logit(logit, y[r]);
        if (!g)
            continue;
        dz.assign(1, (sigmoid(logit) - static_cast<double>(y[r])) * inv);
        for (std::size_t l = n_layers; l-- > 0;) {
            const std::size_t nin = p.layer_sizes[l];
            const std::size_t nout = p.layer_sizes[l + 1];
            const auto& a = s.in[l];
            double* gw = g->w[l].data();
            for (std::size_t i = 0; i < nin; ++i) {
                if (a[i] == 0.0)
                    continue;
                double* gr = gw + i * nout;
                for (std::size_t o = 0; o < nout; ++o)
                    gr[o] += a[i] * dz[o];
            }
            for (std::size_t o = 0; o < nout; ++o)
                g->b[l][o] += dz[o];
            if (l == 0)
                break;
            dprev.assign(nin, 0.0);
            const double* w = p.weights[l].data();
            for (std::size_t i = 0; i < nin; ++i) {
                const double* wr = w + i * nout;
                double acc = 0.0;
                for (std::size_t o = 0; o < nout; ++o)
                    acc += wr[o] * dz[o];
                if (!s.mask[l].empty())
                    acc *= s.mask[l][i];
                dprev[i] = s.pre[l - 1][i] > 0.0 ? acc : 0.0;
            }
            dz.swap(dprev);
        }
    }
    loss *= inv;
    double sq = 0.0;
    for (std::size_t l = 0; l < n_layers; ++l) {
        for (double v : p.weights[l])
            sq += v * v;
        for (double v : p.biases[l])
            sq += v * v;
    }
    loss += l2_scale * sq;
    if (g) {
        for (std::size_t l = 0; l < n_layers; ++l) {
            for (std::size_t k = 0; k < p.weights[l].size(); ++k)
                g->w[l][k] += 2.0 * l2_scale * p.weights[l][k];
            for (std::size_t k = 0; k < p.biases[l].size(); ++k)
                g->b[l][k] += 2.0 * l2_scale * p.biases[l][k];
        }
    }
    return loss;
}

} // namespace

std::size_t NetworkParams::num_params() const
{
    std::size_t n = 0;
    for (const auto& w : weights)
        n += w.size();
    for (const auto& b : biases)
        n += b.size();
    return n;
}

std::vector<double> NetworkParams::flatten() const
{
    std::vector<double> out;
    out.reserve(num_params());
    for (const auto& w : weights)
        out.insert(out.end(), w.begin(), w.end());
    for (const auto& b : biases)
        out.insert(out.end(), b.begin(), b.end());
    return out;
}

void NetworkParams::assign(std::span<const double> flat)
{
    if (flat.size() != num_params())
        throw std::invalid_argument("NetworkParams::assign: wrong parameter count");
    std::size_t k = 0;
    for (auto& w : weights)
        for (auto& v : w)
            v = flat[k++];
    for (auto& b : biases)
        for (auto& v : b)
            v = flat[k++];
}

nlohmann::json NetworkParams::to_json() const
{
    return nlohmann::json{{"layer_sizes", layer_sizes},
                          {"weights", weights},
                          {"biases", biases},
                          {"dropout_rate", dropout_rate}};
}

NetworkParams NetworkParams::from_json(const nlohmann::json& j)
{
    NetworkParams p;
    j.at("layer_sizes").get_to(p.layer_sizes);
    j.at("weights").get_to(p.weights);
    j.at("biases").get_to(p.biases);
    j.at("dropout_rate").get_to(p.dropout_rate);
    check_shapes(p);
    return p;
}

void TrainConfig::validate() const
{
    if (!(dropout_rate >= 0.0 && dropout_rate < 1.0))
        throw std::invalid_argument("TrainConfig: dropout_rate must lie in [0, 1)");
    if (!(l2_coeff >= 0.0))
        throw std::invalid_argument("TrainConfig: l2_coeff must be nonnegative");
    if (!(learning_rate > 0.0))
        throw std::invalid_argument("TrainConfig: learning_rate must be positive");
    if (batch_size == 0 || hidden_width == 0)
        throw std::invalid_argument("TrainConfig: batch_size and hidden_width must be positive");
}

NetworkParams init_network(std::size_t input_dim, std::size_t hidden_width, std::uint64_t seed)
{
    if (input_dim == 0 || hidden_width == 0)
        throw std::invalid_argument("init_network: dimensions must be positive");
    NetworkParams p;
    p.layer_sizes = {input_dim, hidden_width, hidden_width, 1};
    std::mt19937_64 rng(seed);
    for (std::size_t l = 0; l < n_layers; ++l) {
        const std::size_t nin = p.layer_sizes[l];
        const std::size_t nout = p.layer_sizes[l + 1];
        const double limit = std::sqrt(6.0 / static_cast<double>(nin + nout));
        std::uniform_real_distribution<double> u(-limit, limit);
        std::vector<double> w(nin * nout);
        for (auto& v : w)
            v = u(rng);
        p.weights.push_back(std::move(w));
        p.biases.emplace_back(nout, 0.0);
    }
    return p;
}

double forward(const NetworkParams& p, std::span<const double> x, double dropout_rate,
               std::mt19937_64* rng)
{
    check_shapes(p);
    if (!(dropout_rate >= 0.0 && dropout_rate < 1.0))
        throw std::invalid_argument("forward: dropout_rate must lie in [0, 1)");
    Pass s;
    return sigmoid(run(p, x, dropout_rate, rng, s));
}

double loss_gradient(const NetworkParams& p, const Matrix& X, std::span<const int> y,
                     std::span<const std::size_t> rows, double dropout_rate, double l2_scale,
                     std::mt19937_64* rng, std::vector<double>* grad)
{
    check_shapes(p);
    if (X.rows != y.size())
        throw std::invalid_argument("loss_gradient: features and labels differ in length");
    if (!grad)
        return accumulate(p, X, y, rows, dropout_rate, l2_scale, rng, nullptr);
    Grad g(p);
    const double loss = accumulate(p, X, y, rows, dropout_rate, l2_scale, rng, &g);
    grad->clear();
    for (const auto& w : g.w)
        grad->insert(grad->end(), w.begin(), w.end());
    for (const auto& b : g.b)
        grad->insert(grad->end(), b.begin(), b.end());
    return loss;
}

NetworkParams train(const Matrix& X, std::span<const int> y, const TrainConfig& cfg)
{
    cfg.validate();
    if (X.rows != y.size())
        throw std::invalid_argument("train: features and labels differ in length");
    bool seen0 = false, seen1 = false;
    for (int v : y) {
        if (v != 0 && v != 1)
            throw std::invalid_argument("train: labels must be 0 or 1");
        (v == 0 ? seen0 : seen1) = true;
    }
    if (!seen0 || !seen1)
        throw std::invalid_argument("train: both classes must be present");

    NetworkParams p = init_network(X.cols, cfg.hidden_width, cfg.seed);
    p.dropout_rate = cfg.dropout_rate;
    std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    const double l2_scale = cfg.l2_coeff / static_cast<double>(X.rows);

    std::vector<std::size_t> order(X.rows);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t len = std::min(cfg.batch_size, order.size() - start);
            std::span<const std::size_t> batch(order.data() + start, len);
            Grad g(p);
            const double loss = accumulate(p, X, y, batch, cfg.dropout_rate, l2_scale, &rng, &g);
            if (!std::isfinite(loss))
                throw std::runtime_error("train: non-finite loss at epoch " + std::to_string(epoch) +
                                         " (learning rate " + std::to_string(cfg.learning_rate) +
                                         " too large?)");
            for (std::size_t l = 0; l < n_layers; ++l) {
                for (std::size_t k = 0; k < p.weights[l].size(); ++k)
                    p.weights[l][k] -= cfg.learning_rate * g.w[l][k];
                for (std::size_t k = 0; k < p.biases[l].size(); ++k)
                    p.biases[l][k] -= cfg.learning_rate * g.b[l][k];
            }
        }
    }
    return p;
}

double accuracy(const NetworkParams& p, const Matrix& X, std::span<const int> y)
{
    if (X.rows != y.size() || X.rows == 0)
        throw std::invalid_argument("accuracy: empty or misaligned input");
    std::size_t hits = 0;
    for (std::size_t r = 0; r < X.rows; ++r) {
        const int pred = forward(p, X.row(r), 0.0) > 0.5 ? 1 : 0;
        hits += pred == y[r] ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(X.rows);
}

GridSearchResult grid_search(const Matrix& X_train, std::span<const int> y_train,
                             const Matrix& X_val, std::span<const int> y_val,
                             std::span<const double> dropout_grid, std::span<const double> l2_grid,
                             const TrainConfig& base)
{
    if (dropout_grid.empty() || l2_grid.empty())
        throw std::invalid_argument("grid_search: empty grid");
    GridSearchResult res;
    bool found = false;
    for (double d : dropout_grid) {
        for (double l2 : l2_grid) {
            TrainConfig cfg = base;
            cfg.dropout_rate = d;
            cfg.l2_coeff = l2;
            GridCell cell{d, l2, 0.0, false};
            try {
                auto params = train(X_train, y_train, cfg);
                cell.val_accuracy = accuracy(params, X_val, y_val);
                const bool better =
                    !found || cell.val_accuracy > res.val_accuracy ||
                    (cell.val_accuracy == res.val_accuracy &&
                     (d < res.best.dropout_rate || (d == res.best.dropout_rate && l2 < res.best.l2_coeff)));
                if (better) {
                    found = true;
                    res.best = cfg;
                    res.params = std::move(params);
                    res.val_accuracy = cell.val_accuracy;
                }
            } catch (const std::runtime_error&) {
                cell.failed = true;
            }
            res.cells.push_back(cell);
        }
    }
    if (!found)
        throw std::runtime_error("grid_search: every cell failed to train");
    return res;
}

std::vector<double> mc_samples(const NetworkParams& p, std::span<const double> x, double dropout_rate,
                               std::size_t T, std::mt19937_64& rng)
{
    if (T == 0)
        throw std::invalid_argument("mc_samples: T must be positive");
    std::vector<double> out;
    out.reserve(T);
    for (std::size_t t = 0; t < T; ++t)
        out.push_back(forward(p, x, dropout_rate, &rng));
    return out;
}

UncertaintyEstimate summarize(std::span<const double> samples)
{
    if (samples.empty())
        throw std::invalid_argument("summarize: no samples");
    // Shifted by the first sample so that identical samples give exactly
    // that value and zero spread.
    const double ref = samples.front();
    const double n = static_cast<double>(samples.size());
    double sum = 0.0;
    for (double s : samples)
        sum += s - ref;
    const double mean_shift = sum / n;
    double sq = 0.0;
    for (double s : samples) {
        const double d = s - ref - mean_shift;
        sq += d * d;
    }
    return UncertaintyEstimate{ref + mean_shift, std::sqrt(sq / n)};
}

UncertaintyEstimate mc_predict(const NetworkParams& p, std::span<const double> x, double dropout_rate,
                               const MCConfig& mc)
{
    std::mt19937_64 rng(mc.seed);
    return summarize(mc_samples(p, x, dropout_rate, mc.T, rng));
}

std::vector<UncertaintyEstimate> mc_predict_all(const NetworkParams& p, const Matrix& X,
                                                double dropout_rate, const MCConfig& mc,
                                                std::vector<std::vector<double>>* raw)
{
    std::mt19937_64 rng(mc.seed);
    std::vector<UncertaintyEstimate> out;
    out.reserve(X.rows);
    if (raw)
        raw->clear();
    for (std::size_t r = 0; r < X.rows; ++r) {
        auto s = mc_samples(p, X.row(r), dropout_rate, mc.T, rng);
        out.push_back(summarize(s));
        if (raw)
            raw->push_back(std::move(s));
    }
    return out;
}

void write_mc_samples_csv(std::ostream& os, std::span<const std::size_t> ids,
                          const std::vector<std::vector<double>>& raw)
{
    if (ids.size() != raw.size())
        throw std::invalid_argument("write_mc_samples_csv: ids and samples differ in length");
    os << "instance_id,pass_index,output\n";
    const auto old = os.precision(17);
    for (std::size_t i = 0; i < raw.size(); ++i)
        for (std::size_t t = 0; t < raw[i].size(); ++t)
            os << ids[i] << ',' << t << ',' << raw[i][t] << '\n';
    os.precision(old);
}

} // namespace smip
