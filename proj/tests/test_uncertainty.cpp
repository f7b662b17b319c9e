#include "smip/uncertainty.hpp"

#include <doctest.h>

#include <array>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

using namespace smip;

namespace {

struct Blobs {
    Matrix X;
    std::vector<int> y;
};

Blobs blobs(std::size_t n, double gap, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    Blobs b{Matrix(n, 2), {}};
    for (std::size_t i = 0; i < n; ++i) {
        const int y = static_cast<int>(i % 2);
        b.X(i, 0) = g(rng) + (y ? gap : -gap);
        b.X(i, 1) = g(rng) + (y ? gap : -gap);
        b.y.push_back(y);
    }
    return b;
}

// Newton's method on the logistic log-likelihood with a tiny ridge.
std::array<double, 3> logistic_regression(const Blobs& b)
{
    std::array<double, 3> w{0, 0, 0};
    for (int it = 0; it < 50; ++it) {
        double g[3] = {0, 0, 0}, H[3][3] = {};
        for (std::size_t i = 0; i < b.y.size(); ++i) {
            const double x[3] = {b.X(i, 0), b.X(i, 1), 1.0};
            const double p = 1.0 / (1.0 + std::exp(-(w[0] * x[0] + w[1] * x[1] + w[2])));
            for (int a = 0; a < 3; ++a) {
                g[a] += (p - b.y[i]) * x[a];
                for (int c = 0; c < 3; ++c)
                    H[a][c] += p * (1 - p) * x[a] * x[c];
            }
        }
        for (int a = 0; a < 3; ++a) {
            g[a] += 1e-3 * w[a];
            H[a][a] += 1e-3;
        }
        // 3x3 solve by Cramer's rule.
        auto det = [](double M[3][3]) {
            return M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1]) -
                   M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0]) +
                   M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]);
        };
        const double D = det(H);
        for (int a = 0; a < 3; ++a) {
            double M[3][3];
            for (int r = 0; r < 3; ++r)
                for (int c = 0; c < 3; ++c)
                    M[r][c] = c == a ? g[r] : H[r][c];
            w[a] -= det(M) / D;
        }
    }
    return w;
}

double lr_accuracy(const Blobs& b, const std::array<double, 3>& w)
{
    std::size_t ok = 0;
    for (std::size_t i = 0; i < b.y.size(); ++i) {
        const double z = w[0] * b.X(i, 0) + w[1] * b.X(i, 1) + w[2];
        ok += static_cast<std::size_t>((z > 0) == (b.y[i] == 1));
    }
    return static_cast<double>(ok) / b.y.size();
}

} // namespace

TEST_SUITE("uncertainty")
{
    TEST_CASE("init shapes and determinism")
    {
        const auto p = init_network(4, 50, 7);
        REQUIRE(p.weights.size() == 3);
        CHECK(p.weights[0].size() == 4 * 50);
        CHECK(p.weights[1].size() == 50 * 50);
        CHECK(p.weights[2].size() == 50);
        CHECK(p.biases[0].size() == 50);
        CHECK(p.biases[1].size() == 50);
        CHECK(p.biases[2].size() == 1);
        CHECK(p.num_params() == 4 * 50 + 50 * 50 + 50 + 101);
        CHECK(p == init_network(4, 50, 7));
        CHECK_FALSE(p == init_network(4, 50, 8));
        CHECK_THROWS_AS(init_network(0, 50, 7), std::invalid_argument);
    }

    TEST_CASE("forward")
    {
        auto p = init_network(3, 5, 1);
        auto flat = p.flatten();
        std::fill(flat.begin(), flat.end(), 0.0);
        p.assign(flat);
        const std::vector<double> x{1.0, -2.0, 3.0};
        CHECK(forward(p, x, 0.0) == 0.5);

        const auto q = init_network(3, 5, 2);
        const double a = forward(q, x, 0.3);
        CHECK(forward(q, x, 0.3) == a);
        std::mt19937_64 rng(5);
        CHECK(forward(q, x, 0.0, &rng) == forward(q, x, 0.0));
        CHECK_THROWS_AS(forward(q, std::vector<double>{1.0}, 0.0), std::invalid_argument);
    }

    TEST_CASE("separable blobs")
    {
        const auto b = blobs(200, 1.5, 3);
        const auto w = logistic_regression(b);
        const double lr = lr_accuracy(b, w);
        TrainConfig cfg;
        cfg.seed = 11;
        cfg.epochs = 200;
        const auto p = train(b.X, b.y, cfg);
        const double nn = accuracy(p, b.X, b.y);
        CHECK(lr >= 0.95);
        CHECK(nn >= 0.95);
        CHECK(nn >= lr - 0.03);
    }

    TEST_CASE("gradient matches finite differences")
    {
        const auto b = blobs(12, 0.5, 8);
        std::vector<std::size_t> rows(b.y.size());
        std::iota(rows.begin(), rows.end(), 0);
        for (std::size_t width : {1, 4}) {
            auto p = init_network(2, width, 21);
            auto flat = p.flatten();
            std::mt19937_64 rng(2);
            std::normal_distribution<double> g(0.0, 0.5);
            for (auto& v : flat)
                v = g(rng);
            p.assign(flat);
            std::vector<double> grad;
            loss_gradient(p, b.X, b.y, rows, 0.0, 0.01, nullptr, &grad);
            const double h = 1e-5;
            double worst = 0.0;
            for (std::size_t k = 0; k < flat.size(); ++k) {
                auto up = flat, dn = flat;
                up[k] += h;
                dn[k] -= h;
                NetworkParams pu = p, pd = p;
                pu.assign(up);
                pd.assign(dn);
                const double num = (loss_gradient(pu, b.X, b.y, rows, 0.0, 0.01, nullptr, nullptr) -
                                    loss_gradient(pd, b.X, b.y, rows, 0.0, 0.01, nullptr, nullptr)) /
                                   (2 * h);
                const double denom = std::max({std::abs(num), std::abs(grad[k]), 1e-6});
                worst = std::max(worst, std::abs(num - grad[k]) / denom);
            }
            CHECK(worst < 1e-4);
        }
    }

    TEST_CASE("zero epochs keep the initialization")
    {
        const auto b = blobs(20, 1.0, 1);
        TrainConfig cfg;
        cfg.epochs = 0;
        cfg.hidden_width = 8;
        cfg.seed = 4;
        auto p = train(b.X, b.y, cfg);
        auto init = init_network(2, 8, 4);
        CHECK(p.flatten() == init.flatten());
    }

    TEST_CASE("training errors")
    {
        const auto b = blobs(20, 1.0, 1);
        TrainConfig cfg;
        cfg.learning_rate = 0.0;
        CHECK_THROWS_AS(train(b.X, b.y, cfg), std::invalid_argument);
        cfg = TrainConfig{};
        cfg.dropout_rate = 1.0;
        CHECK_THROWS_AS(train(b.X, b.y, cfg), std::invalid_argument);
        std::vector<int> one_class(b.y.size(), 0);
        CHECK_THROWS_AS(train(b.X, one_class, TrainConfig{}), std::invalid_argument);
        cfg = TrainConfig{};
        cfg.learning_rate = 1e6;
        cfg.epochs = 50;
        auto wild = blobs(40, 30.0, 2);
        CHECK_THROWS_AS(train(wild.X, wild.y, cfg), std::runtime_error);
    }

    TEST_CASE("training is reproducible")
    {
        const auto b = blobs(60, 1.0, 6);
        TrainConfig cfg;
        cfg.epochs = 5;
        cfg.seed = 9;
        CHECK(train(b.X, b.y, cfg) == train(b.X, b.y, cfg));
    }

    TEST_CASE("grid search")
    {
        const auto tr = blobs(80, 0.6, 1), va = blobs(60, 0.6, 2);
        TrainConfig base;
        base.epochs = 10;
        base.seed = 3;
        const std::vector<double> d1{0.05}, l1{0.1};
        const auto single = grid_search(tr.X, tr.y, va.X, va.y, d1, l1, base);
        CHECK(single.best.dropout_rate == 0.05);
        CHECK(single.best.l2_coeff == 0.1);

        const std::vector<double> d2{0.05, 0.01};
        const auto two = grid_search(tr.X, tr.y, va.X, va.y, d2, l1, base);
        double acc[2];
        for (int k = 0; k < 2; ++k) {
            TrainConfig c = base;
            c.dropout_rate = d2[k];
            c.l2_coeff = 0.1;
            acc[k] = accuracy(train(tr.X, tr.y, c), va.X, va.y);
        }
        const double expect = acc[0] > acc[1] ? 0.05 : acc[1] > acc[0] ? 0.01 : 0.01;
        CHECK(two.best.dropout_rate == expect);
        CHECK(two.val_accuracy == std::max(acc[0], acc[1]));
        REQUIRE(two.cells.size() == 2);

        CHECK(default_dropout_grid == std::vector<double>{0.05, 0.01, 0.02});
        CHECK(default_l2_grid == std::vector<double>{0.1, 0.25});
    }

    TEST_CASE("monte carlo estimates")
    {
        const auto b = blobs(40, 1.0, 4);
        TrainConfig cfg;
        cfg.epochs = 20;
        const auto p = train(b.X, b.y, cfg);

        const auto det = mc_predict_all(p, b.X, 0.0, MCConfig{50, 1});
        for (std::size_t i = 0; i < det.size(); ++i) {
            CHECK(det[i].sigma == 0.0);
            CHECK(det[i].mu == forward(p, b.X.row(i), 0.0));
        }
        CHECK(mc_predict(p, b.X.row(0), 0.3, MCConfig{1, 2}).sigma == 0.0);

        std::vector<std::vector<double>> raw;
        const auto est = mc_predict_all(p, b.X, 0.3, MCConfig{100, 7}, &raw);
        REQUIRE(raw.size() == est.size());
        for (std::size_t i = 0; i < est.size(); ++i) {
            REQUIRE(raw[i].size() == 100);
            double s = 0;
            for (double v : raw[i])
                s += v;
            const double mean = s / 100.0;
            double q = 0;
            for (double v : raw[i])
                q += (v - mean) * (v - mean);
            CHECK(std::abs(est[i].mu - mean) < 1e-12);
            CHECK(std::abs(est[i].sigma - std::sqrt(q / 100.0)) < 1e-12);
            CHECK(est[i].mu >= 0.0);
            CHECK(est[i].mu <= 1.0);
            CHECK(est[i].sigma >= 0.0);
            CHECK(est[i].sigma <= 0.5);
        }
        const auto again = mc_predict_all(p, b.X, 0.3, MCConfig{100, 7});
        CHECK(again[3].mu == est[3].mu);
        CHECK(again[3].sigma == est[3].sigma);

        std::ostringstream os;
        const std::vector<std::size_t> ids{10, 11};
        write_mc_samples_csv(os, ids, {raw[0], raw[1]});
        CHECK(os.str().rfind("instance_id,pass_index,output\n10,0,", 0) == 0);
    }

    TEST_CASE("summary of identical samples")
    {
        const std::vector<double> same(37, 0.1234567);
        const auto e = summarize(same);
        CHECK(e.sigma == 0.0);
        CHECK(e.mu == 0.1234567);
    }

    TEST_CASE("json round trip")
    {
        const auto p = init_network(3, 4, 5);
        const auto q = NetworkParams::from_json(nlohmann::json::parse(p.to_json().dump()));
        CHECK(p == q);
    }
}
