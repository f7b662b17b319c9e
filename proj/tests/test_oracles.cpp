#include "helpers.hpp"

#include "smip/oracles.hpp"

#include <doctest.h>

#include <random>

using namespace smip;
using smip::test::inst;
using smip::test::numbered;

TEST_SUITE("oracles")
{
    const CostModel cm;

    TEST_CASE("single instance, mipsc")
    {
        SolverConfig cfg;
        cfg.rcap = 0;
        cfg.rho = 1.0;
        const std::vector<LabeledInstance> legit{inst(0.1, 0.01, 0)};
        CHECK(brute_force_mipsc(legit, cfg).objective == 0.0);

        // Cuts at -0.9 on both sides put the instance right of the band, so
        // it is decided Negative, which is correct for y = 1.
        const std::vector<LabeledInstance> fraud{inst(0.1, 0.01, 1)};
        const auto r = brute_force_mipsc(fraud, cfg);
        CHECK(r.objective == 0.0);
        CHECK(decide_mipsc(fraud[0].est, r.thresholds).kind == DecisionKind::Negative);
        CHECK(r.exhaustive_count == 16);
    }

    TEST_CASE("single instance, mipcsc")
    {
        SolverConfig cfg;
        const std::vector<LabeledInstance> legit{inst(0.3, 0.1, 0, 40.0)};
        CHECK(brute_force_mipcsc(legit, cfg, cm).objective == doctest::Approx(0.2 * 40.0));
    }

    TEST_CASE("two instances, mipcsc")
    {
        SolverConfig cfg;
        cfg.rcap = 1;
        // Separable by mu: the legit one goes Positive, the fraud Negative.
        const auto apart = numbered({inst(0.2, 0.1, 0, 50.0), inst(0.3, 0.2, 1, 100.0)});
        CHECK(brute_force_mipcsc(apart, cfg, cm).objective == doctest::Approx(10.0));

        // Same mu: both share a side. Best is legit Positive (+10) and the
        // fraud rejected (-3), or the reverse on the right (7 + 0).
        const auto together = numbered({inst(0.3, 0.1, 0, 50.0), inst(0.3, 0.2, 1, 100.0)});
        CHECK(brute_force_mipcsc(together, cfg, cm).objective == doctest::Approx(7.0));
        cfg.rcap = 0;
        CHECK(brute_force_mipcsc(together, cfg, cm).objective == doctest::Approx(-150.0));
    }

    TEST_CASE("guards")
    {
        SolverConfig cfg;
        CHECK_THROWS_AS(brute_force_mipsc(random_instances(1, 21, false), cfg), std::invalid_argument);
        CHECK_THROWS_AS(brute_force_mipcsc(random_instances(1, 7, true), cfg, cm), std::invalid_argument);
        CHECK_NOTHROW(brute_force_mipsc(random_instances(1, 21, false), cfg, true));
    }

    TEST_CASE("random instances")
    {
        const auto a = random_instances(4, 10, true);
        const auto b = random_instances(4, 10, true);
        REQUIRE(a.size() == 10);
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].est.mu == b[i].est.mu);
            CHECK(a[i].est.sigma == b[i].est.sigma);
            CHECK(a[i].value == b[i].value);
            CHECK(a[i].est.mu >= 0.0);
            CHECK(a[i].est.mu <= 1.0);
            CHECK(a[i].est.sigma >= 0.0);
            CHECK(a[i].est.sigma <= 0.5);
            CHECK(*a[i].value >= 0.0);
        }
        CHECK_FALSE(random_instances(4, 10, false)[0].value);
    }

    TEST_CASE("oracle dominates sampled thresholds")
    {
        std::mt19937_64 rng(17);
        std::uniform_real_distribution<double> u(-0.6, 0.6), s(-0.05, 0.55), t(-5.0, 120.0);
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const auto v = random_instances(seed, 6, true);
            SolverConfig cfg;
            cfg.rcap = 2;
            cfg.rho = 0.6;
            const double best_sc = brute_force_mipsc(v, cfg).objective;
            const double best_csc = brute_force_mipcsc(v, cfg, cm).objective;
            std::vector<int> y;
            for (const auto& i : v)
                y.push_back(i.y);
            for (int k = 0; k < 200; ++k) {
                const ThresholdSolution th{u(rng), u(rng), s(rng), s(rng)};
                if (!th.disjoint())
                    continue;
                const auto d = decide_all_mipsc(v, th);
                if (count_rejections(d) <= cfg.rcap)
                    CHECK(objective_mipsc(d, y, cfg.rho) >= best_sc);
                const ValueThresholds vt{t(rng), t(rng), t(rng), t(rng), t(rng)};
                const auto dc = decide_all_mipcsc(v, th, vt);
                if (count_rejections(dc) <= cfg.rcap)
                    CHECK(objective_mipcsc(dc, v, cm) <= best_csc);
            }
        }
    }
}
