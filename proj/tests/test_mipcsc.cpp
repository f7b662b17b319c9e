#include "helpers.hpp"

#include "smip/cost_model.hpp"
#include "smip/mipcsc_solver.hpp"
#include "smip/oracles.hpp"

#include <doctest.h>

#include <limits>

using namespace smip;
using smip::test::inst;
using smip::test::numbered;

TEST_SUITE("mipcsc")
{
    const CostModel cm;

    TEST_CASE("contributions")
    {
        CHECK(contribution(cm, DecisionKind::Positive, 0, 100).to_double() == 20.0);
        CHECK(contribution(cm, DecisionKind::Positive, 1, 100).to_double() == -240.0);
        CHECK(contribution(cm, DecisionKind::Reject, 0, 100).to_double() == 17.0);
        CHECK(contribution(cm, DecisionKind::Reject, 1, 100).to_double() == -3.0);
        CHECK(contribution(cm, DecisionKind::Negative, 0, 100).to_double() == -300.0);
        CHECK(contribution(cm, DecisionKind::Negative, 1, 100).to_double() == 0.0);
    }

    TEST_CASE("money rounding")
    {
        CHECK(Money::from_double(0.1).micros == 100000);
        CHECK(Money::from_double(-2.5e-7).micros == -0);
        CHECK((Money::from_double(0.1) + Money::from_double(0.2)).micros == 300000);
        CHECK_THROWS(Money::from_double(std::numeric_limits<double>::infinity()));
    }

    TEST_CASE("cost model validation")
    {
        CostModel bad;
        bad.c = -1;
        CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    }

    TEST_CASE("region frontier")
    {
        const std::vector<LabeledInstance> empty;
        const auto fe = region_value_frontier(empty, RegionRule::Positive, cm);
        REQUIRE(fe.by_rejections.size() == 1);
        CHECK(fe.by_rejections[0]->value == 0.0);

        const std::vector<LabeledInstance> fraud{inst(0.1, 0.01, 1, 100.0)};
        const auto f = region_value_frontier(fraud, RegionRule::Positive, cm);
        REQUIRE(f.by_rejections.size() == 2);
        CHECK(f.by_rejections[0]->value == -240.0);
        CHECK(f.by_rejections[1]->value == -3.0);

        // Middle: (0.6, y=1) goes Negative for 0, (0.4, y=0) Positive for 2.
        // Equal values mean only "none" or "both" can be rejected.
        const std::vector<LabeledInstance> mid{inst(0.6, 0.1, 1, 10.0), inst(0.4, 0.1, 0, 10.0)};
        const auto fm = region_value_frontier(mid, RegionRule::Middle, cm);
        REQUIRE(fm.by_rejections.size() == 3);
        CHECK(fm.by_rejections[0]->value == 2.0);
        CHECK_FALSE(fm.by_rejections[1]);
        CHECK(fm.by_rejections[2]->value == -4.0);
    }

    TEST_CASE("all legit data is accepted")
    {
        const auto v = numbered({inst(0.1, 0.02, 0, 10.0), inst(0.3, 0.1, 0, 250.0), inst(0.7, 0.05, 0, 3.5),
                                 inst(0.45, 0.2, 0, 40.0)});
        SolverConfig cfg;
        cfg.rcap = 4;
        const auto sol = solve_mipcsc(v, cfg, cm);
        CHECK(sol.objective == doctest::Approx(0.2 * (10 + 250 + 3.5 + 40)));
        CHECK(sol.rejections == 0);
        for (const auto& d : sol.decisions)
            CHECK(d.kind == DecisionKind::Positive);
    }

    TEST_CASE("free review rejects everything ambiguous")
    {
        CostModel free = cm;
        free.c = 0.0;
        free.w_tn = 0.5;
        const auto v = numbered({inst(0.5, 0.1, 0, 10.0), inst(0.5, 0.1, 1, 20.0), inst(0.5, 0.1, 1, 7.0)});
        SolverConfig cfg;
        cfg.rcap = 3;
        const auto sol = solve_mipcsc(v, cfg, free);
        CHECK(sol.objective == doctest::Approx(0.2 * 10 + 0.5 * 27));
    }

    TEST_CASE("solution is self-consistent")
    {
        for (std::uint64_t s = 0; s < 30; ++s) {
            const auto v = random_instances(s, 12, true);
            SolverConfig cfg;
            cfg.rcap = s % 5;
            const auto sol = solve_mipcsc(v, cfg, cm);
            const auto again = decide_all_mipcsc(v, sol.thresholds, sol.value_thresholds);
            for (std::size_t i = 0; i < v.size(); ++i)
                CHECK(again[i].kind == sol.decisions[i].kind);
            CHECK(objective_mipcsc(sol.decisions, v, cm) == sol.objective);
            CHECK(sol.rejections <= cfg.rcap);
            CHECK(sol.thresholds.disjoint());
        }
    }

    TEST_CASE("matches the oracle")
    {
        for (std::uint64_t s = 200; s < 230; ++s) {
            const std::size_t m = 1 + s % 6;
            const auto v = random_instances(s, m, true);
            SolverConfig cfg;
            cfg.rcap = s % (m + 1);
            CHECK(solve_mipcsc(v, cfg, cm).objective == brute_force_mipcsc(v, cfg, cm).objective);
        }
    }

    TEST_CASE("missing values are rejected")
    {
        const std::vector<LabeledInstance> v{inst(0.1, 0.1, 0)};
        CHECK_THROWS_AS(solve_mipcsc(v, SolverConfig{}, cm), std::invalid_argument);
    }

    TEST_CASE("memory guard")
    {
        const auto v = random_instances(9, 3000, true);
        SolverConfig cfg;
        cfg.rcap = 3000;
        std::vector<LabeledInstance> spread(v);
        for (std::size_t i = 0; i < spread.size(); ++i)
            spread[i].est.mu = static_cast<double>(i) / spread.size();
        CHECK_THROWS_AS(solve_mipcsc(spread, cfg, cm), std::invalid_argument);
        cfg.coarsen_to = 16;
        CHECK_NOTHROW(solve_mipcsc(spread, cfg, cm));
    }

    TEST_CASE("lp export")
    {
        const std::vector<LabeledInstance> one{inst(0.2, 0.05, 0, 10.0)};
        const auto text = export_mipcsc_lp(one, SolverConfig{}, cm, LpExportConfig{});
        CHECK(text.find("p_1_1 + p_1_2 + p_1_3 + n_1_1 + n_1_2 + n_1_3 + r_1 = 1") != std::string::npos);
        CHECK(text.find("Maximize") != std::string::npos);

        const auto two = numbered({inst(0.2, 0.05, 0, 10.0), inst(0.7, 0.1, 1, 30.0)});
        SolverConfig cfg;
        cfg.rcap = 1;
        CHECK(export_mipcsc_lp(two, cfg, cm, LpExportConfig{}).find("r_1 + r_2 <= 1") != std::string::npos);
    }
}
