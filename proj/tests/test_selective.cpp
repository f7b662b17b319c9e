#include "helpers.hpp"

#include "smip/selective.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace smip;
using smip::test::inst;

TEST_SUITE("selective")
{
    const ThresholdSolution th{0.2, 0.2, 0.1, 0.1};

    TEST_CASE("regions")
    {
        CHECK(assign_region({0.1, 0.0}, th) == Region::A1);
        CHECK(assign_region({0.5, 0.0}, th) == Region::A3);
        CHECK(assign_region({0.5, 0.49}, th) == Region::A3);
        CHECK(assign_region({0.9, 0.3}, th) == Region::A5);
        CHECK(assign_region({0.1, 0.3}, th) == Region::A2);
        CHECK(assign_region({0.9, 0.05}, th) == Region::A4);
    }

    TEST_CASE("boundaries are strict")
    {
        const ThresholdSolution t{0.2, 0.2, 0.1, 0.1};
        CHECK(assign_region({0.3 - 1e-9, 0.0}, t) == Region::A1);
        CHECK(assign_region({t.left_bound(), 0.0}, t) == Region::A3);
        CHECK(assign_region({t.right_bound(), 0.0}, t) == Region::A3);
        CHECK(assign_region({0.7 + 1e-9, 0.0}, t) == Region::A4);
        CHECK(assign_region({0.1, 0.1 - 1e-9}, t) == Region::A1);
        CHECK(assign_region({0.1, 0.1}, t) == Region::A2);
        CHECK(assign_region({0.9, 0.1}, t) == Region::A5);
    }

    TEST_CASE("overlapping thresholds are rejected")
    {
        const ThresholdSolution bad{0.3, -0.4, 0.1, 0.1};
        CHECK_FALSE(bad.disjoint());
        CHECK_THROWS_AS(assign_region({0.5, 0.0}, bad), std::invalid_argument);
        CHECK_THROWS_AS(decide_mipsc({0.5, 0.0}, bad), std::invalid_argument);
    }

    TEST_CASE("indicators")
    {
        const auto a = indicators({0.1, 0.0}, th);
        CHECK(a.L);
        CHECK_FALSE(a.R);
        CHECK(a.D_L);
        CHECK_FALSE(a.Q);
        const auto b = indicators({0.9, 0.3}, th);
        CHECK(b.R);
        CHECK_FALSE(b.D_R);
        CHECK(b.Q);
        CHECK_FALSE(indicators({0.5, 0.0}, th).Q);
    }

    TEST_CASE("mipsc decisions")
    {
        CHECK(decide_mipsc({0.1, 0.0}, th).kind == DecisionKind::Positive);
        CHECK(decide_mipsc({0.5, 0.0}, th).kind == DecisionKind::Reject);
        CHECK(decide_mipsc({0.9, 0.05}, th).kind == DecisionKind::Negative);
        CHECK(decide_mipsc({0.1, 0.3}, th).kind == DecisionKind::Reject);
        CHECK(decide_mipsc({0.9, 0.3}, th).kind == DecisionKind::Reject);
    }

    TEST_CASE("mipcsc decisions")
    {
        ValueThresholds vt{50, 50, 50, 50, 50};
        const auto a = decide_mipcsc(inst(0.1, 0.0, 0, 5.0), th, vt);
        CHECK(a.kind == DecisionKind::Positive);
        CHECK(a.rule == 1);
        const auto b = decide_mipcsc(inst(0.6, 0.0, 0, 5.0), th, vt);
        CHECK(b.kind == DecisionKind::Negative);
        CHECK(b.rule == 3);
        CHECK(decide_mipcsc(inst(0.4, 0.0, 0, 5.0), th, vt).kind == DecisionKind::Positive);
        CHECK(decide_mipcsc(inst(0.9, 0.3, 0, 1000.0), th, vt).kind == DecisionKind::Reject);
        CHECK(decide_mipcsc(inst(0.9, 0.3, 0, 50.0), th, vt).kind == DecisionKind::Reject);
        const auto c = decide_mipcsc(inst(0.9, 0.3, 0, 49.0), th, vt);
        CHECK(c.kind == DecisionKind::Negative);
        CHECK(c.rule == 2);
        CHECK_THROWS_AS(decide_mipcsc(inst(0.1, 0.0, 0), th, vt), std::invalid_argument);
    }

    TEST_CASE("exactly one region and decision per instance")
    {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int k = 0; k < 2000; ++k) {
            double a = u(rng) - 0.5, b = u(rng) - 0.5;
            if (a + b < 0)
                b = -a + u(rng) * 0.1;
            const ThresholdSolution t{a, b, u(rng) * 0.5, u(rng) * 0.5};
            REQUIRE(t.disjoint());
            const UncertaintyEstimate e{u(rng), u(rng) * 0.5};
            const auto r = assign_region(e, t);
            const auto ind = indicators(e, t);
            CHECK_FALSE((ind.L && ind.R));
            const int in_regions = (r == Region::A1) + (r == Region::A2) + (r == Region::A3) + (r == Region::A4) +
                                   (r == Region::A5);
            CHECK(in_regions == 1);
            const auto d = decide_mipsc(e, t);
            CHECK((d.kind == DecisionKind::Positive) == (r == Region::A1));
            CHECK((d.kind == DecisionKind::Negative) == (r == Region::A4));
        }
    }

    TEST_CASE("correctness polarity")
    {
        CHECK(is_correct(DecisionKind::Positive, 0));
        CHECK_FALSE(is_correct(DecisionKind::Positive, 1));
        CHECK(is_correct(DecisionKind::Negative, 1));
        CHECK_FALSE(is_correct(DecisionKind::Negative, 0));
        CHECK(mean_cut_decision(0.5) == DecisionKind::Positive);
        CHECK(mean_cut_decision(0.51) == DecisionKind::Negative);
    }

    TEST_CASE("decisions csv")
    {
        const std::vector<LabeledInstance> v{inst(0.1, 0.0, 0, std::nullopt, 7)};
        const auto d = decide_all_mipsc(v, th);
        const std::vector<Region> regions{assign_region(v[0].est, th)};
        std::ostringstream os;
        write_decisions_csv(os, v, d, regions);
        CHECK(os.str().find("7,A1,positive") != std::string::npos);
    }
}
