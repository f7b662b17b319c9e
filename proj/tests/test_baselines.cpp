#include "helpers.hpp"

#include "smip/baselines.hpp"

#include <doctest.h>

using namespace smip;
using smip::test::inst;

TEST_SUITE("baselines")
{
    const std::vector<BaselineKind> kinds{BaselineKind::Random, BaselineKind::PredictiveMean,
                                          BaselineKind::ModelUncertainty, BaselineKind::TransactionAmount,
                                          BaselineKind::Risk};

    TEST_CASE("zero capacity follows the 0.5 cut")
    {
        const std::vector<LabeledInstance> v{inst(0.2, 0.1, 0, 1.0), inst(0.8, 0.2, 1, 2.0), inst(0.5, 0.3, 1, 3.0)};
        for (auto k : kinds) {
            const auto d = baseline_decide(k, v, 0, 1);
            CHECK(d[0].kind == DecisionKind::Positive);
            CHECK(d[1].kind == DecisionKind::Negative);
            CHECK(d[2].kind == DecisionKind::Positive);
        }
    }

    TEST_CASE("rankings")
    {
        const std::vector<LabeledInstance> s{inst(0.2, 0.3, 0), inst(0.2, 0.1, 0), inst(0.2, 0.2, 0)};
        CHECK(baseline_decide(BaselineKind::ModelUncertainty, s, 1)[0].rejected());

        const std::vector<LabeledInstance> r{inst(0.2, 0.1, 0, 100.0), inst(0.2, 0.3, 0, 10.0)};
        const auto d = baseline_decide(BaselineKind::Risk, r, 1);
        CHECK(d[0].rejected());
        CHECK_FALSE(d[1].rejected());
        CHECK(baseline_decide(BaselineKind::TransactionAmount, r, 1)[0].rejected());

        const std::vector<LabeledInstance> p{inst(0.1, 0, 0), inst(0.45, 0, 0), inst(0.55, 0, 0), inst(0.9, 0, 0)};
        const auto dp = baseline_decide(BaselineKind::PredictiveMean, p, 1);
        CHECK(dp[1].rejected());
        CHECK(count_rejections(dp) == 1);
    }

    TEST_CASE("exact capacity for every kind")
    {
        std::vector<LabeledInstance> v;
        for (int i = 0; i < 20; ++i)
            v.push_back(inst(0.05 * i, 0.01 * (i % 3), i % 2, 1.0 + i % 4, i));
        for (auto k : kinds)
            for (std::size_t cap : {0, 1, 7, 20, 25})
                CHECK(count_rejections(baseline_decide(k, v, cap, 9)) == std::min<std::size_t>(cap, 20));
    }

    TEST_CASE("random is seeded")
    {
        std::vector<LabeledInstance> v;
        for (int i = 0; i < 30; ++i)
            v.push_back(inst(0.5, 0.1, 0, 1.0, i));
        const auto a = baseline_decide(BaselineKind::Random, v, 10, 4);
        const auto b = baseline_decide(BaselineKind::Random, v, 10, 4);
        const auto c = baseline_decide(BaselineKind::Random, v, 10, 5);
        bool same = true, differs = false;
        for (std::size_t i = 0; i < v.size(); ++i) {
            same = same && a[i].kind == b[i].kind;
            differs = differs || a[i].kind != c[i].kind;
        }
        CHECK(same);
        CHECK(differs);
    }

    TEST_CASE("ties by position")
    {
        const std::vector<LabeledInstance> v{inst(0.2, 0.1, 0), inst(0.2, 0.1, 0), inst(0.2, 0.1, 0)};
        const auto d = baseline_decide(BaselineKind::ModelUncertainty, v, 2);
        CHECK(d[0].rejected());
        CHECK(d[1].rejected());
        CHECK_FALSE(d[2].rejected());
    }

    TEST_CASE("value baselines need values")
    {
        const std::vector<LabeledInstance> v{inst(0.2, 0.1, 0)};
        CHECK_THROWS_AS(baseline_decide(BaselineKind::Risk, v, 1), std::invalid_argument);
        CHECK_THROWS_AS(baseline_decide(BaselineKind::TransactionAmount, v, 1), std::invalid_argument);
    }

    TEST_CASE("names round-trip")
    {
        for (auto k : kinds)
            CHECK(baseline_from_string(to_string(k)) == k);
        CHECK_THROWS_AS(baseline_from_string("oracle"), std::invalid_argument);
    }
}
