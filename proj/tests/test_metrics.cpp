#include "helpers.hpp"

#include "smip/metrics.hpp"

#include <doctest.h>

#include <cmath>

using namespace smip;
using smip::test::inst;

TEST_SUITE("metrics")
{
    TEST_CASE("confusion counts")
    {
        const std::vector<LabeledInstance> v{inst(0.1, 0, 0), inst(0.9, 0, 1), inst(0.2, 0, 0)};
        const std::vector<Decision> all{Decision::positive(), Decision::negative(), Decision::positive()};
        const auto cf = mean_cut_counterfactual(v);
        CHECK(confusion_counts(all, v, cf) == ConfusionCounts{3, 0, 0, 0});

        const std::vector<LabeledInstance> w{inst(0.1, 0, 1)};
        const std::vector<Decision> rej{Decision::reject()};
        CHECK(confusion_counts(rej, w, mean_cut_counterfactual(w)).r == 1);

        // c: 0, 1; c_bar: 2; r: 3 (would say Positive, y = 1); r_bar: 4, 5.
        const std::vector<LabeledInstance> six{inst(0.2, 0, 0), inst(0.8, 0, 1), inst(0.3, 0, 1),
                                               inst(0.4, 0, 1), inst(0.45, 0, 0), inst(0.7, 0, 1)};
        const std::vector<Decision> d{Decision::positive(), Decision::negative(), Decision::positive(),
                                      Decision::reject(),   Decision::reject(),   Decision::reject()};
        CHECK(confusion_counts(d, six, mean_cut_counterfactual(six)) == ConfusionCounts{2, 1, 1, 2});
    }

    TEST_CASE("region counterfactual")
    {
        const ThresholdSolution th{0.2, 0.2, 0.1, 0.1};
        const std::vector<LabeledInstance> v{inst(0.1, 0.3, 0), inst(0.9, 0.3, 0), inst(0.55, 0.0, 0)};
        const auto cf = region_counterfactual(v, th);
        CHECK(cf[0] == DecisionKind::Positive);
        CHECK(cf[1] == DecisionKind::Negative);
        CHECK(cf[2] == DecisionKind::Negative);
    }

    TEST_CASE("reject metrics")
    {
        const auto a = reject_metrics({8, 2, 0, 0});
        CHECK(a.nra == doctest::Approx(0.8).epsilon(1e-12));
        CHECK(a.cq == doctest::Approx(0.8).epsilon(1e-12));
        CHECK(a.rq == 1.0);

        const auto b = reject_metrics({6, 1, 2, 1});
        CHECK(std::abs(b.nra - 6.0 / 7.0) < 1e-12);
        CHECK(std::abs(b.cq - 0.8) < 1e-12);
        CHECK(std::abs(b.rq - 14.0 / 3.0) < 1e-12);

        const auto c = reject_metrics({9, 0, 1, 0});
        CHECK(std::isinf(c.rq));
        CHECK(c.rq > 0);

        const auto none = reject_metrics({0, 0, 0, 0});
        CHECK(std::isnan(none.nra));
        CHECK(std::isnan(none.cq));

        const auto all_rejected = reject_metrics({0, 0, 2, 1});
        CHECK(std::isnan(all_rejected.nra));
    }

    TEST_CASE("cq equals nra without rejections")
    {
        for (std::size_t c = 0; c < 5; ++c)
            for (std::size_t cb = 0; cb < 5; ++cb) {
                if (c + cb == 0)
                    continue;
                const auto k = reject_metrics({c, cb, 0, 0});
                CHECK(k.cq == k.nra);
            }
    }

    TEST_CASE("profit gain")
    {
        CHECK(profit_gain({200, 200, 0}) == 1.0);
        CHECK(profit_gain({0, 200, 0}) == 0.0);
        CHECK(profit_gain({50, 200, 0}) == 0.25);
        CHECK(std::isnan(profit_gain({5, 3, 3})));
    }

    TEST_CASE("reference profits")
    {
        const CostModel cm;
        const std::vector<LabeledInstance> legit{inst(0.1, 0, 0, 10.0), inst(0.7, 0, 0, 30.0)};
        CHECK(oracle_profit(legit, cm) == doctest::Approx(8.0));
        CHECK(majority_profit(legit, 0, cm) == doctest::Approx(8.0));

        const std::vector<LabeledInstance> mixed{inst(0.1, 0, 0, 10.0), inst(0.1, 0, 1, 20.0),
                                                 inst(0.1, 0, 0, 30.0), inst(0.1, 0, 1, 40.0)};
        CHECK(oracle_profit(mixed, cm) == doctest::Approx(8.0));
        CHECK(majority_profit(mixed, 0, cm) == doctest::Approx(2.0 - 48.0 + 6.0 - 96.0));
        CHECK(majority_profit(mixed, 1, cm) == doctest::Approx(-30.0 - 90.0));

        const std::vector<Decision> d{Decision::positive(), Decision::reject(), Decision::negative(),
                                      Decision::negative()};
        CHECK(profit_of(d, mixed, cm) == doctest::Approx(2.0 - 3.0 - 90.0 + 0.0));
    }
}
