#include "helpers.hpp"

#include "smip/csv.hpp"
#include "smip/harness.hpp"
#include "smip/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <fstream>

using namespace smip;
using smip::test::inst;
using smip::test::numbered;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    auto dir = fs::temp_directory_path() / "smip_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

ExperimentConfig toy_config(const fs::path& out)
{
    ExperimentConfig c;
    c.name = "toy";
    DatasetRef ref;
    ref.name = "toy";
    SynthConfig s;
    s.n = 400;
    s.fraud_ratio = 0.2;
    s.avg_amount = 50.0;
    s.seed = 3;
    s.separation = 1.5;
    ref.synth = s;
    c.datasets = {ref};
    c.train.epochs = 5;
    c.train.hidden_width = 8;
    c.dropout_grid = {0.05};
    c.l2_grid = {0.1};
    c.T = 10;
    c.repeats = 1;
    c.methods = {"mipsc", "mipcsc", "random", "predictive_mean", "model_uncertainty", "transaction_amount", "risk"};
    c.output_dir = out;
    c.threads = 1;
    return c;
}

} // namespace

TEST_SUITE("harness")
{
    TEST_CASE("capacity counts")
    {
        CHECK(rcap_count(0.15, 20) == 3);
        CHECK(rcap_count(0.1, 99) == 9);
        CHECK(rcap_count(1.0, 7) == 7);
        CHECK(rcap_count(0.0, 7) == 0);
        CHECK_THROWS(rcap_count(1.5, 7));
    }

    TEST_CASE("capacity enforcement on test")
    {
        const ThresholdSolution th{0.2, 0.2, 0.1, 0.1};
        const auto v = numbered({inst(0.5, 0.3, 0), inst(0.1, 0.3, 0), inst(0.9, 0.3, 1), inst(0.55, 0.3, 1)});
        auto d = decide_all_mipsc(v, th);
        REQUIRE(count_rejections(d) == 4);
        const std::vector<double> pri{0.3, 0.1, 0.1, 0.4};
        CHECK(enforce_capacity(d, v, th, pri, 1) == 3);
        CHECK(d[1].kind == DecisionKind::Positive);
        CHECK(d[2].kind == DecisionKind::Negative);
        CHECK(d[0].kind == DecisionKind::Positive);
        CHECK(d[3].rejected());
        CHECK(enforce_capacity(d, v, th, pri, 1) == 0);
    }

    TEST_CASE("config validation and round trip")
    {
        auto c = toy_config("out");
        CHECK_NOTHROW(c.validate());
        const auto back = ExperimentConfig::from_json(c.to_json());
        CHECK(back.to_json() == c.to_json());
        c.rcap_fractions = {0.0};
        CHECK_THROWS(c.validate());
        c = toy_config("out");
        c.repeats = 0;
        CHECK_THROWS(c.validate());
        c = toy_config("out");
        c.methods = {"coin_flip"};
        CHECK_THROWS(c.validate());
    }

    TEST_CASE("toy experiment")
    {
        const auto out = scratch("toy_a");
        auto cfg = toy_config(out);
        const auto res = run_experiment(cfg);
        CHECK(res.failures.empty());
        CHECK(res.invariant_violations == 0);
        CHECK(res.rows.size() == cfg.methods.size() * cfg.rcap_fractions.size());
        const auto agg = read_csv_file(out / "aggregates.csv");
        CHECK(agg.size() == 1 + cfg.methods.size() * cfg.rcap_fractions.size());
        for (const auto& r : res.rows) {
            CHECK(r.rejections <= r.rcap_test);
            CHECK(r.counts.total() > 0);
        }

        const auto out_b = scratch("toy_b");
        cfg.output_dir = out_b;
        cfg.threads = 3;
        run_experiment(cfg);
        for (const char* f : {"rows.csv", "aggregates.csv", "failures.csv"})
            CHECK(read_file(out / f) == read_file(out_b / f));
        report(out);
        report(out_b);
        CHECK(read_file(out / "report/toy_nra.csv") == read_file(out_b / "report/toy_nra.csv"));
    }

    TEST_CASE("failures are recorded")
    {
        auto cfg = toy_config(scratch("fail"));
        DatasetRef missing;
        missing.name = "missing";
        missing.path = "/nonexistent/data.csv";
        cfg.datasets.push_back(missing);
        const auto res = run_experiment(cfg);
        REQUIRE(res.failures.size() == 1);
        CHECK(res.failures[0].dataset == "missing");
        CHECK(read_file(cfg.output_dir / "failures.csv").find("missing") != std::string::npos);
    }

    TEST_CASE("aggregates average the rows")
    {
        std::vector<ResultRow> rows;
        for (int k = 0; k < 3; ++k) {
            ResultRow r;
            r.dataset = "d";
            r.method = "m";
            r.rcap_fraction = 0.1;
            r.metrics = {0.5 + 0.1 * k, 0.2 * k, k == 1 ? std::nan("") : 1.0};
            rows.push_back(r);
        }
        const auto a = aggregate(rows);
        REQUIRE(a.size() == 1);
        CHECK(a[0].n == 3);
        CHECK(a[0].mean[0] == doctest::Approx((0.5 + 0.6 + 0.7) / 3));
        CHECK(a[0].sd[0] == doctest::Approx(0.1));
        CHECK(a[0].mean[2] == 1.0);
        CHECK(std::isnan(a[0].mean[3]));
    }

    TEST_CASE("report layout")
    {
        const auto dir = scratch("report");
        std::vector<ResultRow> rows;
        for (const char* m : {"a", "b"})
            for (double f : {0.1, 0.15, 0.2, 0.25}) {
                ResultRow r;
                r.dataset = "d";
                r.method = m;
                r.rcap_fraction = f;
                r.metrics = {0.9, 0.8, 2.0};
                rows.push_back(r);
            }
        write_file_atomic(dir / "aggregates.csv", aggregates_csv(aggregate(rows)));
        const auto files = report(dir);
        CHECK(files.size() == 3);
        const auto t = read_csv_file(dir / "report/d_nra.csv");
        REQUIRE(t.size() == 5);
        CHECK(t[0] == CsvRow{"rcap", "a_mean", "a_sd", "b_mean", "b_sd"});
        CHECK(t[1][0] == "0.1");
        CHECK(t[4][0] == "0.25");
        CHECK(!fs::exists(dir / "report/d_profit_gain.csv"));

        CHECK_THROWS(report(scratch("empty")));
    }

    TEST_CASE("verify")
    {
        const auto ok = verify_mipsc(30, 5, 12, 1);
        CHECK(ok.passed);
        CHECK(ok.agreements == 30);
        const auto okc = verify_mipcsc(10, 3, 5, 1);
        CHECK(okc.passed);

        const MipscObjective off_by_one = [](std::span<const LabeledInstance> v, const SolverConfig& cfg) {
            SolverConfig c = cfg;
            c.rcap = cfg.rcap == 0 ? 0 : cfg.rcap - 1;
            return solve_mipsc(v, c).objective;
        };
        const auto bad = verify_mipsc(200, 5, 12, 1, off_by_one);
        CHECK_FALSE(bad.passed);
        CHECK(bad.counterexample.find("instance_id,mu,sigma,y,value") != std::string::npos);
        CHECK_THROWS(verify_mipsc(1, 5, 21, 1));
    }

    TEST_CASE("instance files")
    {
        const auto dir = scratch("inst");
        const auto v = numbered({inst(0.25, 0.125, 1, 12.5), inst(0.75, 0.0, 0)});
        write_file_atomic(dir / "i.csv", instances_csv(v));
        const auto back = load_instances(dir / "i.csv");
        REQUIRE(back.size() == 2);
        CHECK(back[0].est.mu == 0.25);
        CHECK(back[0].value == 12.5);
        CHECK_FALSE(back[1].value);
        write_file_atomic(dir / "bad.csv", "mu,sigma,y\n0.1,0.1,3\n");
        CHECK_THROWS(load_instances(dir / "bad.csv"));
    }
}
