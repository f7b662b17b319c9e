#include "smip/csv.hpp"
#include "smip/fetch.hpp"
#include "smip/harness.hpp"
#include "smip/oracles.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace smip;

namespace {

int cmd_fetch(const fs::path& manifest, const fs::path& out)
{
    const auto written = fetch_uci(manifest, out);
    for (const auto& p : written)
        std::cout << p.string() << '\n';
    return 0;
}

int cmd_synth(SynthConfig cfg, const fs::path& out)
{
    cfg.validate();
    auto ds = synth_transactions(cfg);
    write_dataset(ds, out);
    std::size_t fraud = 0;
    for (int y : ds.y)
        fraud += static_cast<std::size_t>(y);
    std::cout << out.string() << ": " << ds.size() << " rows, " << fraud << " positive\n";
    return 0;
}

struct TrainArgs {
    fs::path data;
    fs::path out = "train_out";
    bool label_flip = false;
    std::uint64_t seed = 1;
    std::size_t T = 100;
    std::size_t epochs = 200;
    std::vector<double> dropout_grid = default_dropout_grid;
    std::vector<double> l2_grid = default_l2_grid;
};

int cmd_train(const TrainArgs& a)
{
    const auto ds = load_with_schema(a.data, a.label_flip);
    const auto split = split4(ds, {0.4, 0.2, 0.2, 0.2}, a.seed);
    const auto stdz = Standardizer::fit(ds.X, split.dnn_train);
    auto labels = [&](const std::vector<std::size_t>& idx) {
        std::vector<int> y;
        for (auto i : idx)
            y.push_back(ds.y[i]);
        return y;
    };
    TrainConfig base;
    base.epochs = a.epochs;
    base.seed = a.seed;
    const auto gs = grid_search(stdz.apply(ds.X, split.dnn_train), labels(split.dnn_train),
                                stdz.apply(ds.X, split.dnn_val), labels(split.dnn_val), a.dropout_grid,
                                a.l2_grid, base);
    const double rate = gs.best.dropout_rate;
    const Matrix Xmip = stdz.apply(ds.X, split.mip_train);
    const Matrix Xte = stdz.apply(ds.X, split.test);

    auto instances = [&](const std::vector<std::size_t>& idx, const std::vector<UncertaintyEstimate>& est) {
        std::vector<LabeledInstance> out;
        for (std::size_t k = 0; k < idx.size(); ++k) {
            LabeledInstance inst{idx[k], est[k], ds.y[idx[k]], std::nullopt};
            if (ds.values)
                inst.value = (*ds.values)[idx[k]];
            out.push_back(inst);
        }
        return out;
    };
    std::vector<std::vector<double>> raw;
    const auto est_mip = mc_predict_all(gs.params, Xmip, rate, MCConfig{a.T, a.seed + 1});
    const auto est_te = mc_predict_all(gs.params, Xte, rate, MCConfig{a.T, a.seed + 2}, &raw);
    write_file_atomic(a.out / "mip_train.csv", instances_csv(instances(split.mip_train, est_mip)));
    write_file_atomic(a.out / "test.csv", instances_csv(instances(split.test, est_te)));
    std::ostringstream samples;
    write_mc_samples_csv(samples, split.test, raw);
    write_file_atomic(a.out / "mc_samples_test.csv", samples.str());
    write_file_atomic(a.out / "model.json", gs.params.to_json().dump() + "\n");

    std::ostringstream grid;
    grid << "dropout_rate,l2_coeff,val_accuracy,failed\n";
    for (const auto& c : gs.cells)
        grid << format_double(c.dropout_rate) << ',' << format_double(c.l2_coeff) << ','
             << format_double(c.val_accuracy) << ',' << (c.failed ? 1 : 0) << '\n';
    write_file_atomic(a.out / "grid.csv", grid.str());

    const double rho = accuracy(gs.params, Xmip, labels(split.mip_train));
    nlohmann::json summary{{"dropout_rate", rate},
                           {"l2_coeff", gs.best.l2_coeff},
                           {"val_accuracy", gs.val_accuracy},
                           {"rho", rho},
                           {"T", a.T},
                           {"seed", a.seed}};
    write_file_atomic(a.out / "summary.json", summary.dump(2) + "\n");
    std::cout << summary.dump() << '\n';
    return 0;
}

struct SolveArgs {
    fs::path instances;
    std::string subject = "mipsc";
    std::optional<std::size_t> rcap;
    std::optional<double> rcap_fraction;
    double rho = 1.0;
    std::optional<std::size_t> coarsen_to;
    fs::path out = "solve_out";
    double big_M = 1e4;
    double epsilon = 1e-6;
};

SolverConfig solver_config(const SolveArgs& a, std::size_t m)
{
    SolverConfig cfg;
    if (a.rcap)
        cfg.rcap = *a.rcap;
    else if (a.rcap_fraction)
        cfg.rcap = rcap_count(*a.rcap_fraction, m);
    cfg.rho = a.rho;
    cfg.coarsen_to = a.coarsen_to;
    cfg.validate(m);
    return cfg;
}

int cmd_solve(const SolveArgs& a)
{
    const auto inst = load_instances(a.instances);
    const auto cfg = solver_config(a, inst.size());
    nlohmann::json out{{"subject", a.subject}, {"m", inst.size()}, {"rcap", cfg.rcap}};
    std::vector<Decision> decisions;
    std::vector<Region> regions;
    if (a.subject == "mipsc") {
        const auto sol = solve_mipsc(inst, cfg);
        out["thresholds"] = to_json(sol.thresholds);
        out["objective"] = sol.objective;
        out["mistakes"] = sol.mistakes;
        out["rejections"] = sol.rejections;
        out["rho"] = cfg.rho;
        decisions = sol.decisions;
        for (const auto& i : inst)
            regions.push_back(assign_region(i.est, sol.thresholds));
    } else if (a.subject == "mipcsc") {
        const auto sol = solve_mipcsc(inst, cfg, CostModel{});
        out["thresholds"] = to_json(sol.thresholds);
        out["value_thresholds"] = to_json(sol.value_thresholds);
        out["objective"] = sol.objective;
        out["rejections"] = sol.rejections;
        decisions = sol.decisions;
        for (const auto& i : inst)
            regions.push_back(assign_region(i.est, sol.thresholds));
    } else {
        throw CLI::ValidationError("--subject", "must be mipsc or mipcsc");
    }
    std::ostringstream dec;
    write_decisions_csv(dec, inst, decisions, regions);
    write_file_atomic(a.out / "decisions.csv", dec.str());
    write_file_atomic(a.out / "solution.json", out.dump(2) + "\n");
    std::cout << out.dump() << '\n';
    return 0;
}

int cmd_export_lp(const SolveArgs& a)
{
    const auto inst = load_instances(a.instances);
    const auto cfg = solver_config(a, inst.size());
    const LpExportConfig lp{a.big_M, a.epsilon};
    std::string text;
    if (a.subject == "mipsc")
        text = export_mipsc_lp(inst, cfg, lp);
    else if (a.subject == "mipcsc")
        text = export_mipcsc_lp(inst, cfg, CostModel{}, lp);
    else
        throw CLI::ValidationError("--subject", "must be mipsc or mipcsc");
    if (a.out == "-")
        std::cout << text;
    else
        write_file_atomic(a.out, text);
    return 0;
}

int cmd_verify(const std::string& subject, std::size_t trials, std::size_t min_m, std::size_t max_m,
               std::uint64_t seed)
{
    VerifyReport rep;
    if (subject == "mipsc")
        rep = verify_mipsc(trials, min_m, max_m, seed);
    else if (subject == "mipcsc")
        rep = verify_mipcsc(trials, min_m, max_m, seed);
    else
        throw CLI::ValidationError("subject", "must be mipsc or mipcsc");
    std::cout << subject << ": " << rep.agreements << "/" << rep.trials << " trials agree ("
              << format_double(rep.seconds) << " s)\n";
    if (!rep.passed) {
        std::cout << "FAIL counterexample:\n" << rep.counterexample;
        return 1;
    }
    std::cout << "PASS\n";
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Selective classification with learned rejection thresholds"};
    app.require_subcommand(1);

    fs::path manifest = "data/uci/manifest.json", fetch_out = "data/uci";
    auto* fetch = app.add_subcommand("fetch-data", "Download and convert the benchmark datasets");
    fetch->add_option("--manifest", manifest)->check(CLI::ExistingFile);
    fetch->add_option("--out", fetch_out);

    SynthConfig synth;
    fs::path synth_out = "synthetic.csv";
    auto* syn = app.add_subcommand("synth", "Generate a synthetic transaction dataset");
    syn->add_option("--n", synth.n);
    syn->add_option("--fraud-ratio", synth.fraud_ratio);
    syn->add_option("--avg-amount", synth.avg_amount);
    syn->add_option("--separation", synth.separation);
    syn->add_option("--amount-sigma", synth.amount_sigma);
    syn->add_option("--seed", synth.seed);
    syn->add_option("--name", synth.name);
    syn->add_option("--out", synth_out);

    TrainArgs ta;
    auto* train_cmd = app.add_subcommand("train", "Train the network and write MC dropout estimates");
    train_cmd->add_option("--data", ta.data, "CSV with a sibling .schema.json")->required()->check(CLI::ExistingFile);
    train_cmd->add_option("--out", ta.out);
    train_cmd->add_option("--seed", ta.seed);
    train_cmd->add_option("--T", ta.T)->check(CLI::PositiveNumber);
    train_cmd->add_option("--epochs", ta.epochs)->check(CLI::PositiveNumber);
    train_cmd->add_option("--dropout-grid", ta.dropout_grid)->delimiter(',');
    train_cmd->add_option("--l2-grid", ta.l2_grid)->delimiter(',');
    train_cmd->add_flag("--label-flip", ta.label_flip);

    SolveArgs sa;
    auto add_solve_opts = [&](CLI::App* c) {
        c->add_option("--instances", sa.instances, "instance_id,mu,sigma,y,value CSV")
            ->required()
            ->check(CLI::ExistingFile);
        c->add_option("--subject", sa.subject)->check(CLI::IsMember({"mipsc", "mipcsc"}));
        auto* r = c->add_option("--rcap", sa.rcap, "rejection capacity as a count");
        c->add_option("--rcap-fraction", sa.rcap_fraction)->excludes(r);
        c->add_option("--rho", sa.rho);
        c->add_option("--coarsen-to", sa.coarsen_to);
        c->add_option("--out", sa.out);
    };
    auto* solve = app.add_subcommand("solve", "Learn thresholds on an instance file");
    add_solve_opts(solve);
    auto* lp = app.add_subcommand("export-lp", "Write the MIP in CPLEX LP format");
    add_solve_opts(lp);
    lp->add_option("--big-m", sa.big_M);
    lp->add_option("--epsilon", sa.epsilon);

    std::string v_subject = "mipsc";
    std::size_t v_trials = 200, v_min = 5, v_max = 20;
    std::uint64_t v_seed = 1;
    auto* verify = app.add_subcommand("verify", "Compare a solver against the brute-force oracle");
    verify->add_option("subject", v_subject)->check(CLI::IsMember({"mipsc", "mipcsc"}));
    verify->add_option("--trials", v_trials);
    verify->add_option("--min-m", v_min);
    verify->add_option("--max-m", v_max);
    verify->add_option("--seed", v_seed);

    fs::path config_path;
    std::optional<std::uint64_t> e_seed;
    std::optional<fs::path> e_out;
    std::optional<std::size_t> e_repeats, e_threads;
    std::vector<double> e_rcap;
    auto* exp = app.add_subcommand("experiment", "Run the full protocol from a JSON config");
    exp->add_option("--config", config_path)->required()->check(CLI::ExistingFile);
    exp->add_option("--seed", e_seed);
    exp->add_option("--out", e_out);
    exp->add_option("--repeats", e_repeats);
    exp->add_option("--rcap", e_rcap, "comma-separated rCap fractions")->delimiter(',');
    exp->add_option("--threads", e_threads);

    fs::path results_dir = "results";
    auto* rep = app.add_subcommand("report", "Write plot-ready CSVs from experiment aggregates");
    rep->add_option("--results", results_dir);

    CLI11_PARSE(app, argc, argv);

    try {
        if (fetch->parsed())
            return cmd_fetch(manifest, fetch_out);
        if (syn->parsed())
            return cmd_synth(synth, synth_out);
        if (train_cmd->parsed())
            return cmd_train(ta);
        if (solve->parsed())
            return cmd_solve(sa);
        if (lp->parsed()) {
            if (sa.out == "solve_out")
                sa.out = "-";
            return cmd_export_lp(sa);
        }
        if (verify->parsed())
            return cmd_verify(v_subject, v_trials, v_min, v_max, v_seed);
        if (exp->parsed()) {
            auto cfg = ExperimentConfig::load(config_path);
            if (e_seed)
                cfg.seed = *e_seed;
            if (e_out)
                cfg.output_dir = *e_out;
            if (e_repeats)
                cfg.repeats = *e_repeats;
            if (e_threads)
                cfg.threads = *e_threads;
            if (!e_rcap.empty())
                cfg.rcap_fractions = e_rcap;
            cfg.validate();
            const auto res = run_experiment(cfg);
            const auto written = report(cfg.output_dir);
            std::cout << res.rows.size() << " rows, " << res.failures.size() << " failed repeats, "
                      << res.invariant_violations << " invariant violations, " << written.size()
                      << " report files in " << cfg.output_dir.string() << '\n';
            for (const auto& f : res.failures)
                std::cerr << "failed: " << f.dataset << " repeat " << f.repeat << ": " << f.message << '\n';
            for (const auto& v : res.violation_messages)
                std::cerr << "violation: " << v << '\n';
            return res.failures.empty() && res.invariant_violations == 0 ? 0 : 1;
        }
        if (rep->parsed()) {
            for (const auto& p : report(results_dir))
                std::cout << p.string() << '\n';
            return 0;
        }
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
