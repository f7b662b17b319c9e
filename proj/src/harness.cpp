#include "smip/harness.hpp"

#include "smip/csv.hpp"
#include "smip/oracles.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iostream>
#include <map>
#include <mutex>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace smip {

namespace {

std::uint64_t splitmix(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0)
{
    return splitmix(splitmix(splitmix(base ^ splitmix(a)) ^ b) ^ c);
}

nlohmann::json synth_to_json(const SynthConfig& s)
{
    return {{"n", s.n},
            {"fraud_ratio", s.fraud_ratio},
            {"avg_amount", s.avg_amount},
            {"seed", s.seed},
            {"separation", s.separation},
            {"amount_sigma", s.amount_sigma}};
}

SynthConfig synth_from_json(const nlohmann::json& j, const std::string& name)
{
    SynthConfig s;
    s.name = name;
    s.n = j.at("n").get<std::size_t>();
    s.fraud_ratio = j.at("fraud_ratio").get<double>();
    s.avg_amount = j.at("avg_amount").get<double>();
    s.seed = j.value("seed", std::uint64_t{0});
    s.separation = j.value("separation", s.separation);
    s.amount_sigma = j.value("amount_sigma", s.amount_sigma);
    return s;
}

Dataset resolve(const DatasetRef& ref)
{
    Dataset ds;
    if (ref.synth) {
        ds = synth_transactions(*ref.synth);
        if (ref.label_flip)
            for (auto& v : ds.y)
                v = 1 - v;
    } else if (ref.path) {
        ds = load_with_schema(*ref.path, ref.label_flip);
    } else {
        throw std::invalid_argument("dataset " + ref.name + " has neither path nor synth");
    }
    ds.name = ref.name;
    return ds;
}

std::vector<LabeledInstance> make_instances(const Dataset& ds, std::span<const std::size_t> idx,
                                            const std::vector<UncertaintyEstimate>& est)
{
    std::vector<LabeledInstance> out;
    out.reserve(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) {
        LabeledInstance inst;
        inst.id = idx[k];
        inst.est = est[k];
        inst.y = ds.y[idx[k]];
        if (ds.values)
            inst.value = (*ds.values)[idx[k]];
        out.push_back(inst);
    }
    return out;
}

std::vector<int> labels_of(const Dataset& ds, std::span<const std::size_t> idx)
{
    std::vector<int> y;
    y.reserve(idx.size());
    for (auto i : idx)
        y.push_back(ds.y[i]);
    return y;
}

std::string num(double v)
{
    return format_double(v);
}

double parse_field(const std::string& s)
{
    if (s == "nan")
        return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf")
        return std::numeric_limits<double>::infinity();
    if (s == "-inf")
        return -std::numeric_limits<double>::infinity();
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size())
        throw std::runtime_error("not a number: '" + s + "'");
    return v;
}


bool partition_ok(std::span<const Decision> d, std::size_t m)
{
    if (d.size() != m)
        return false;
    for (const auto& x : d)
        if (x.kind != DecisionKind::Positive && x.kind != DecisionKind::Negative && x.kind != DecisionKind::Reject)
            return false;
    return true;
}

} // namespace

void ExperimentConfig::validate() const
{
    if (datasets.empty())
        throw std::invalid_argument("config: no datasets");
    if (repeats < 1)
        throw std::invalid_argument("config: repeats must be >= 1");
    if (rcap_fractions.empty())
        throw std::invalid_argument("config: no rCap fractions");
    for (double f : rcap_fractions)
        if (!(f > 0.0 && f <= 1.0))
            throw std::invalid_argument("config: rCap fractions must lie in (0, 1]");
    if (T < 1)
        throw std::invalid_argument("config: T must be >= 1");
    if (methods.empty())
        throw std::invalid_argument("config: no methods");
    for (const auto& m : methods)
        if (m != "mipsc" && m != "mipcsc")
            (void)baseline_from_string(m);
    train.validate();
    cost_model.validate();
}

nlohmann::json ExperimentConfig::to_json() const
{
    nlohmann::json ds = nlohmann::json::array();
    for (const auto& d : datasets) {
        nlohmann::json e{{"name", d.name}, {"label_flip", d.label_flip}};
        if (d.path)
            e["path"] = d.path->string();
        if (d.synth)
            e["synth"] = synth_to_json(*d.synth);
        ds.push_back(e);
    }
    return {{"name", name},
            {"datasets", ds},
            {"split_ratios", split_ratios},
            {"dropout_grid", dropout_grid},
            {"l2_grid", l2_grid},
            {"train",
             {{"epochs", train.epochs},
              {"learning_rate", train.learning_rate},
              {"batch_size", train.batch_size},
              {"hidden_width", train.hidden_width}}},
            {"T", T},
            {"rcap_fractions", rcap_fractions},
            {"repeats", repeats},
            {"seed", seed},
            {"methods", methods},
            {"cost_model",
             {{"w_tp", cost_model.w_tp},
              {"w_tn", cost_model.w_tn},
              {"w_fn", cost_model.w_fn},
              {"w_fp", cost_model.w_fp},
              {"c", cost_model.c}}},
            {"coarsen_to", coarsen_to ? nlohmann::json(*coarsen_to) : nlohmann::json(nullptr)},
            {"output_dir", output_dir.string()}};
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j, const std::filesystem::path& base_dir)
{
    ExperimentConfig c;
    c.name = j.value("name", c.name);
    for (const auto& d : j.at("datasets")) {
        DatasetRef ref;
        ref.name = d.at("name").get<std::string>();
        ref.label_flip = d.value("label_flip", false);
        if (d.contains("path")) {
            std::filesystem::path p = d["path"].get<std::string>();
            ref.path = p.is_absolute() || base_dir.empty() ? p : base_dir / p;
        }
        if (d.contains("synth"))
            ref.synth = synth_from_json(d["synth"], ref.name);
        c.datasets.push_back(ref);
    }
    if (j.contains("split_ratios"))
        c.split_ratios = j["split_ratios"].get<std::array<double, 4>>();
    c.dropout_grid = j.value("dropout_grid", c.dropout_grid);
    c.l2_grid = j.value("l2_grid", c.l2_grid);
    if (j.contains("train")) {
        const auto& t = j["train"];
        c.train.epochs = t.value("epochs", c.train.epochs);
        c.train.learning_rate = t.value("learning_rate", c.train.learning_rate);
        c.train.batch_size = t.value("batch_size", c.train.batch_size);
        c.train.hidden_width = t.value("hidden_width", c.train.hidden_width);
    }
    c.T = j.value("T", c.T);
    c.rcap_fractions = j.value("rcap_fractions", c.rcap_fractions);
    c.repeats = j.value("repeats", c.repeats);
    c.seed = j.value("seed", c.seed);
    c.threads = j.value("threads", c.threads);
    c.methods = j.value("methods", c.methods);
    if (j.contains("cost_model")) {
        const auto& m = j["cost_model"];
        c.cost_model.w_tp = m.value("w_tp", c.cost_model.w_tp);
        c.cost_model.w_tn = m.value("w_tn", c.cost_model.w_tn);
        c.cost_model.w_fn = m.value("w_fn", c.cost_model.w_fn);
        c.cost_model.w_fp = m.value("w_fp", c.cost_model.w_fp);
        c.cost_model.c = m.value("c", c.cost_model.c);
    }
    if (j.contains("coarsen_to"))
        c.coarsen_to = j["coarsen_to"].is_null() ? std::nullopt
                                                 : std::optional<std::size_t>(j["coarsen_to"].get<std::size_t>());
    if (j.contains("output_dir")) {
        std::filesystem::path p = j["output_dir"].get<std::string>();
        c.output_dir = p.is_absolute() || base_dir.empty() ? p : base_dir / p;
    }
    c.validate();
    return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path)
{
    return from_json(nlohmann::json::parse(read_file(path)), path.parent_path());
}

std::size_t rcap_count(double fraction, std::size_t split_size)
{
    if (!(fraction >= 0.0 && fraction <= 1.0))
        throw std::invalid_argument("rcap_count: fraction must lie in [0, 1]");
    // Nudge up so that e.g. 0.15 * 20 yields 3 rather than 2.999...
    const double exact = fraction * static_cast<double>(split_size);
    return std::min(split_size, static_cast<std::size_t>(std::floor(exact + 1e-9)));
}

std::size_t enforce_capacity(std::vector<Decision>& decisions, std::span<const LabeledInstance> instances,
                             const ThresholdSolution& th, std::span<const double> priority, std::size_t rcap)
{
    if (decisions.size() != instances.size() || priority.size() != instances.size())
        throw std::invalid_argument("enforce_capacity: inputs differ in length");
    std::vector<std::size_t> rejected;
    for (std::size_t i = 0; i < decisions.size(); ++i)
        if (decisions[i].rejected())
            rejected.push_back(i);
    if (rejected.size() <= rcap)
        return 0;
    std::stable_sort(rejected.begin(), rejected.end(),
                     [&](std::size_t a, std::size_t b) { return priority[a] < priority[b]; });
    const std::size_t surplus = rejected.size() - rcap;
    for (std::size_t k = 0; k < surplus; ++k) {
        const std::size_t i = rejected[k];
        const auto kind = region_polarity(assign_region(instances[i].est, th), instances[i].est.mu);
        decisions[i] = kind == DecisionKind::Positive ? Decision::positive() : Decision::negative();
    }
    return surplus;
}

namespace {

struct RepeatOutcome {
    std::vector<ResultRow> rows;
    std::optional<std::string> error;
    std::vector<std::string> violations;
};

bool disjoint_splits(const FourWaySplit& s, std::size_t n)
{
    std::vector<int> seen(n, 0);
    for (int k = 0; k < 4; ++k)
        for (auto i : s.part(k)) {
            if (i >= n || seen[i])
                return false;
            seen[i] = 1;
        }
    return true;
}

RepeatOutcome run_repeat(const ExperimentConfig& cfg, const DatasetRef& ref, const Dataset& ds, std::size_t rep)
{
    RepeatOutcome out;
    auto check = [&](bool ok, const std::string& what) {
        if (!ok)
            out.violations.push_back(what);
    };
    try {
        const auto split = split4(ds, cfg.split_ratios, cfg.seed + rep);
        check(disjoint_splits(split, ds.size()), ref.name + " repeat " + std::to_string(rep) + ": split index sets overlap");
        const auto stdz = Standardizer::fit(ds.X, split.dnn_train);
        const Matrix Xtr = stdz.apply(ds.X, split.dnn_train);
        const Matrix Xva = stdz.apply(ds.X, split.dnn_val);
        const Matrix Xmip = stdz.apply(ds.X, split.mip_train);
        const Matrix Xte = stdz.apply(ds.X, split.test);
        const auto ytr = labels_of(ds, split.dnn_train);
        const auto yva = labels_of(ds, split.dnn_val);
        const auto ymip = labels_of(ds, split.mip_train);

        TrainConfig base = cfg.train;
        base.seed = derive(cfg.seed + rep, 2);
        const auto gs = grid_search(Xtr, ytr, Xva, yva, cfg.dropout_grid, cfg.l2_grid, base);
        const double rate = gs.best.dropout_rate;
        const auto est_mip = mc_predict_all(gs.params, Xmip, rate, MCConfig{cfg.T, derive(cfg.seed + rep, 3)});
        const auto est_te = mc_predict_all(gs.params, Xte, rate, MCConfig{cfg.T, derive(cfg.seed + rep, 4)});
        const double rho = accuracy(gs.params, Xmip, ymip);
        const auto train_set = make_instances(ds, split.mip_train, est_mip);
        const auto test_set = make_instances(ds, split.test, est_te);
        const std::size_t ones = static_cast<std::size_t>(std::count(ytr.begin(), ytr.end(), 1));
        const int majority = ones * 2 > ytr.size() ? 1 : 0;

        std::optional<double> oracle, major;
        if (ds.values) {
            oracle = oracle_profit(test_set, cfg.cost_model);
            major = majority_profit(test_set, majority, cfg.cost_model);
        }
        std::vector<double> sigma_pri, value_pri;
        for (const auto& inst : test_set) {
            sigma_pri.push_back(inst.est.sigma);
            value_pri.push_back(inst.value.value_or(0.0));
        }

        for (std::size_t f = 0; f < cfg.rcap_fractions.size(); ++f) {
            const double frac = cfg.rcap_fractions[f];
            const std::size_t rcap_tr = rcap_count(frac, train_set.size());
            const std::size_t rcap_te = rcap_count(frac, test_set.size());
            for (const auto& method : cfg.methods) {
                const bool wants_values =
                    method == "mipcsc" || (method != "mipsc" && needs_values(baseline_from_string(method)));
                if (wants_values && !ds.values)
                    continue;
                ResultRow row;
                row.dataset = ref.name;
                row.method = method;
                row.rcap_fraction = frac;
                row.rcap_train = rcap_tr;
                row.rcap_test = rcap_te;
                row.repeat = rep;
                const std::string where = ref.name + " repeat " + std::to_string(rep) + " " + method +
                                          " rCap " + num(frac);
                std::vector<Decision> dec;
                std::vector<DecisionKind> cf;
                if (method == "mipsc" || method == "mipcsc") {
                    SolverConfig sc{rcap_tr, rho, cfg.coarsen_to};
                    ThresholdSolution th;
                    if (method == "mipsc") {
                        const auto sol = solve_mipsc(train_set, sc);
                        th = sol.thresholds;
                        check(sol.rejections <= rcap_tr && partition_ok(sol.decisions, train_set.size()),
                                    where + ": training solution violates capacity or partition");
                        dec = decide_all_mipsc(test_set, th);
                        row.released = enforce_capacity(dec, test_set, th, sigma_pri, rcap_te);
                    } else {
                        const auto sol = solve_mipcsc(train_set, sc, cfg.cost_model);
                        th = sol.thresholds;
                        check(sol.rejections <= rcap_tr && partition_ok(sol.decisions, train_set.size()),
                                    where + ": training solution violates capacity or partition");
                        dec = decide_all_mipcsc(test_set, th, sol.value_thresholds);
                        row.released = enforce_capacity(dec, test_set, th, value_pri, rcap_te);
                    }
                    check(th.disjoint(), where + ": thresholds overlap");
                    cf = region_counterfactual(test_set, th);
                    check(count_rejections(dec) <= rcap_te, where + ": test decisions exceed capacity");
                } else {
                    const auto kind = baseline_from_string(method);
                    dec = baseline_decide(kind, test_set, rcap_te, derive(cfg.seed + rep, 5, f));
                    cf = mean_cut_counterfactual(test_set);
                    check(count_rejections(dec) == std::min(rcap_te, test_set.size()),
                                where + ": baseline rejection count differs from capacity");
                }
                check(partition_ok(dec, test_set.size()), where + ": partition violated");
                row.rejections = count_rejections(dec);
                row.counts = confusion_counts(dec, test_set, cf);
                check(row.counts.total() == test_set.size(), where + ": counts do not cover the split");
                row.metrics = reject_metrics(row.counts);
                if (ds.values) {
                    row.profit = profit_of(dec, test_set, cfg.cost_model);
                    row.profit_gain = profit_gain(ProfitTriple{row.profit, *oracle, *major});
                }
                out.rows.push_back(row);
            }
        }
    } catch (const std::exception& e) {
        out.rows.clear();
        out.error = e.what();
    }
    return out;
}

} // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg)
{
    cfg.validate();
    ExperimentResult res;

    std::vector<std::optional<Dataset>> loaded(cfg.datasets.size());
    std::vector<std::string> load_errors(cfg.datasets.size());
    for (std::size_t d = 0; d < cfg.datasets.size(); ++d) {
        try {
            loaded[d] = resolve(cfg.datasets[d]);
        } catch (const std::exception& e) {
            load_errors[d] = e.what();
        }
    }

    std::vector<std::pair<std::size_t, std::size_t>> tasks;
    for (std::size_t d = 0; d < cfg.datasets.size(); ++d)
        if (loaded[d])
            for (std::size_t rep = 0; rep < cfg.repeats; ++rep)
                tasks.emplace_back(d, rep);
    std::vector<RepeatOutcome> outcomes(tasks.size());
    std::atomic<std::size_t> next{0};
    std::mutex log_mutex;
    auto worker = [&] {
        for (std::size_t k = next++; k < tasks.size(); k = next++) {
            const auto [d, rep] = tasks[k];
            {
                std::lock_guard lock(log_mutex);
                std::cerr << "[" << cfg.name << "] " << cfg.datasets[d].name << " repeat " << rep + 1 << "/"
                          << cfg.repeats << "\n";
            }
            outcomes[k] = run_repeat(cfg, cfg.datasets[d], *loaded[d], rep);
        }
    };
    const std::size_t n_threads = std::max<std::size_t>(1, std::min(cfg.threads, tasks.size()));
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < n_threads; ++t)
        pool.emplace_back(worker);
    worker();
    for (auto& t : pool)
        t.join();

    std::size_t k = 0;
    for (std::size_t d = 0; d < cfg.datasets.size(); ++d) {
        if (!loaded[d]) {
            res.failures.push_back({cfg.datasets[d].name, 0, "load: " + load_errors[d]});
            continue;
        }
        for (std::size_t rep = 0; rep < cfg.repeats; ++rep, ++k) {
            auto& o = outcomes[k];
            if (o.error)
                res.failures.push_back({cfg.datasets[d].name, rep, *o.error});
            res.invariant_violations += o.violations.size();
            for (auto& v : o.violations)
                if (res.violation_messages.size() < 50)
                    res.violation_messages.push_back(std::move(v));
            res.rows.insert(res.rows.end(), o.rows.begin(), o.rows.end());
        }
    }
    const auto agg = aggregate(res.rows);
    write_file_atomic(cfg.output_dir / "rows.csv", rows_csv(res.rows));
    write_file_atomic(cfg.output_dir / "aggregates.csv", aggregates_csv(agg));

    nlohmann::json aj = nlohmann::json::array();
    for (const auto& a : agg) {
        nlohmann::json e{{"dataset", a.dataset}, {"method", a.method}, {"rcap_fraction", a.rcap_fraction}, {"n", a.n}};
        for (std::size_t k = 0; k < metric_names.size(); ++k) {
            e[std::string(metric_names[k]) + "_mean"] = num(a.mean[k]);
            e[std::string(metric_names[k]) + "_sd"] = num(a.sd[k]);
        }
        aj.push_back(e);
    }
    // Paths relative to the output directory so results do not depend on where they were written.
    auto echo = cfg.to_json();
    echo.erase("output_dir");
    for (auto& d : echo["datasets"])
        if (d.contains("path"))
            d["path"] = std::filesystem::path(d["path"].get<std::string>())
                            .lexically_normal()
                            .lexically_relative(cfg.output_dir.lexically_normal())
                            .generic_string();
    nlohmann::json summary{{"config", echo},
                           {"aggregates", aj},
                           {"failures", res.failures.size()},
                           {"invariant_violations", res.invariant_violations}};
    write_file_atomic(cfg.output_dir / "aggregates.json", summary.dump(2) + "\n");

    std::ostringstream fs;
    fs << "dataset,repeat,message\n";
    for (const auto& f : res.failures)
        fs << join_csv({f.dataset, std::to_string(f.repeat), f.message}) << '\n';
    write_file_atomic(cfg.output_dir / "failures.csv", fs.str());
    return res;
}

std::vector<AggregateRow> aggregate(const std::vector<ResultRow>& rows)
{
    std::vector<AggregateRow> out;
    std::map<std::tuple<std::string, std::string, double>, std::size_t> index;
    std::vector<std::array<std::vector<double>, 4>> samples;
    for (const auto& r : rows) {
        const auto key = std::make_tuple(r.dataset, r.method, r.rcap_fraction);
        auto it = index.find(key);
        if (it == index.end()) {
            it = index.emplace(key, out.size()).first;
            AggregateRow a;
            a.dataset = r.dataset;
            a.method = r.method;
            a.rcap_fraction = r.rcap_fraction;
            out.push_back(a);
            samples.emplace_back();
        }
        auto& a = out[it->second];
        ++a.n;
        const std::array<double, 4> v{r.metrics.nra, r.metrics.cq, r.metrics.rq, r.profit_gain};
        for (std::size_t k = 0; k < 4; ++k)
            if (!std::isnan(v[k]))
                samples[it->second][k].push_back(v[k]);
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        for (std::size_t k = 0; k < 4; ++k) {
            const auto& s = samples[i][k];
            if (s.empty()) {
                out[i].mean[k] = out[i].sd[k] = std::numeric_limits<double>::quiet_NaN();
                continue;
            }
            double sum = 0.0;
            for (double x : s)
                sum += x;
            const double mean = sum / static_cast<double>(s.size());
            double sq = 0.0;
            for (double x : s)
                sq += (x - mean) * (x - mean);
            out[i].mean[k] = mean;
            out[i].sd[k] = s.size() > 1 ? std::sqrt(sq / static_cast<double>(s.size() - 1)) : 0.0;
            if (std::isinf(mean))
                out[i].sd[k] = std::numeric_limits<double>::quiet_NaN();
        }
    }
    return out;
}

std::string rows_csv(const std::vector<ResultRow>& rows)
{
    std::ostringstream os;
    os << "dataset,method,rcap_fraction,rcap_train,rcap_test,repeat,rejections,released,c,c_bar,r,r_bar,"
          "nra,cq,rq,profit,profit_gain\n";
    for (const auto& r : rows) {
        os << csv_field(r.dataset) << ',' << csv_field(r.method) << ',' << num(r.rcap_fraction) << ','
           << r.rcap_train << ',' << r.rcap_test << ',' << r.repeat << ',' << r.rejections << ',' << r.released
           << ',' << r.counts.c << ',' << r.counts.c_bar << ',' << r.counts.r << ',' << r.counts.r_bar << ','
           << num(r.metrics.nra) << ',' << num(r.metrics.cq) << ',' << num(r.metrics.rq) << ',' << num(r.profit)
           << ',' << num(r.profit_gain) << '\n';
    }
    return os.str();
}

std::string aggregates_csv(const std::vector<AggregateRow>& agg)
{
    std::ostringstream os;
    os << "dataset,method,rcap_fraction,n";
    for (const char* m : metric_names)
        os << ',' << m << "_mean," << m << "_sd";
    os << '\n';
    for (const auto& a : agg) {
        os << csv_field(a.dataset) << ',' << csv_field(a.method) << ',' << num(a.rcap_fraction) << ',' << a.n;
        for (std::size_t k = 0; k < 4; ++k)
            os << ',' << num(a.mean[k]) << ',' << num(a.sd[k]);
        os << '\n';
    }
    return os.str();
}

std::vector<std::filesystem::path> report(const std::filesystem::path& results_dir)
{
    const auto path = results_dir / "aggregates.csv";
    if (!std::filesystem::exists(path))
        throw std::runtime_error("report: " + path.string() + " not found");
    const auto rows = read_csv_file(path);
    if (rows.size() < 2)
        throw std::runtime_error("report: " + path.string() + " has no results");
    const auto& header = rows.front();
    auto col = [&](const std::string& name) {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end())
            throw std::runtime_error("report: column " + name + " missing in " + path.string());
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t c_ds = col("dataset"), c_m = col("method"), c_f = col("rcap_fraction");

    std::vector<std::string> datasets;
    std::map<std::string, std::vector<std::string>> methods;
    std::map<std::string, std::vector<double>> fractions;
    std::map<std::tuple<std::string, std::string, double>, const CsvRow*> cell;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        const auto& ds = row.at(c_ds);
        const auto& m = row.at(c_m);
        const double f = parse_field(row.at(c_f));
        if (std::find(datasets.begin(), datasets.end(), ds) == datasets.end())
            datasets.push_back(ds);
        auto& ms = methods[ds];
        if (std::find(ms.begin(), ms.end(), m) == ms.end())
            ms.push_back(m);
        auto& fs = fractions[ds];
        if (std::find(fs.begin(), fs.end(), f) == fs.end())
            fs.push_back(f);
        cell[{ds, m, f}] = &row;
    }

    std::vector<std::filesystem::path> written;
    const auto out_dir = results_dir / "report";
    for (const auto& ds : datasets) {
        auto fs = fractions[ds];
        std::sort(fs.begin(), fs.end());
        for (const char* metric : metric_names) {
            const std::size_t c_mean = col(std::string(metric) + "_mean");
            const std::size_t c_sd = col(std::string(metric) + "_sd");
            bool any = false;
            std::ostringstream os;
            os << "rcap";
            for (const auto& m : methods[ds])
                os << ',' << csv_field(m + "_mean") << ',' << csv_field(m + "_sd");
            os << '\n';
            for (double f : fs) {
                os << num(f);
                for (const auto& m : methods[ds]) {
                    auto it = cell.find({ds, m, f});
                    if (it == cell.end()) {
                        os << ",nan,nan";
                        continue;
                    }
                    const auto& mean = it->second->at(c_mean);
                    any = any || mean != "nan";
                    os << ',' << mean << ',' << it->second->at(c_sd);
                }
                os << '\n';
            }
            if (!any)
                continue;
            const auto file = out_dir / (ds + "_" + metric + ".csv");
            write_file_atomic(file, os.str());
            written.push_back(file);
        }
    }
    return written;
}

VerifyReport verify_mipsc(std::size_t trials, std::size_t min_m, std::size_t max_m, std::uint64_t seed,
                          const MipscObjective& solver)
{
    if (min_m < 1 || min_m > max_m || max_m > mipsc_oracle_max_m)
        throw std::invalid_argument("verify_mipsc: sizes must satisfy 1 <= min <= max <= " +
                                    std::to_string(mipsc_oracle_max_m));
    const auto t0 = std::chrono::steady_clock::now();
    VerifyReport rep;
    std::mt19937_64 rng(seed);
    for (std::size_t t = 0; t < trials; ++t) {
        const std::size_t m = min_m + rng() % (max_m - min_m + 1);
        const auto inst = random_instances(rng(), m, false);
        SolverConfig cfg;
        cfg.rcap = rng() % (m + 1);
        cfg.rho = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        const double got = solver ? solver(inst, cfg) : solve_mipsc(inst, cfg).objective;
        const double want = brute_force_mipsc(inst, cfg).objective;
        ++rep.trials;
        if (got != want) {
            rep.passed = false;
            std::ostringstream os;
            os.precision(17);
            os << "trial " << t << ": m=" << m << " rCap=" << cfg.rcap << " rho=" << cfg.rho << " solver=" << got
               << " oracle=" << want << "\n"
               << instances_csv(inst);
            rep.counterexample = os.str();
            break;
        }
        ++rep.agreements;
    }
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

VerifyReport verify_mipcsc(std::size_t trials, std::size_t min_m, std::size_t max_m, std::uint64_t seed,
                           const CostModel& cm, const MipcscObjective& solver)
{
    if (min_m < 1 || min_m > max_m || max_m > mipcsc_oracle_max_m)
        throw std::invalid_argument("verify_mipcsc: sizes must satisfy 1 <= min <= max <= " +
                                    std::to_string(mipcsc_oracle_max_m));
    const auto t0 = std::chrono::steady_clock::now();
    VerifyReport rep;
    std::mt19937_64 rng(seed);
    for (std::size_t t = 0; t < trials; ++t) {
        const std::size_t m = min_m + rng() % (max_m - min_m + 1);
        const auto inst = random_instances(rng(), m, true);
        SolverConfig cfg;
        cfg.rcap = rng() % (m + 1);
        const double got = solver ? solver(inst, cfg, cm) : solve_mipcsc(inst, cfg, cm).objective;
        const double want = brute_force_mipcsc(inst, cfg, cm).objective;
        ++rep.trials;
        if (got != want) {
            rep.passed = false;
            std::ostringstream os;
            os.precision(17);
            os << "trial " << t << ": m=" << m << " rCap=" << cfg.rcap << " solver=" << got << " oracle=" << want
               << "\n"
               << instances_csv(inst);
            rep.counterexample = os.str();
            break;
        }
        ++rep.agreements;
    }
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

std::string instances_csv(std::span<const LabeledInstance> instances)
{
    std::ostringstream os;
    os << "instance_id,mu,sigma,y,value\n";
    for (const auto& i : instances)
        os << i.id << ',' << num(i.est.mu) << ',' << num(i.est.sigma) << ',' << i.y << ','
           << (i.value ? num(*i.value) : std::string()) << '\n';
    return os.str();
}

std::vector<LabeledInstance> load_instances(const std::filesystem::path& path)
{
    const auto rows = read_csv_file(path);
    if (rows.empty())
        throw std::runtime_error(path.string() + ": empty file");
    const auto& h = rows.front();
    auto col = [&](const std::string& name) -> std::optional<std::size_t> {
        auto it = std::find(h.begin(), h.end(), name);
        if (it == h.end())
            return std::nullopt;
        return static_cast<std::size_t>(it - h.begin());
    };
    const auto c_id = col("instance_id"), c_mu = col("mu"), c_sigma = col("sigma"), c_y = col("y"),
               c_v = col("value");
    if (!c_mu || !c_sigma || !c_y)
        throw std::runtime_error(path.string() + ": needs columns mu, sigma, y");
    std::vector<LabeledInstance> out;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        try {
            LabeledInstance inst;
            inst.id = c_id ? std::stoull(row.at(*c_id)) : r - 1;
            inst.est.mu = parse_field(row.at(*c_mu));
            inst.est.sigma = parse_field(row.at(*c_sigma));
            const double y = parse_field(row.at(*c_y));
            if (y != 0.0 && y != 1.0)
                throw std::runtime_error("label must be 0 or 1");
            inst.y = static_cast<int>(y);
            if (c_v && !row.at(*c_v).empty())
                inst.value = parse_field(row.at(*c_v));
            out.push_back(inst);
        } catch (const std::exception& e) {
            throw std::runtime_error(path.string() + " row " + std::to_string(r) + ": " + e.what());
        }
    }
    return out;
}

nlohmann::json to_json(const ThresholdSolution& th)
{
    return {{"mu_L", th.mu_L}, {"mu_R", th.mu_R}, {"sigma_L", th.sigma_L}, {"sigma_R", th.sigma_R}};
}

nlohmann::json to_json(const ValueThresholds& vt)
{
    return {{"t_DL", vt.t_DL}, {"t_UL", vt.t_UL}, {"t_M", vt.t_M}, {"t_DR", vt.t_DR}, {"t_UR", vt.t_UR}};
}

} // namespace smip
