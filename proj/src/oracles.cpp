#include "smip/oracles.hpp"

#include <array>
#include <cmath>
#include <random>
#include <stdexcept>

namespace smip {

OracleResult brute_force_mipsc(std::span<const LabeledInstance> instances, const SolverConfig& cfg,
                               bool force)
{
    const std::size_t m = instances.size();
    if (m == 0)
        throw std::invalid_argument("brute_force_mipsc: no instances");
    if (m > mipsc_oracle_max_m && !force)
        throw std::invalid_argument("brute_force_mipsc: m = " + std::to_string(m) + " exceeds guard " +
                                    std::to_string(mipsc_oracle_max_m));
    cfg.validate(m);

    std::vector<double> mus, sigmas;
    std::vector<int> labels;
    for (const auto& inst : instances) {
        mus.push_back(inst.est.mu);
        sigmas.push_back(inst.est.sigma);
        labels.push_back(inst.y);
    }
    const auto mc = candidate_cuts(mus);
    const auto sc = candidate_cuts(sigmas);

    OracleResult best;
    bool found = false;
    for (double cl : mc)
        for (double cr : mc)
            for (double sl : sc)
                for (double sr : sc) {
                    ++best.exhaustive_count;
                    const auto th = ThresholdSolution::from_cuts(cl, cr, sl, sr);
                    if (!th.disjoint())
                        continue;
                    const auto dec = decide_all_mipsc(instances, th);
                    const std::size_t rej = count_rejections(dec);
                    if (rej > cfg.rcap)
                        continue;
                    const double obj = objective_mipsc(dec, labels, cfg.rho);
                    if (!found || obj < best.objective || (obj == best.objective && rej < best.rejections)) {
                        found = true;
                        best.objective = obj;
                        best.rejections = rej;
                        best.thresholds = th;
                    }
                }
    if (!found)
        throw std::logic_error("brute_force_mipsc: no feasible tuple");
    return best;
}

OracleResult brute_force_mipcsc(std::span<const LabeledInstance> instances, const SolverConfig& cfg,
                                const CostModel& cm, bool force)
{
    const std::size_t m = instances.size();
    if (m == 0)
        throw std::invalid_argument("brute_force_mipcsc: no instances");
    if (m > mipcsc_oracle_max_m && !force)
        throw std::invalid_argument("brute_force_mipcsc: m = " + std::to_string(m) + " exceeds guard " +
                                    std::to_string(mipcsc_oracle_max_m));
    cfg.validate(m);
    cm.validate();

    std::vector<double> mus, sigmas, ts;
    for (const auto& inst : instances) {
        if (!inst.value)
            throw std::invalid_argument("brute_force_mipcsc: instance without value");
        mus.push_back(inst.est.mu);
        sigmas.push_back(inst.est.sigma);
        ts.push_back(*inst.value);
    }
    const auto mc = candidate_cuts(mus);
    const auto sc = candidate_cuts(sigmas);
    const auto tc = candidate_cuts(ts);
    const std::size_t nt = tc.size();

    // Per region (A1..A5) and value cut: contribution and rejections.
    std::array<std::vector<Money>, 5> val;
    std::array<std::vector<std::size_t>, 5> rej;
    for (int r = 0; r < 5; ++r) {
        val[r].resize(nt);
        rej[r].resize(nt);
    }

    OracleResult best;
    Money best_v;
    bool found = false;
    for (double cl : mc)
        for (double cr : mc)
            for (double sl : sc)
                for (double sr : sc) {
                    const auto th = ThresholdSolution::from_cuts(cl, cr, sl, sr);
                    if (!th.disjoint()) {
                        best.exhaustive_count += nt * nt * nt * nt * nt;
                        continue;
                    }
                    for (int r = 0; r < 5; ++r)
                        for (std::size_t j = 0; j < nt; ++j) {
                            val[r][j] = Money{};
                            rej[r][j] = 0;
                        }
                    for (const auto& inst : instances) {
                        const int r = static_cast<int>(assign_region(inst.est, th)) - 1;
                        for (std::size_t j = 0; j < nt; ++j) {
                            const double t = tc[j];
                            const auto d = decide_mipcsc(inst, th, ValueThresholds{t, t, t, t, t});
                            val[r][j] += contribution(cm, d.kind, inst.y, *inst.value);
                            rej[r][j] += d.rejected() ? 1 : 0;
                        }
                    }
                    for (std::size_t a = 0; a < nt; ++a)
                        for (std::size_t b = 0; b < nt; ++b)
                            for (std::size_t c = 0; c < nt; ++c)
                                for (std::size_t d = 0; d < nt; ++d)
                                    for (std::size_t e = 0; e < nt; ++e) {
                                        ++best.exhaustive_count;
                                        const std::size_t k =
                                            rej[0][a] + rej[1][b] + rej[2][c] + rej[3][d] + rej[4][e];
                                        if (k > cfg.rcap)
                                            continue;
                                        const Money v =
                                            val[0][a] + val[1][b] + val[2][c] + val[3][d] + val[4][e];
                                        if (!found || v > best_v || (v == best_v && k < best.rejections)) {
                                            found = true;
                                            best_v = v;
                                            best.rejections = k;
                                            best.thresholds = th;
                                            best.value_thresholds =
                                                ValueThresholds{tc[a], tc[b], tc[c], tc[d], tc[e]};
                                        }
                                    }
                }
    if (!found)
        throw std::logic_error("brute_force_mipcsc: no feasible tuple");
    best.objective = best_v.to_double();
    return best;
}

std::vector<LabeledInstance> random_instances(std::uint64_t seed, std::size_t m, bool with_values)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto pick = [&](double lo, double hi, double grid) {
        if (unit(rng) < 0.3)
            return lo + grid * std::floor(unit(rng) * (hi - lo) / grid);
        return lo + unit(rng) * (hi - lo);
    };
    std::vector<LabeledInstance> out;
    for (std::size_t i = 0; i < m; ++i) {
        LabeledInstance inst;
        inst.id = i;
        inst.est.mu = pick(0.0, 1.0, 0.1);
        inst.est.sigma = pick(0.0, 0.3, 0.05);
        // noisy labels so that mistakes and rejections both matter
        inst.y = unit(rng) < 0.15 + 0.7 * inst.est.mu ? 1 : 0;
        if (with_values)
            inst.value = std::round(pick(1.0, 500.0, 50.0) * 100.0) / 100.0;
        out.push_back(inst);
    }
    return out;
}

} // namespace smip
