#include "smip/mipcsc_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>

namespace smip {

Money objective_mipcsc_money(std::span<const Decision> decisions,
                             std::span<const LabeledInstance> instances, const CostModel& cm)
{
    if (decisions.size() != instances.size())
        throw std::invalid_argument("objective_mipcsc: decisions and instances differ in length");
    Money total;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        if (!instances[i].value)
            throw std::invalid_argument("objective_mipcsc: instance " + std::to_string(instances[i].id) +
                                        " has no value");
        total += contribution(cm, decisions[i].kind, instances[i].y, *instances[i].value);
    }
    return total;
}

double objective_mipcsc(std::span<const Decision> decisions,
                        std::span<const LabeledInstance> instances, const CostModel& cm)
{
    return objective_mipcsc_money(decisions, instances, cm).to_double();
}

namespace {

struct Pt {
    std::size_t k;
    Money v;
    std::uint32_t j;
};

// Per-instance data on a fixed grid of value cuts.
struct Grid {
    std::vector<double> tcuts;
    std::vector<std::uint32_t> first; // first cut index that decides the instance
    std::vector<Money> dec_pos, dec_neg, dec_mid, rej;

    mutable std::vector<Money> delta;
    mutable std::vector<std::size_t> count;

    Grid(std::span<const LabeledInstance> instances, std::vector<double> cuts, const CostModel& cm)
        : tcuts(std::move(cuts))
    {
        for (const auto& inst : instances) {
            const double t = *inst.value;
            first.push_back(static_cast<std::uint32_t>(
                std::upper_bound(tcuts.begin(), tcuts.end(), t) - tcuts.begin()));
            dec_pos.push_back(contribution(cm, DecisionKind::Positive, inst.y, t));
            dec_neg.push_back(contribution(cm, DecisionKind::Negative, inst.y, t));
            dec_mid.push_back(inst.est.mu > 0.5 ? dec_neg.back() : dec_pos.back());
            rej.push_back(contribution(cm, DecisionKind::Reject, inst.y, t));
        }
        delta.resize(tcuts.size());
        count.resize(tcuts.size());
    }

    // One point per distinct rejection count, in increasing cut order
    // (decreasing k). The first cut reaching each k is kept.
    void sweep(std::span<const std::uint32_t> idx, const std::vector<Money>& dec,
               std::vector<Pt>& out) const
    {
        std::fill(delta.begin(), delta.end(), Money{});
        std::fill(count.begin(), count.end(), 0);
        Money v;
        for (auto i : idx) {
            v += rej[i];
            delta[first[i]] += dec[i] - rej[i];
            ++count[first[i]];
        }
        std::size_t k = idx.size();
        out.clear();
        for (std::uint32_t j = 0; j < tcuts.size(); ++j) {
            v += delta[j];
            k -= count[j];
            if (out.empty() || out.back().k != k)
                out.push_back(Pt{k, v, j});
        }
    }
};

struct SideEntry {
    Money v;
    std::size_t k = 0; // rejections actually used
    std::uint32_t s = 0, ja = 0, jb = 0;
    bool valid = false;
};

// For one side of the band: best contribution with at most k rejections,
// for k = 0..rcap, and the ks where that value strictly improves.
struct SideTable {
    std::vector<SideEntry> at_most;
    std::vector<std::size_t> breakpoints;
};

SideTable side_table(std::span<const std::uint32_t> side_idx, const Grid& g,
                     const std::vector<Money>& dec, const std::vector<double>& sigma,
                     const std::vector<double>& sigma_cuts, std::size_t rcap)
{
    std::vector<SideEntry> exact(rcap + 1);
    std::vector<std::uint32_t> below, above;
    std::vector<Pt> pa, pb;
    for (std::uint32_t s = 0; s < sigma_cuts.size(); ++s) {
        below.clear();
        above.clear();
        for (auto i : side_idx)
            (sigma[i] < sigma_cuts[s] ? below : above).push_back(i);
        g.sweep(below, dec, pa);
        g.sweep(above, dec, pb);
        for (const auto& a : pa) {
            if (a.k > rcap)
                continue;
            for (const auto& b : pb) {
                const std::size_t k = a.k + b.k;
                if (k > rcap)
                    continue;
                const Money v = a.v + b.v;
                if (!exact[k].valid || v > exact[k].v)
                    exact[k] = SideEntry{v, k, s, a.j, b.j, true};
            }
        }
    }
    SideTable t;
    t.at_most.resize(rcap + 1);
    for (std::size_t k = 0; k <= rcap; ++k) {
        if (k > 0)
            t.at_most[k] = t.at_most[k - 1];
        if (exact[k].valid && (!t.at_most[k].valid || exact[k].v > t.at_most[k].v)) {
            t.at_most[k] = exact[k];
            t.breakpoints.push_back(k);
        }
    }
    if (!t.at_most[0].valid)
        throw std::logic_error("solve_mipcsc: zero-rejection configuration missing");
    return t;
}

constexpr double max_table_entries = 1.6e7;

} // namespace

RegionFrontier region_value_frontier(std::span<const LabeledInstance> region, RegionRule rule,
                                     const CostModel& cm)
{
    cm.validate();
    RegionFrontier f;
    f.by_rejections.resize(region.size() + 1);
    if (region.empty()) {
        f.by_rejections[0] = RegionFrontierEntry{0.0, 0.0};
        return f;
    }
    std::vector<double> ts;
    for (const auto& inst : region) {
        if (!inst.value)
            throw std::invalid_argument("region_value_frontier: instance without value");
        ts.push_back(*inst.value);
    }
    const Grid g(region, candidate_cuts(ts), cm);
    const auto& dec = rule == RegionRule::Positive   ? g.dec_pos
                      : rule == RegionRule::Negative ? g.dec_neg
                                                     : g.dec_mid;
    std::vector<std::uint32_t> idx(region.size());
    for (std::uint32_t i = 0; i < idx.size(); ++i)
        idx[i] = i;
    std::vector<Pt> pts;
    g.sweep(idx, dec, pts);
    for (const auto& p : pts)
        f.by_rejections[p.k] = RegionFrontierEntry{p.v.to_double(), g.tcuts[p.j]};
    return f;
}

MipcscSolution solve_mipcsc(std::span<const LabeledInstance> instances, const SolverConfig& cfg,
                            const CostModel& cm)
{
    const std::size_t m = instances.size();
    if (m == 0)
        throw std::invalid_argument("solve_mipcsc: no instances");
    cfg.validate(m);
    cm.validate();

    std::vector<double> mus, sigmas, ts;
    for (const auto& inst : instances) {
        if (!inst.value)
            throw std::invalid_argument("solve_mipcsc: instance " + std::to_string(inst.id) +
                                        " has no value");
        mus.push_back(inst.est.mu);
        sigmas.push_back(inst.est.sigma);
        ts.push_back(*inst.value);
    }
    const auto mu_cuts = candidate_cuts(mus, cfg.coarsen_to);
    const auto sigma_cuts = candidate_cuts(sigmas, cfg.coarsen_to);
    const Grid g(instances, candidate_cuts(ts, cfg.coarsen_to), cm);
    const std::size_t rcap = cfg.rcap;

    if (2.0 * static_cast<double>(mu_cuts.size()) * static_cast<double>(rcap + 1) > max_table_entries)
        throw std::invalid_argument("solve_mipcsc: exact grid too large (" + std::to_string(mu_cuts.size()) +
                                    " mu cuts, rCap " + std::to_string(rcap) + "); set coarsen_to");

    std::vector<double> bound;
    for (double c : mu_cuts)
        bound.push_back(ThresholdSolution::from_cuts(c, c, 0.0, 0.0).left_bound());

    std::vector<SideTable> left, right;
    std::vector<std::uint32_t> idx;
    for (std::size_t c = 0; c < mu_cuts.size(); ++c) {
        idx.clear();
        for (std::uint32_t i = 0; i < m; ++i)
            if (mus[i] < bound[c])
                idx.push_back(i);
        left.push_back(side_table(idx, g, g.dec_pos, sigmas, sigma_cuts, rcap));
        idx.clear();
        for (std::uint32_t i = 0; i < m; ++i)
            if (mus[i] > bound[c])
                idx.push_back(i);
        right.push_back(side_table(idx, g, g.dec_neg, sigmas, sigma_cuts, rcap));
    }

    struct Best {
        Money v;
        std::size_t rej = 0;
        std::size_t l = 0, r = 0;
        std::uint32_t j3 = 0;
        SideEntry le, re;
        bool valid = false;
    } best;

    std::vector<Pt> pm;
    for (std::size_t l = 0; l < mu_cuts.size(); ++l) {
        const auto& lt = left[l];
        for (std::size_t r = 0; r < mu_cuts.size(); ++r) {
            if (bound[l] > bound[r])
                continue;
            const auto& rt = right[r];
            idx.clear();
            for (std::uint32_t i = 0; i < m; ++i)
                if (!(mus[i] < bound[l]) && !(mus[i] > bound[r]))
                    idx.push_back(i);
            g.sweep(idx, g.dec_mid, pm);
            for (const auto& p : pm) {
                if (p.k > rcap)
                    continue;
                const std::size_t budget = rcap - p.k;
                for (std::size_t k1 : lt.breakpoints) {
                    if (k1 > budget)
                        break;
                    const auto& le = lt.at_most[k1];
                    const auto& re = rt.at_most[budget - k1];
                    const Money v = le.v + re.v + p.v;
                    const std::size_t rej = le.k + re.k + p.k;
                    if (!best.valid || v > best.v || (v == best.v && rej < best.rej))
                        best = Best{v, rej, l, r, p.j, le, re, true};
                }
            }
        }
    }
    if (!best.valid)
        throw std::logic_error("solve_mipcsc: no feasible configuration");

    MipcscSolution sol;
    sol.thresholds = ThresholdSolution::from_cuts(mu_cuts[best.l], mu_cuts[best.r],
                                                  sigma_cuts[best.le.s], sigma_cuts[best.re.s]);
    sol.value_thresholds = ValueThresholds{g.tcuts[best.le.ja], g.tcuts[best.le.jb], g.tcuts[best.j3],
                                           g.tcuts[best.re.ja], g.tcuts[best.re.jb]};
    sol.decisions = decide_all_mipcsc(instances, sol.thresholds, sol.value_thresholds);
    sol.rejections = count_rejections(sol.decisions);
    const Money recomputed = objective_mipcsc_money(sol.decisions, instances, cm);
    if (recomputed != best.v || sol.rejections != best.rej)
        throw std::logic_error("solve_mipcsc: thresholds do not reproduce the enumerated decisions");
    sol.objective = recomputed.to_double();
    return sol;
}

std::string export_mipcsc_lp(std::span<const LabeledInstance> instances, const SolverConfig& cfg,
                             const CostModel& cm, const LpExportConfig& lp)
{
    using detail::lp_number;
    const std::size_t m = instances.size();
    if (m == 0)
        throw std::invalid_argument("export_mipcsc_lp: no instances");
    cfg.validate(m);
    cm.validate();
    std::vector<std::vector<double>> cols(3);
    for (const auto& inst : instances) {
        if (!inst.value)
            throw std::invalid_argument("export_mipcsc_lp: instance " + std::to_string(inst.id) +
                                        " has no value");
        cols[0].push_back(inst.est.mu);
        cols[1].push_back(inst.est.sigma);
        cols[2].push_back(*inst.value);
    }
    detail::validate_lp_config(lp, cols);

    const std::string M = lp_number(lp.big_M);
    auto term = [](double coef, const std::string& var) {
        std::string s = coef < 0 ? " - " : " + ";
        return s + lp_number(std::abs(coef)) + " " + var;
    };

    std::ostringstream os;
    os << "\\ MIPCSC cost-sensitive selective classification, m = " << m << ", rCap = " << cfg.rcap
       << "\n";
    os << "Maximize\n obj:";
    for (std::size_t k = 1; k <= m; ++k) {
        const auto& inst = instances[k - 1];
        const double t = *inst.value;
        const std::string i = std::to_string(k);
        const double pos = inst.y == 0 ? cm.w_tp * t : -cm.w_fp * t;
        const double neg = inst.y == 1 ? cm.w_tn * t : -cm.w_fn * t;
        const double rej = (inst.y == 0 ? cm.w_tp * t : cm.w_tn * t) - cm.c;
        for (int j = 1; j <= 3; ++j)
            os << term(pos, "p_" + i + "_" + std::to_string(j));
        for (int j = 1; j <= 3; ++j)
            os << term(neg, "n_" + i + "_" + std::to_string(j));
        os << term(rej, "r_" + i) << "\n";
    }
    os << "Subject To\n";
    os << " disjoint: muL + muR >= 0\n";
    for (std::size_t k = 1; k <= m; ++k) {
        const auto& inst = instances[k - 1];
        const std::string i = std::to_string(k);
        const double dm = inst.est.mu - 0.5;
        const double sg = inst.est.sigma;
        const double t = *inst.value;
        os << " right_hi_" << i << ": muR + " << M << " R_" << i << " >= " << lp_number(dm) << "\n";
        os << " right_lo_" << i << ": muR + " << M << " R_" << i << " <= "
           << lp_number(dm + lp.big_M - lp.epsilon) << "\n";
        os << " left_hi_" << i << ": muL + " << M << " L_" << i << " <= "
           << lp_number(-dm + lp.big_M - lp.epsilon) << "\n";
        os << " left_lo_" << i << ": muL + " << M << " L_" << i << " >= " << lp_number(-dm) << "\n";
        // Q_i = 1 iff mu_i > 0.5
        os << " q_hi_" << i << ": " << M << " Q_" << i << " >= " << lp_number(dm) << "\n";
        os << " q_lo_" << i << ": " << M << " Q_" << i << " <= " << lp_number(dm + lp.big_M - lp.epsilon)
           << "\n";
        // x_i = 1 iff data < threshold
        auto below = [&](const std::string& name, const std::string& thr, const std::string& ind,
                         double data) {
            os << " " << name << "_hi_" << i << ": " << thr << " - " << M << " " << ind << "_" << i
               << " >= " << lp_number(data - lp.big_M + lp.epsilon) << "\n";
            os << " " << name << "_lo_" << i << ": " << thr << " - " << M << " " << ind << "_" << i
               << " <= " << lp_number(data) << "\n";
        };
        below("dl", "sigL", "DL", sg);
        below("dr", "sigR", "DR", sg);
        below("sdl", "tDL", "SDL", t);
        below("sul", "tUL", "SUL", t);
        below("sm", "tM", "SM", t);
        below("sdr", "tDR", "SDR", t);
        below("sur", "tUR", "SUR", t);
        // conjunctions
        auto conj = [&](const std::string& name, const std::string& lhs, const std::string& out,
                        int arity, int offset) {
            os << " " << name << "_hi_" << i << ": " << lhs << " - " << arity << " " << out
               << " >= " << -offset << "\n";
            os << " " << name << "_lo_" << i << ": " << lhs << " - " << arity << " " << out
               << " <= " << arity - 1 - offset << "\n";
        };
        // offset = number of negated literals, moved to the right-hand side
        conj("p1", "L_" + i + " + DL_" + i + " + SDL_" + i, "p_" + i + "_1", 3, 0);
        conj("p2", "L_" + i + " - DL_" + i + " + SUL_" + i, "p_" + i + "_2", 3, 1);
        conj("n1", "R_" + i + " + DR_" + i + " + SDR_" + i, "n_" + i + "_1", 3, 0);
        conj("n2", "R_" + i + " - DR_" + i + " + SUR_" + i, "n_" + i + "_2", 3, 1);
        conj("p3", "- L_" + i + " - R_" + i + " + SM_" + i + " - Q_" + i, "p_" + i + "_3", 4, 3);
        conj("n3", "- L_" + i + " - R_" + i + " + SM_" + i + " + Q_" + i, "n_" + i + "_3", 4, 2);
        os << " one_" << i << ": p_" << i << "_1 + p_" << i << "_2 + p_" << i << "_3 + n_" << i
           << "_1 + n_" << i << "_2 + n_" << i << "_3 + r_" << i << " = 1\n";
    }
    os << " capacity:";
    for (std::size_t k = 1; k <= m; ++k)
        os << (k == 1 ? " r_" : " + r_") << k;
    os << " <= " << cfg.rcap << "\n";
    os << "Bounds\n";
    for (const char* v : {"muL", "muR", "sigL", "sigR", "tDL", "tUL", "tM", "tDR", "tUR"})
        os << " " << v << " free\n";
    os << "Binary\n";
    for (std::size_t k = 1; k <= m; ++k) {
        const std::string i = std::to_string(k);
        os << " p_" << i << "_1 p_" << i << "_2 p_" << i << "_3 n_" << i << "_1 n_" << i << "_2 n_" << i
           << "_3 r_" << i;
        for (const char* v : {"R", "L", "DL", "DR", "Q", "SDL", "SUL", "SM", "SDR", "SUR"})
            os << " " << v << "_" << i;
        os << "\n";
    }
    os << "End\n";
    return os.str();
}

} // namespace smip
