#include "smip/mipsc_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace smip {

void SolverConfig::validate(std::size_t m) const
{
    if (rcap > m)
        throw std::invalid_argument("rCap (" + std::to_string(rcap) + ") exceeds instance count (" +
                                    std::to_string(m) + ")");
    if (!(rho >= 0.0 && rho <= 1.0))
        throw std::invalid_argument("rho must lie in [0, 1]");
    if (coarsen_to && *coarsen_to < 2)
        throw std::invalid_argument("coarsen_to must keep at least the two sentinel cuts");
}

std::vector<double> candidate_cuts(std::span<const double> values,
                                   std::optional<std::size_t> coarsen_to)
{
    if (values.empty())
        throw std::invalid_argument("candidate_cuts: no values");
    if (coarsen_to && *coarsen_to < 2)
        throw std::invalid_argument("candidate_cuts: coarsen_to must be >= 2");

    std::vector<double> v(values.begin(), values.end());
    for (double x : v)
        if (!std::isfinite(x))
            throw std::invalid_argument("candidate_cuts: non-finite value");
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());

    std::vector<double> cuts;
    cuts.reserve(v.size() + 1);
    cuts.push_back(v.front() - 1.0);
    for (std::size_t j = 0; j + 1 < v.size(); ++j)
        cuts.push_back(v[j] + (v[j + 1] - v[j]) / 2.0);
    cuts.push_back(v.back() + 1.0);

    if (!coarsen_to || cuts.size() <= *coarsen_to)
        return cuts;

    const std::size_t n = cuts.size() - 1;
    const std::size_t k = *coarsen_to - 1;
    std::vector<double> picked;
    picked.reserve(*coarsen_to);
    for (std::size_t j = 0; j <= k; ++j)
        picked.push_back(cuts[(j * n + k / 2) / k]);
    return picked;
}

double objective_mipsc(std::size_t mistakes, std::size_t rejections, double rho, std::size_t m)
{
    if (m == 0)
        throw std::invalid_argument("objective_mipsc: m must be positive");
    return static_cast<double>(mistakes) +
           (1.0 - rho) * static_cast<double>(rejections) / static_cast<double>(m);
}

double objective_mipsc(std::span<const Decision> decisions, std::span<const int> labels, double rho)
{
    if (decisions.size() != labels.size())
        throw std::invalid_argument("objective_mipsc: decisions and labels differ in length");
    std::size_t mistakes = 0;
    std::size_t rejections = 0;
    for (std::size_t i = 0; i < decisions.size(); ++i) {
        if (decisions[i].rejected())
            ++rejections;
        else if (!is_correct(decisions[i].kind, labels[i]))
            ++mistakes;
    }
    return objective_mipsc(mistakes, rejections, rho, decisions.size());
}

std::vector<FrontierPoint> SideFrontier::points() const
{
    std::vector<FrontierPoint> out;
    for (const auto& p : by_accepted)
        if (p)
            out.push_back(*p);
    return out;
}

SideFrontier side_frontier(std::span<const LabeledInstance> instances, Side side,
                           double boundary, std::span<const double> sigma_cuts)
{
    std::vector<std::pair<double, int>> region;
    for (const auto& inst : instances) {
        const bool inside = side == Side::Left ? inst.est.mu < boundary : inst.est.mu > boundary;
        if (inside)
            region.emplace_back(inst.est.sigma, inst.y);
    }

    SideFrontier f;
    f.by_accepted.resize(region.size() + 1);

    std::vector<double> own_cuts;
    if (sigma_cuts.empty() && !region.empty()) {
        std::vector<double> sig;
        for (const auto& r : region)
            sig.push_back(r.first);
        own_cuts = candidate_cuts(sig);
        sigma_cuts = own_cuts;
    }
    if (region.empty()) {
        f.by_accepted[0] = FrontierPoint{0, 0, sigma_cuts.empty() ? 0.0 : sigma_cuts.front()};
        return f;
    }

    std::sort(region.begin(), region.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    const int wrong_label = side == Side::Left ? 1 : 0;
    std::size_t p = 0;
    std::size_t mistakes = 0;
    for (double cut : sigma_cuts) {
        while (p < region.size() && region[p].first < cut) {
            mistakes += region[p].second == wrong_label ? 1 : 0;
            ++p;
        }
        if (!f.by_accepted[p])
            f.by_accepted[p] = FrontierPoint{p, mistakes, cut};
    }
    return f;
}

namespace {

struct Candidate {
    double objective = std::numeric_limits<double>::infinity();
    std::size_t rejections = 0;
    std::size_t mistakes = 0;
    ThresholdSolution th;
    bool valid = false;
};

bool better(const Candidate& a, const Candidate& b)
{
    if (!b.valid)
        return a.valid;
    if (!a.valid)
        return false;
    if (a.objective != b.objective)
        return a.objective < b.objective;
    if (a.rejections != b.rejections)
        return a.rejections < b.rejections;
    return std::tie(a.th.mu_L, a.th.mu_R, a.th.sigma_L, a.th.sigma_R) <
           std::tie(b.th.mu_L, b.th.mu_R, b.th.sigma_L, b.th.sigma_R);
}

// Right-side frontier points with, for every suffix, the point minimising
// mistakes - lambda * accepted (ties: more accepted).
struct RightTable {
    std::vector<FrontierPoint> points;
    std::vector<std::size_t> suffix_best;
};

RightTable make_right_table(std::vector<FrontierPoint> pts, double lambda)
{
    RightTable t;
    t.points = std::move(pts);
    t.suffix_best.resize(t.points.size());
    for (std::size_t e = t.points.size(); e-- > 0;) {
        if (e + 1 == t.points.size()) {
            t.suffix_best[e] = e;
            continue;
        }
        const auto& cur = t.points[e];
        const auto& inc = t.points[t.suffix_best[e + 1]];
        const double g_cur = static_cast<double>(cur.mistakes) - lambda * static_cast<double>(cur.accepted);
        const double g_inc = static_cast<double>(inc.mistakes) - lambda * static_cast<double>(inc.accepted);
        t.suffix_best[e] = g_cur < g_inc ? e : t.suffix_best[e + 1];
    }
    return t;
}

} // namespace

MipscSolution solve_mipsc(std::span<const LabeledInstance> instances, const SolverConfig& cfg)
{
    const std::size_t m = instances.size();
    if (m == 0)
        throw std::invalid_argument("solve_mipsc: no instances");
    cfg.validate(m);

    std::vector<double> mus, sigmas;
    std::vector<int> labels;
    for (const auto& inst : instances) {
        mus.push_back(inst.est.mu);
        sigmas.push_back(inst.est.sigma);
        labels.push_back(inst.y);
    }
    const auto mu_cuts = candidate_cuts(mus, cfg.coarsen_to);
    const auto sigma_cuts = candidate_cuts(sigmas, cfg.coarsen_to);
    const double lambda = (1.0 - cfg.rho) / static_cast<double>(m);
    const std::size_t must_accept = m - cfg.rcap;

    // Boundary each cut produces once it round-trips through mu_L / mu_R.
    std::vector<double> bound;
    for (double c : mu_cuts)
        bound.push_back(ThresholdSolution::from_cuts(c, c, 0.0, 0.0).left_bound());

    std::vector<std::vector<FrontierPoint>> left;
    std::vector<RightTable> right;
    for (std::size_t c = 0; c < mu_cuts.size(); ++c) {
        left.push_back(side_frontier(instances, Side::Left, bound[c], sigma_cuts).points());
        right.push_back(
            make_right_table(side_frontier(instances, Side::Right, bound[c], sigma_cuts).points(), lambda));
    }

    Candidate best;
    for (std::size_t l = 0; l < mu_cuts.size(); ++l) {
        for (std::size_t r = 0; r < mu_cuts.size(); ++r) {
            if (bound[l] > bound[r])
                continue;
            const auto& rt = right[r];
            for (const auto& pl : left[l]) {
                const std::size_t need = must_accept > pl.accepted ? must_accept - pl.accepted : 0;
                auto it = std::lower_bound(rt.points.begin(), rt.points.end(), need,
                                           [](const FrontierPoint& p, std::size_t v) { return p.accepted < v; });
                if (it == rt.points.end())
                    continue;
                const auto& pr = rt.points[rt.suffix_best[static_cast<std::size_t>(it - rt.points.begin())]];
                Candidate cand;
                cand.valid = true;
                cand.mistakes = pl.mistakes + pr.mistakes;
                cand.rejections = m - pl.accepted - pr.accepted;
                cand.objective = objective_mipsc(cand.mistakes, cand.rejections, cfg.rho, m);
                cand.th = ThresholdSolution::from_cuts(mu_cuts[l], mu_cuts[r], pl.sigma_cut, pr.sigma_cut);
                if (better(cand, best))
                    best = cand;
            }
        }
    }
    if (!best.valid)
        throw std::logic_error("solve_mipsc: no feasible threshold combination");

    MipscSolution sol;
    sol.thresholds = best.th;
    sol.decisions = decide_all_mipsc(instances, best.th);
    sol.rejections = count_rejections(sol.decisions);
    sol.mistakes = 0;
    for (std::size_t i = 0; i < m; ++i)
        if (!sol.decisions[i].rejected() && !is_correct(sol.decisions[i].kind, labels[i]))
            ++sol.mistakes;
    if (sol.rejections != best.rejections || sol.mistakes != best.mistakes)
        throw std::logic_error("solve_mipsc: thresholds do not reproduce the enumerated decisions");
    sol.objective = objective_mipsc(sol.decisions, labels, cfg.rho);
    return sol;
}

namespace detail {

std::string lp_number(double v)
{
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

void validate_lp_config(const LpExportConfig& lp, std::span<const std::vector<double>> columns)
{
    if (!(lp.epsilon > 0.0))
        throw std::invalid_argument("LP export: epsilon must be positive");
    double range = 1.0;
    for (const auto& col : columns) {
        if (col.empty())
            continue;
        auto [lo, hi] = std::minmax_element(col.begin(), col.end());
        range = std::max(range, *hi - *lo);
        std::vector<double> v(col);
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        for (std::size_t j = 0; j + 1 < v.size(); ++j)
            if (!(lp.epsilon < v[j + 1] - v[j]))
                throw std::invalid_argument("LP export: epsilon " + lp_number(lp.epsilon) +
                                            " is not below the gap " + lp_number(v[j + 1] - v[j]) +
                                            " between distinct data values");
    }
    if (!(lp.big_M > range))
        throw std::invalid_argument("LP export: big_M " + lp_number(lp.big_M) +
                                    " must exceed max(1, data range) = " + lp_number(range));
}

} // namespace detail

std::string export_mipsc_lp(std::span<const LabeledInstance> instances, const SolverConfig& cfg,
                            const LpExportConfig& lp)
{
    using detail::lp_number;
    const std::size_t m = instances.size();
    if (m == 0)
        throw std::invalid_argument("export_mipsc_lp: no instances");
    cfg.validate(m);
    std::vector<std::vector<double>> cols(2);
    for (const auto& inst : instances) {
        cols[0].push_back(inst.est.mu);
        cols[1].push_back(inst.est.sigma);
    }
    detail::validate_lp_config(lp, cols);

    const std::string M = lp_number(lp.big_M);
    const double lambda = (1.0 - cfg.rho) / static_cast<double>(m);
    std::ostringstream os;
    os << "\\ MIPSC selective classification, m = " << m << ", rCap = " << cfg.rcap
       << ", rho = " << lp_number(cfg.rho) << "\n";
    os << "Minimize\n obj:";
    for (std::size_t k = 1; k <= m; ++k) {
        const int y = instances[k - 1].y;
        os << (y == 1 ? " + p_" : " + n_") << k;
        os << " + " << lp_number(lambda) << " r_" << k;
    }
    os << "\nSubject To\n";
    os << " disjoint: muL + muR >= 0\n";
    for (std::size_t k = 1; k <= m; ++k) {
        const auto& e = instances[k - 1].est;
        const std::string i = std::to_string(k);
        const double dm = e.mu - 0.5;
        // R_i = 1 iff mu_i > 0.5 + muR
        os << " right_hi_" << i << ": muR + " << M << " R_" << i << " >= " << lp_number(dm) << "\n";
        os << " right_lo_" << i << ": muR + " << M << " R_" << i << " <= "
           << lp_number(dm + lp.big_M - lp.epsilon) << "\n";
        // L_i = 1 iff mu_i < 0.5 - muL
        os << " left_hi_" << i << ": muL + " << M << " L_" << i << " <= "
           << lp_number(-dm + lp.big_M - lp.epsilon) << "\n";
        os << " left_lo_" << i << ": muL + " << M << " L_" << i << " >= " << lp_number(-dm) << "\n";
        // DL_i = 1 iff sigma_i < sigL
        os << " dl_hi_" << i << ": sigL - " << M << " DL_" << i << " >= "
           << lp_number(e.sigma - lp.big_M + lp.epsilon) << "\n";
        os << " dl_lo_" << i << ": sigL - " << M << " DL_" << i << " <= " << lp_number(e.sigma) << "\n";
        // DR_i = 1 iff sigma_i < sigR
        os << " dr_hi_" << i << ": sigR - " << M << " DR_" << i << " >= "
           << lp_number(e.sigma - lp.big_M + lp.epsilon) << "\n";
        os << " dr_lo_" << i << ": sigR - " << M << " DR_" << i << " <= " << lp_number(e.sigma) << "\n";
        // p_i = DL_i AND L_i,  n_i = DR_i AND R_i
        os << " pos_hi_" << i << ": DL_" << i << " + L_" << i << " - 2 p_" << i << " >= 0\n";
        os << " pos_lo_" << i << ": DL_" << i << " + L_" << i << " - 2 p_" << i << " <= 1\n";
        os << " neg_hi_" << i << ": DR_" << i << " + R_" << i << " - 2 n_" << i << " >= 0\n";
        os << " neg_lo_" << i << ": DR_" << i << " + R_" << i << " - 2 n_" << i << " <= 1\n";
        os << " one_" << i << ": p_" << i << " + n_" << i << " + r_" << i << " = 1\n";
    }
    os << " capacity:";
    for (std::size_t k = 1; k <= m; ++k)
        os << (k == 1 ? " r_" : " + r_") << k;
    os << " <= " << cfg.rcap << "\n";
    os << "Bounds\n muL free\n muR free\n sigL free\n sigR free\n";
    os << "Binary\n";
    for (std::size_t k = 1; k <= m; ++k)
        os << " p_" << k << " n_" << k << " r_" << k << " R_" << k << " L_" << k << " DL_" << k
           << " DR_" << k << "\n";
    os << "End\n";
    return os.str();
}

} // namespace smip
