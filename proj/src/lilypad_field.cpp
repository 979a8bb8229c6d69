#include "lilypad/lilypad_field.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace lilypad {

FirstPassage solve_first_passage_core(const Window& w, const std::vector<double>& xiT,
                                      double q, double spacing) {
    const std::int32_t n = w.size();
    if (n == 0) throw std::invalid_argument("solve_first_passage: empty window");
    if (w.origin() < 0) throw std::invalid_argument("solve_first_passage: window lacks origin");

    FirstPassage fp;
    fp.h.assign(n, kInf);
    fp.pred.assign(n, -1);
    fp.settle_order.reserve(n);
    std::vector<char> settled(n, 0);
    fp.h[w.origin()] = 0.0;

    for (std::int32_t round = 0; round < n; ++round) {
        // next site to settle: smallest label, site id (= lex order) on ties
        std::int32_t y = -1;
        for (std::int32_t z = 0; z < n; ++z)
            if (!settled[z] && fp.h[z] < kInf && (y < 0 || fp.h[z] < fp.h[y])) y = z;
        if (y < 0) break;
        settled[y] = 1;
        fp.settle_order.push_back(y);
        for (std::int32_t z = 0; z < n; ++z) {
            if (settled[z]) continue;
            const double cand = fp.h[y] + edge_cost(q, w.l1_micro(y, z), spacing, xiT[y]);
            if (cand < fp.h[z]) {
                fp.h[z] = cand;
                fp.pred[z] = y;
            }
        }
    }

    // Final predecessor resolution: lexicographically first argmin over all
    // sites. Candidates from later-settled sites can tie the label but never
    // undercut it, so this also certifies a zero recursion residual.
    for (std::int32_t z = 0; z < n; ++z) {
        if (z == w.origin() || fp.h[z] == kInf) continue;
        std::int32_t best = -1;
        double best_v = kInf;
        for (std::int32_t y = 0; y < n; ++y) {
            if (y == z || fp.h[y] == kInf) continue;
            const double v = fp.h[y] + edge_cost(q, w.l1_micro(y, z), spacing, xiT[y]);
            if (v < best_v) {
                best_v = v;
                best = y;
            }
        }
        if (best_v != fp.h[z])
            throw std::logic_error("solve_first_passage: label " + std::to_string(fp.h[z]) +
                                   " not reproduced by final relaxation (" +
                                   std::to_string(best_v) + ")");
        fp.pred[z] = best;
    }
    return fp;
}

FirstPassage pam_tau_core(const Window& w, const std::vector<double>& xiT,
                          double q, double spacing) {
    const std::int32_t n = w.size();
    if (n == 0) throw std::invalid_argument("pam_tau: empty window");
    if (w.origin() < 0) throw std::invalid_argument("pam_tau: window lacks origin");

    FirstPassage fp;
    fp.h.assign(n, kInf);
    fp.pred.assign(n, -1);
    for (std::int32_t z = 0; z < n; ++z) {
        std::int32_t best = -1;
        double best_v = kInf;
        for (std::int32_t y = 0; y < n; ++y) {
            const double v = edge_cost(q, w.l1_micro(y) + w.l1_micro(y, z), spacing, xiT[y]);
            if (v < best_v) {
                best_v = v;
                best = y;
            }
        }
        fp.h[z] = best_v;
        fp.pred[z] = z == w.origin() ? -1 : best;
    }
    fp.settle_order.resize(n);
    for (std::int32_t z = 0; z < n; ++z) fp.settle_order[z] = z;
    std::stable_sort(fp.settle_order.begin(), fp.settle_order.end(),
                     [&fp](std::int32_t a, std::int32_t b) { return fp.h[a] < fp.h[b]; });
    return fp;
}

LilypadField solve_hitting_times(std::shared_ptr<const Environment> env) {
    const auto& s = env->scaling();
    FirstPassage fp =
        solve_first_passage_core(env->window(), env->xiT_all(), s.q, 1.0 / s.rT);
    return LilypadField(std::move(env), FieldKind::brw, std::move(fp));
}

LilypadField pam_tau(std::shared_ptr<const Environment> env) {
    const auto& s = env->scaling();
    FirstPassage fp = pam_tau_core(env->window(), env->xiT_all(), s.q, 1.0 / s.rT);
    return LilypadField(std::move(env), FieldKind::pam, std::move(fp));
}

std::vector<std::int32_t> optimal_path(const LilypadField& field, std::int32_t site) {
    const Window& w = field.env().window();
    if (site < 0 || site >= w.size()) throw std::invalid_argument("optimal_path: bad site");
    if (field.h(site) == kInf) throw std::invalid_argument("optimal_path: site not settled");

    std::vector<std::int32_t> path{site};
    if (field.kind() == FieldKind::pam) {
        if (site != w.origin()) {
            const std::int32_t relay = field.pred(site);
            if (relay != site) path.push_back(relay);
            if (path.back() != w.origin()) path.push_back(w.origin());
        }
        return path;
    }
    while (path.back() != w.origin()) {
        const std::int32_t p = field.pred(path.back());
        if (p < 0 || static_cast<std::int32_t>(path.size()) > w.size())
            throw std::logic_error("optimal_path: predecessor chain does not reach origin");
        path.push_back(p);
    }
    return path;
}

double exactness_certificate(const LilypadField& field, double R) {
    if (field.kind() != FieldKind::brw)
        throw std::invalid_argument(
            "exactness_certificate: only BRW hitting fields admit a window certificate");
    const Environment& env = field.env();
    const Window& w = env.window();
    const double q = env.scaling().q;
    const double rT = env.scaling().rT;

    // Reaching macro distance rho costs at least q rho / max_{|y| < rho} xi_T,
    // so the exit time of B(0,R) is bounded below by the max of that bound
    // over rho <= R. The bound over an open ball is constant between shell
    // radii and grows linearly within, so only shell radii and R itself are
    // candidates.
    std::vector<std::pair<std::int64_t, double>> by_norm;
    by_norm.reserve(w.size());
    const double lim = R * rT;
    for (std::int32_t z = 0; z < w.size(); ++z)
        if (static_cast<double>(w.l1_micro(z)) < lim)
            by_norm.emplace_back(w.l1_micro(z), env.xiT(z));
    if (by_norm.empty()) return kInf;
    std::sort(by_norm.begin(), by_norm.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    double best = 0.0;
    double running_max = 0.0;
    std::size_t i = 0;
    while (i < by_norm.size()) {
        const std::int64_t norm = by_norm[i].first;
        // rho just at the next shell still excludes that shell (open ball)
        if (norm > 0 && running_max > 0.0)
            best = std::max(best, q * (static_cast<double>(norm) / rT) / running_max);
        while (i < by_norm.size() && by_norm[i].first == norm) {
            running_max = std::max(running_max, by_norm[i].second);
            ++i;
        }
    }
    if (running_max <= 0.0) return kInf;
    return std::max(best, q * R / running_max);
}

std::vector<std::int32_t> sites_below(const LilypadField& field, double t) {
    std::vector<std::int32_t> out;
    for (std::int32_t z = 0; z < field.env().window().size(); ++z)
        if (field.h(z) <= t) out.push_back(z);
    return out;
}

}  // namespace lilypad
