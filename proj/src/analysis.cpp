#include "lilypad/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace lilypad {

namespace {

constexpr double kInfty = std::numeric_limits<double>::infinity();

std::int64_t strict_floor(double radius) {
    std::int64_t m = static_cast<std::int64_t>(std::floor(radius));
    if (static_cast<double>(m) >= radius) --m;
    return m;
}

bool same_scaling(const ScalingConstants& a, const ScalingConstants& b) {
    return a.d == b.d && a.alpha == b.alpha && a.T == b.T;
}

}  // namespace

SupportSet support_from_field(const LilypadField& field, double t) {
    SupportSet s;
    s.env = field.env_ptr();
    s.t = t;
    s.source =
        field.kind() == FieldKind::brw ? SupportSource::brw_lilypad : SupportSource::pam_lilypad;
    s.sites = sites_below(field, t);
    return s;
}

SupportSet support_from_record(const BRWRecord& record, double t) {
    SupportSet s;
    s.env = record.env_ptr();
    s.t = t;
    s.source = SupportSource::brw_simulated;
    const double limit = t * record.env().scaling().T;
    const auto& fh = record.first_hit_micro();
    for (std::int32_t z = 0; z < static_cast<std::int32_t>(fh.size()); ++z)
        if (fh[z] <= limit) s.sites.push_back(z);
    return s;
}

SupportSet support_from_pam(const PamField& field, const std::vector<double>& hitting,
                            double t) {
    SupportSet s;
    s.env = field.env_ptr();
    s.t = t;
    s.source = SupportSource::pam_numeric;
    for (std::int32_t z = 0; z < static_cast<std::int32_t>(hitting.size()); ++z)
        if (hitting[z] <= t) s.sites.push_back(z);
    return s;
}

double hausdorff_l1(const SupportSet& a, const SupportSet& b) {
    if (a.sites.empty() || b.sites.empty())
        throw std::invalid_argument("hausdorff_l1: empty support");
    if (!same_scaling(a.env->scaling(), b.env->scaling()))
        throw std::invalid_argument("hausdorff_l1: scaling mismatch");
    const Window& wa = a.env->window();
    const Window& wb = b.env->window();
    const int d = wa.dim();

    const auto directed = [&](const SupportSet& from, const Window& wf, const SupportSet& to,
                              const Window& wt) {
        std::int64_t worst = 0;
        for (std::int32_t p : from.sites) {
            const std::int64_t* cp = wf.coords(p);
            std::int64_t best = std::numeric_limits<std::int64_t>::max();
            for (std::int32_t s : to.sites) {
                const std::int64_t* cs = wt.coords(s);
                std::int64_t l1 = 0;
                for (int k = 0; k < d; ++k) l1 += std::llabs(cp[k] - cs[k]);
                if (l1 < best) best = l1;
                if (best == 0) break;
            }
            if (best > worst) worst = best;
        }
        return worst;
    };

    const std::int64_t h = std::max(directed(a, wa, b, wb), directed(b, wb, a, wa));
    return static_cast<double>(h) / a.env->scaling().rT;
}

std::int32_t maximizer(const MassField& field) {
    const auto& v = field.values();
    if (v.empty()) throw std::invalid_argument("maximizer: empty field");
    std::int32_t best = 0;
    for (std::int32_t z = 1; z < static_cast<std::int32_t>(v.size()); ++z)
        if (v[z] > v[best]) best = z;
    return best;
}

double intermittency_ratio(const BRWRecord& record, double t_macro, std::int32_t center,
                           double radius_macro) {
    const Snapshot& snap = record.snapshot_at(t_macro);
    const Window& w = record.env().window();
    if (center < 0 || center >= w.size())
        throw std::invalid_argument("intermittency_ratio: bad center site");
    const double rad_micro = radius_macro * record.env().scaling().rT;
    double inside = 0.0, total = 0.0;
    for (std::int32_t z = 0; z < w.size(); ++z) {
        total += snap.counts[z];
        if (static_cast<double>(w.l1_micro(z, center)) < rad_micro) inside += snap.counts[z];
    }
    if (total <= 0.0)
        throw std::invalid_argument("intermittency_ratio: no mass at t=" +
                                    std::to_string(t_macro));
    return inside / total;
}

int connected_components(const SupportSet& support) {
    const Window& w = support.env->window();
    std::vector<char> in(w.size(), 0), seen(w.size(), 0);
    for (std::int32_t z : support.sites) in[z] = 1;
    int comps = 0;
    std::deque<std::int32_t> queue;
    for (std::int32_t start : support.sites) {
        if (seen[start]) continue;
        ++comps;
        seen[start] = 1;
        queue.push_back(start);
        while (!queue.empty()) {
            const std::int32_t z = queue.front();
            queue.pop_front();
            for (int k = 0; k < w.dim(); ++k)
                for (int dir : {+1, -1}) {
                    const std::int32_t nb = w.neighbor(z, k, dir);
                    if (nb >= 0 && in[nb] && !seen[nb]) {
                        seen[nb] = 1;
                        queue.push_back(nb);
                    }
                }
        }
    }
    return comps;
}

// --- scenarios -----------------------------------------------------------

double scenario_window_radius(const ScenarioSpec& spec, const ScalingConstants& sc) {
    if (spec.window_radius > 0.0) return spec.window_radius;
    if (spec.variant == ScenarioVariant::S3) return 2.0 * spec.R + 1.0 + 4.0 / sc.rT;
    return spec.R + 1.0;
}

std::vector<std::int64_t> scenario_x(const ScenarioSpec& spec, const ScalingConstants& sc) {
    std::vector<std::int64_t> x(sc.d, 0);
    x[0] = std::max<std::int64_t>(0, strict_floor(spec.r * sc.rT));
    return x;
}

std::vector<std::int64_t> scenario_xprime(const ScenarioSpec& spec,
                                          const ScalingConstants& sc) {
    std::vector<std::int64_t> xp(sc.d, 0);
    if (spec.variant == ScenarioVariant::S2) {
        xp[0] = static_cast<std::int64_t>(std::ceil(spec.R * sc.rT));
        if (!(static_cast<double>(xp[0]) < (spec.R + 1.0) * sc.rT))
            throw std::invalid_argument("scenario: no lattice site in the S2 shell");
    } else if (spec.variant == ScenarioVariant::S3) {
        xp[0] = static_cast<std::int64_t>(std::ceil(2.0 * spec.R * sc.rT));
        if (!(static_cast<double>(xp[0]) <= (2.0 * spec.R + 1.0) * sc.rT))
            throw std::invalid_argument("scenario: no lattice site in the S3 shell");
    } else {
        throw std::invalid_argument("scenario: S1 has no far spike");
    }
    return xp;
}

Environment build_scenario(const ScenarioSpec& spec, const ScalingConstants& sc) {
    const double wr = scenario_window_radius(spec, sc);
    const double floor_T = 1.0 / sc.aT;
    if (!(spec.eta / 2.0 >= floor_T))
        throw std::invalid_argument("build_scenario: eta/2 below the potential floor 1/a(T)");

    std::vector<std::pair<std::vector<std::int64_t>, double>> assign;
    const std::vector<std::int64_t> x = scenario_x(spec, sc);
    assign.emplace_back(x, 1.5 * spec.eta);
    const bool x_is_origin =
        std::all_of(x.begin(), x.end(), [](std::int64_t c) { return c == 0; });
    if (!x_is_origin) assign.emplace_back(std::vector<std::int64_t>(sc.d, 0), spec.eta / 2.0);

    if (spec.variant == ScenarioVariant::S2) {
        const double v = 2.5 * spec.eta + sc.q * (spec.R + 1.0) / spec.t;
        assign.emplace_back(scenario_xprime(spec, sc), v);
    } else if (spec.variant == ScenarioVariant::S3) {
        const double lo = (2.0 * spec.R + 1.0) * sc.q / spec.t;
        const double hi = 2.5 * spec.R * sc.q / spec.t;
        if (!(lo < hi))
            throw std::invalid_argument("build_scenario: S3 needs R > 2");
        assign.emplace_back(scenario_xprime(spec, sc), 0.5 * (lo + hi));
    }
    return Environment::with_potential(sc, wr, assign);
}

ScenarioCheck check_scenario(const Environment& env, const ScenarioSpec& spec) {
    const auto& sc = env.scaling();
    const Window& w = env.window();
    ScenarioCheck out;
    std::ostringstream detail;

    out.setup = spec.t > 0.0 && spec.kappa > 0.0 && spec.r > 0.0 &&
                spec.eta >= 8.0 * sc.q * spec.r / spec.t &&
                spec.R > std::max(2.0 * spec.eta * spec.t / sc.q, 3.0 * spec.kappa);
    if (!out.setup) detail << "setup constraints violated; ";

    const std::vector<std::int64_t> xc = scenario_x(spec, sc);
    const std::int32_t x = w.site_at(xc.data());
    if (x < 0) {
        out.detail = "near spike x outside window";
        return out;
    }
    std::int32_t xp = -1;
    if (spec.variant != ScenarioVariant::S1) {
        const std::vector<std::int64_t> xpc = scenario_xprime(spec, sc);
        xp = w.site_at(xpc.data());
        if (xp < 0) {
            out.detail = "far spike x' outside window";
            return out;
        }
    }

    out.A = env.xiT(x) >= spec.eta && env.xiT(x) < 2.0 * spec.eta;
    if (!out.A) detail << "A: xi_T(x)=" << env.xiT(x) << " outside [eta,2eta); ";

    const double ball_R = spec.R * sc.rT;
    out.B = true;
    for (std::int32_t z = 0; z < w.size(); ++z) {
        if (z == x || static_cast<double>(w.l1_micro(z)) >= ball_R) continue;
        if (env.xiT(z) > spec.eta / 2.0) {
            out.B = false;
            detail << "B: site " << z << " has xi_T=" << env.xiT(z) << "; ";
            break;
        }
    }

    const FirstPassage fp = solve_first_passage_core(w, env.xiT_all(), sc.q, 1.0 / sc.rT);
    double worst_h = 0.0;
    const double ball_r = spec.r * sc.rT;
    for (std::int32_t z = 0; z < w.size(); ++z)
        if (static_cast<double>(w.l1_micro(z)) < ball_r) worst_h = std::max(worst_h, fp.h[z]);
    out.C = worst_h <= spec.t / 8.0;
    if (!out.C) detail << "C: max h over L_T(0,r)=" << worst_h << " > t/8; ";

    out.S = true;
    for (std::int32_t y = 0; y < w.size(); ++y) {
        if (static_cast<double>(w.l1_micro(y)) < ball_R) continue;
        const double dist = static_cast<double>(w.l1_micro(y)) / sc.rT;
        if (spec.variant == ScenarioVariant::S3) {
            if (y == xp) continue;
            if (!(env.xiT(y) < sc.q * dist / spec.t)) {
                out.S = false;
                detail << "S3 exterior bound fails at site " << y << "; ";
                break;
            }
        } else {
            if (spec.variant == ScenarioVariant::S2 && y == xp) continue;
            if (!(env.xiT(y) < spec.eta + sc.q * (dist - spec.r) / spec.t)) {
                out.S = false;
                detail << "exterior cone bound fails at site " << y << "; ";
                break;
            }
        }
    }
    if (spec.variant == ScenarioVariant::S2 && out.S) {
        const double need = 2.0 * spec.eta + sc.q * (spec.R + 1.0) / spec.t;
        if (!(env.xiT(xp) > need)) {
            out.S = false;
            detail << "S2: xi_T(x')=" << env.xiT(xp) << " <= " << need << "; ";
        }
    }
    if (spec.variant == ScenarioVariant::S3 && out.S) {
        const double lo = (2.0 * spec.R + 1.0) * sc.q / spec.t;
        const double hi = 2.5 * spec.R * sc.q / spec.t;
        const double dist = static_cast<double>(w.l1_micro(xp)) / sc.rT;
        if (!(env.xiT(xp) > lo && env.xiT(xp) < hi && dist >= 2.0 * spec.R &&
              dist <= 2.0 * spec.R + 1.0)) {
            out.S = false;
            detail << "S3: x' position/value outside band; ";
        }
    }

    out.ok = out.setup && out.A && out.B && out.C && out.S;
    out.detail = detail.str();
    return out;
}

// --- closed-form diagnostics ----------------------------------------------

double log_poisson_upper_tail(double mean, std::int64_t n) {
    if (n <= 0) return 0.0;
    if (!(mean > 0.0)) return -kInfty;
    const auto log_term = [mean](std::int64_t k) {
        return -mean + static_cast<double>(k) * std::log(mean) -
               std::lgamma(static_cast<double>(k) + 1.0);
    };
    if (static_cast<double>(n) > mean) {
        // sum decreasing terms from n upward
        const double lt0 = log_term(n);
        double scaled = 1.0, term = 1.0;
        for (std::int64_t k = n + 1; term > 1e-25; ++k) {
            term *= mean / static_cast<double>(k);
            scaled += term;
        }
        return lt0 + std::log(scaled);
    }
    // complement: P(N <= n-1), increasing terms toward k = n-1
    const double lt0 = log_term(n - 1);
    double scaled = 1.0, term = 1.0;
    for (std::int64_t k = n - 1; k >= 1; --k) {
        term *= static_cast<double>(k) / mean;
        scaled += term;
        if (term < 1e-25) break;
    }
    const double log_lower = lt0 + std::log(scaled);
    return std::log1p(-std::exp(log_lower));
}

double log_jump_tail(double s, double R, const ScalingConstants& sc) {
    if (!(s > 0.0) || !(R > 0.0))
        throw std::invalid_argument("jump_tail: s and R must be positive");
    const double mean = 2.0 * sc.d * s * sc.T;
    const std::int64_t n = static_cast<std::int64_t>(std::ceil(R * sc.rT));
    return log_poisson_upper_tail(mean, n);
}

double jump_tail(double s, double R, const ScalingConstants& sc) {
    return std::exp(log_jump_tail(s, R, sc));
}

std::pair<double, double> error_terms(double s, double R, const ScalingConstants& sc) {
    if (!(s > 0.0) || !(R > 0.0))
        throw std::invalid_argument("error_terms: s and R must be positive");
    const double logT = std::log(sc.T);
    const double e1 = R / logT * (std::log(R) - std::log(s)) + 2.0 * sc.d * s / sc.aT;
    const double e2 = R / logT *
                      (std::log(s) - std::log(R) + 1.0 + std::log(2.0 * sc.d) +
                       (sc.q + 1.0) * std::log(logT));
    return {e1, e2};
}

// --- BRW vs lilypad comparison ---------------------------------------------

ComparisonReport compare(const BRWRecord& record, const LilypadField& field,
                         const std::vector<double>& times, double hit_radius) {
    if (&record.env() != &field.env())
        throw std::invalid_argument("compare: record and field use different environments");
    if (field.kind() != FieldKind::brw)
        throw std::invalid_argument("compare: field must be a BRW hitting field");
    if (times.empty()) throw std::invalid_argument("compare: need at least one time");

    const auto& sc = record.env().scaling();
    const Window& w = record.env().window();
    ComparisonReport rep;
    rep.times = times;
    rep.hit_radius = hit_radius;
    rep.truncated = record.truncated();
    rep.leaked = record.leaked();
    rep.certificate = exactness_certificate(field, record.env().window_radius());

    for (double t : times) {
        const std::vector<double> M = rescaled_counts(record, t);
        const MassField m = mass_field(field, t, EnvelopeMode::sweep);
        for (std::int32_t z = 0; z < w.size(); ++z)
            rep.sup_mass_dev = std::max(rep.sup_mass_dev, std::abs(M[z] - m.value(z)));

        const SupportSet sim = support_from_record(record, t);
        const SupportSet lily = support_from_field(field, t);
        rep.hausdorff.push_back(sim.sites.empty() || lily.sites.empty()
                                    ? std::numeric_limits<double>::quiet_NaN()
                                    : hausdorff_l1(sim, lily));
        if (t == times.back()) rep.lily_argmax = maximizer(m);
    }

    const HittingFields hf = hitting_fields(record);
    const double horizon_macro = record.horizon_micro() / sc.T;
    const double ball = hit_radius * sc.rT;
    for (std::int32_t z = 0; z < w.size(); ++z) {
        if (static_cast<double>(w.l1_micro(z)) >= ball) continue;
        const bool sim_hit = hf.H[z] < kInfty;
        const bool lily_hit = field.h(z) <= horizon_macro;
        if (sim_hit != lily_hit) ++rep.hit_status_mismatch;
        if (sim_hit && lily_hit)
            rep.sup_hit_dev = std::max(rep.sup_hit_dev, std::abs(hf.H[z] - field.h(z)));
    }

    const std::vector<double> M_last = rescaled_counts(record, times.back());
    std::int32_t best = 0;
    for (std::int32_t z = 1; z < w.size(); ++z)
        if (M_last[z] > M_last[best]) best = z;
    rep.brw_argmax = best;
    rep.argmax_separation =
        static_cast<double>(w.l1_micro(rep.brw_argmax, rep.lily_argmax)) / sc.rT;

    double total = 0.0;
    for (double c : record.snapshot_at(times.back()).counts) total += c;
    rep.intermittency = total > 0.0
                            ? intermittency_ratio(record, times.back(), rep.brw_argmax, sc.epsT)
                            : std::numeric_limits<double>::quiet_NaN();
    return rep;
}

}  // namespace lilypad
