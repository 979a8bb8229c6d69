#include "lilypad/pam.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lilypad {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Log gap to the strongest live neighbor above which the explicit step is
// unstable and the site switches to the integrating-factor source update.
constexpr double kSlaveGap = 3.0;

// Sites this far (in log u) below the current peak are excluded from the
// step error norm: their absolute error cannot contaminate anything above
// exp(-kErrWindow) relative mass, and it is diluted by later accretion long
// before they climb back into the controlled band.
constexpr double kErrWindow = 120.0;

// 5-point Gauss-Legendre nodes and weights on (0, 1).
constexpr double kGx[5] = {0.04691007703066800, 0.23076534494715845, 0.5,
                           0.76923465505284155, 0.95308992296933200};
constexpr double kGw[5] = {0.11846344252809454, 0.23931433524968324,
                           0.28444444444444444, 0.23931433524968324,
                           0.11846344252809454};

double lse2(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

double logsumexp5(const double* t) {
    double m = t[0];
    for (int j = 1; j < 5; ++j) m = std::max(m, t[j]);
    if (m == kNegInf) return kNegInf;
    double s = 0.0;
    for (int j = 0; j < 5; ++j) s += std::exp(t[j] - m);
    return m + std::log(s);
}

double safe_exp_diff(double a, double b) {
    const double e = a - b;
    return std::exp(e > 700.0 ? 700.0 : e);
}

// log u after dt for u' = c u + S(s), with log S(s) the cubic Hermite through
// (L0, m0) at s = 0 and (L1, m1) at s = dt, integrated by Gauss-Legendre in
// the log domain. v_pre may be -inf (activation from u = 0); L0 must be
// finite.
double source_update(double v_pre, double c, double dt, double L0, double m0,
                     double L1, double m1) {
    double terms[5];
    for (int j = 0; j < 5; ++j) {
        const double x = kGx[j];
        const double x2 = x * x;
        const double x3 = x2 * x;
        const double h00 = 2.0 * x3 - 3.0 * x2 + 1.0;
        const double h10 = x3 - 2.0 * x2 + x;
        const double h01 = -2.0 * x3 + 3.0 * x2;
        const double h11 = x3 - x2;
        const double H = L0 * h00 + dt * m0 * h10 + L1 * h01 + dt * m1 * h11;
        terms[j] = std::log(kGw[j]) + c * dt * (1.0 - x) + H;
    }
    const double log_integral = std::log(dt) + logsumexp5(terms);
    const double carried = v_pre == kNegInf ? kNegInf : v_pre + c * dt;
    return lse2(carried, log_integral);
}

}  // namespace

PamIntegrator::PamIntegrator(const Window& w, std::vector<double> xi_raw, PamOptions opts)
    : w_(&w), xi_(std::move(xi_raw)), opts_(opts) {
    if (static_cast<std::int32_t>(xi_.size()) != w.size())
        throw std::invalid_argument("PamIntegrator: potential size mismatch");
    double xi_max = 0.0;
    for (double x : xi_) xi_max = std::max(xi_max, x);
    rate_scale_ = xi_max + 2.0 * w.dim() * std::exp(kSlaveGap) + 1.0;
    v_.assign(xi_.size(), kNegInf);
    active_.assign(xi_.size(), 0);
    log_leak_ = kNegInf;
    step_ = 0.05 / rate_scale_;
}

void PamIntegrator::set_state(std::vector<double> v, double log_leak, double t) {
    if (v.size() != xi_.size())
        throw std::invalid_argument("PamIntegrator: state size mismatch");
    v_ = std::move(v);
    log_leak_ = log_leak;
    t_ = t;
    for (std::size_t z = 0; z < v_.size(); ++z) active_[z] = v_[z] != kNegInf;
    step_ = 0.05 / rate_scale_;
}

void PamIntegrator::integrate_once(StepState& st, double dt) const {
    const int d = w_->dim();
    const std::int32_t n = w_->size();
    const std::vector<double> v0 = st.v;
    const std::vector<char> live0 = st.active;
    const double ll0 = st.log_leak;

    // split the live set: explicit (RK4) sites versus source-dominated sites
    // sitting more than kSlaveGap below their strongest live neighbor, plus
    // dead sites bordering live mass (activated at the end of the step)
    std::vector<char> coupled(n, 0);
    std::vector<std::int32_t> slaved;
    std::vector<std::int32_t> births;
    for (std::int32_t z = 0; z < n; ++z) {
        double best = kNegInf;
        for (int k = 0; k < d; ++k) {
            const std::int32_t up = w_->neighbor(z, k, +1);
            const std::int32_t dn = w_->neighbor(z, k, -1);
            if (up >= 0 && live0[up]) best = std::max(best, v0[up]);
            if (dn >= 0 && live0[dn]) best = std::max(best, v0[dn]);
        }
        if (live0[z]) {
            if (best - v0[z] > kSlaveGap)
                slaved.push_back(z);
            else
                coupled[z] = 1;
        } else if (best != kNegInf) {
            births.push_back(z);
        }
    }
    std::sort(slaved.begin(), slaved.end(),
              [&](std::int32_t a, std::int32_t b) { return v0[a] > v0[b]; });

    // dv at the sites in `outputs`, inflow restricted to sites in `inflow`
    const auto deriv = [&](const std::vector<double>& vv, const std::vector<char>& inflow,
                           const std::vector<char>& outputs, std::vector<double>& dv) {
        dv.assign(n, 0.0);
        for (std::int32_t z = 0; z < n; ++z) {
            if (!outputs[z]) continue;
            double g = xi_[z] - 2.0 * d;
            for (int k = 0; k < d; ++k) {
                const std::int32_t up = w_->neighbor(z, k, +1);
                const std::int32_t dn = w_->neighbor(z, k, -1);
                if (up >= 0 && inflow[up]) g += safe_exp_diff(vv[up], vv[z]);
                if (dn >= 0 && inflow[dn]) g += safe_exp_diff(vv[dn], vv[z]);
            }
            dv[z] = g;
        }
    };

    // source of site z: endpoint logsumexp L and slope m over live neighbors
    const auto source_stats = [&](std::int32_t z, const std::vector<double>& vv,
                                  const std::vector<double>& slope, double& L, double& m) {
        L = kNegInf;
        for (int k = 0; k < d; ++k) {
            const std::int32_t up = w_->neighbor(z, k, +1);
            const std::int32_t dn = w_->neighbor(z, k, -1);
            if (up >= 0 && live0[up]) L = lse2(L, vv[up]);
            if (dn >= 0 && live0[dn]) L = lse2(L, vv[dn]);
        }
        m = 0.0;
        if (L == kNegInf) return;
        for (int k = 0; k < d; ++k) {
            const std::int32_t up = w_->neighbor(z, k, +1);
            const std::int32_t dn = w_->neighbor(z, k, -1);
            if (up >= 0 && live0[up]) m += std::exp(vv[up] - L) * slope[up];
            if (dn >= 0 && live0[dn]) m += std::exp(vv[dn] - L) * slope[dn];
        }
    };

    // advance the source-dominated sites given the coupled endpoint values in
    // vcur. Two sweeps: the first (masters first) produces tentative
    // endpoints while some neighbor entries are still pre-step; the second
    // recomputes the endpoint slopes at the tentative state and redoes the
    // updates, so the source model no longer sees stale neighbors
    const auto advance_slaved = [&](const std::vector<double>& slope0,
                                    std::vector<double>& vcur, std::vector<double>& slope1) {
        for (int sweep = 0; sweep < 2; ++sweep) {
            if (sweep == 1) deriv(vcur, live0, live0, slope1);
            for (std::int32_t z : slaved) {
                double L0, m0, L1, m1;
                source_stats(z, v0, slope0, L0, m0);
                source_stats(z, vcur, slope1, L1, m1);
                const double c = xi_[z] - 2.0 * d;
                vcur[z] = source_update(v0[z], c, dt, L0, m0, L1, m1);
                slope1[z] = c + std::exp(std::min(L1 - vcur[z], 700.0));
            }
        }
    };

    // pre-step slopes of every live site (the coupled entries double as k1)
    std::vector<double> slope0;
    deriv(v0, live0, live0, slope0);

    std::vector<double> k2, k3, k4, tmp(v0.size());

    if (slaved.empty() && births.empty()) {
        // fully explicit step
        const auto blend = [&](const std::vector<double>& k, double f) {
            for (std::int32_t i = 0; i < n; ++i)
                tmp[i] = coupled[i] ? v0[i] + f * k[i] : v0[i];
        };
        blend(slope0, 0.5 * dt);
        deriv(tmp, live0, coupled, k2);
        blend(k2, 0.5 * dt);
        deriv(tmp, live0, coupled, k3);
        blend(k3, dt);
        deriv(tmp, live0, coupled, k4);
        for (std::int32_t z = 0; z < n; ++z)
            if (coupled[z])
                st.v[z] = v0[z] + dt / 6.0 * (slope0[z] + 2.0 * k2[z] + 2.0 * k3[z] + k4[z]);
    } else {
        // birth sources, fixed over the step (first-order activation)
        std::vector<double> birth_L0(n, kNegInf);
        for (std::int32_t z : births) {
            double L0, m0;
            source_stats(z, v0, slope0, L0, m0);
            birth_L0[z] = L0;
        }

        // predictor: RK4 with every non-explicit site frozen, then the
        // source updates, giving endpoint values and slopes for the rest
        std::vector<double> vp = v0;
        {
            const auto blend = [&](const std::vector<double>& k, double f) {
                for (std::int32_t i = 0; i < n; ++i)
                    tmp[i] = coupled[i] ? v0[i] + f * k[i] : v0[i];
            };
            blend(slope0, 0.5 * dt);
            deriv(tmp, live0, coupled, k2);
            blend(k2, 0.5 * dt);
            deriv(tmp, live0, coupled, k3);
            blend(k3, dt);
            deriv(tmp, live0, coupled, k4);
            for (std::int32_t z = 0; z < n; ++z)
                if (coupled[z])
                    vp[z] = v0[z] + dt / 6.0 * (slope0[z] + 2.0 * k2[z] + 2.0 * k3[z] + k4[z]);
        }
        std::vector<double> slope1p;
        deriv(vp, live0, live0, slope1p);
        advance_slaved(slope0, vp, slope1p);

        // corrector: redo the explicit stages with the source-dominated
        // sites moving along the cubic Hermite through their predicted
        // endpoints and newborn sites turning on as u ~ s * S
        std::vector<char> live_mid = live0;
        for (std::int32_t z : births) live_mid[z] = 1;
        const auto stage = [&](const std::vector<double>& k, double f, double x) {
            const double x2 = x * x;
            const double x3 = x2 * x;
            const double h00 = 2.0 * x3 - 3.0 * x2 + 1.0;
            const double h10 = x3 - 2.0 * x2 + x;
            const double h01 = -2.0 * x3 + 3.0 * x2;
            const double h11 = x3 - x2;
            for (std::int32_t i = 0; i < n; ++i)
                tmp[i] = coupled[i] ? v0[i] + f * k[i] : v0[i];
            for (std::int32_t z : slaved)
                tmp[z] = v0[z] * h00 + dt * slope0[z] * h10 + vp[z] * h01 +
                         dt * slope1p[z] * h11;
            for (std::int32_t z : births) tmp[z] = std::log(x * dt) + birth_L0[z];
        };
        stage(slope0, 0.5 * dt, 0.5);
        deriv(tmp, live_mid, coupled, k2);
        stage(k2, 0.5 * dt, 0.5);
        deriv(tmp, live_mid, coupled, k3);
        stage(k3, dt, 1.0);
        deriv(tmp, live_mid, coupled, k4);
        for (std::int32_t z = 0; z < n; ++z)
            if (coupled[z])
                st.v[z] = v0[z] + dt / 6.0 * (slope0[z] + 2.0 * k2[z] + 2.0 * k3[z] + k4[z]);
    }

    // post-step slopes at the corrected state, then the source updates
    std::vector<double> slope1;
    deriv(st.v, live0, live0, slope1);
    advance_slaved(slope0, st.v, slope1);

    // activation: first-order series from the live neighbors' pre values
    for (std::int32_t z : births) {
        double L0, m0, L1, m1;
        source_stats(z, v0, slope0, L0, m0);
        st.v[z] = std::log(dt) + L0;
        st.active[z] = 1;
        source_stats(z, st.v, slope1, L1, m1);
        slope1[z] = (xi_[z] - 2.0 * d) + std::exp(std::min(L1 - st.v[z], 700.0));
    }

    // boundary leak: dL/dt = sum over boundary sites of missing * u, same
    // source form with c = 0 (newborn boundary sites start feeding next step)
    double L0k = kNegInf, L1k = kNegInf;
    for (std::int32_t z = 0; z < n; ++z) {
        const int miss = w_->missing_neighbors(z);
        if (miss <= 0) continue;
        const double lw = std::log(static_cast<double>(miss));
        if (live0[z]) L0k = lse2(L0k, v0[z] + lw);
        if (st.active[z]) L1k = lse2(L1k, st.v[z] + lw);
    }
    if (L0k != kNegInf) {
        double m0k = 0.0, m1k = 0.0;
        for (std::int32_t z = 0; z < n; ++z) {
            const int miss = w_->missing_neighbors(z);
            if (miss <= 0) continue;
            const double lw = std::log(static_cast<double>(miss));
            if (live0[z]) m0k += std::exp(v0[z] + lw - L0k) * slope0[z];
            if (st.active[z]) m1k += std::exp(st.v[z] + lw - L1k) * slope1[z];
        }
        st.log_leak = source_update(ll0, 0.0, dt, L0k, m0k, L1k, m1k);
    }
}

void PamIntegrator::advance_to(double t_target) {
    const double tiny = 1e-13 * std::max(1.0, std::abs(t_target));
    const double stability_cap = 2.0 / rate_scale_;

    while (t_target - t_ > tiny) {
        const double dt =
            std::min({step_, t_target - t_, opts_.max_step_micro, stability_cap});
        if (dt < 1e-15 * std::max(1.0, t_target))
            throw std::runtime_error("pam: step size underflow at t=" + std::to_string(t_));

        StepState big{v_, log_leak_, active_};
        integrate_once(big, dt);
        StepState fine{v_, log_leak_, active_};
        integrate_once(fine, 0.5 * dt);
        integrate_once(fine, 0.5 * dt);

        // compare the single step against the two half steps over sites that
        // were live at the step start (activation values are first-order and
        // heal by accretion) and within kErrWindow of the peak; the leak gets
        // the same depth cutoff, since far below the peak its log is still
        // stiff-relaxing while its mass cannot matter yet
        double vmax = kNegInf;
        for (std::size_t i = 0; i < v_.size(); ++i)
            if (active_[i]) vmax = std::max(vmax, fine.v[i]);
        double err = 0.0;
        for (std::size_t i = 0; i < v_.size(); ++i)
            if (active_[i] && fine.v[i] >= vmax - kErrWindow)
                err = std::max(err, std::abs(big.v[i] - fine.v[i]));
        if (log_leak_ != kNegInf && fine.log_leak >= vmax - kErrWindow)
            err = std::max(err, std::abs(big.log_leak - fine.log_leak));
        err *= 0.5;

        // |v| can reach thousands on long horizons; rounding noise in the
        // big/fine comparison then sits near eps * |v|, so the tolerance
        // cannot be pushed below that floor
        const double float_floor = 16.0 * std::numeric_limits<double>::epsilon() *
                                   (std::abs(vmax) + kErrWindow + 1.0);
        const double tol_eff = std::max(opts_.tol, float_floor);

        if (!std::isfinite(err)) {
            step_ = 0.25 * dt;
            ++stats_.rejected;
        } else if (err <= tol_eff) {
            v_ = std::move(fine.v);
            log_leak_ = fine.log_leak;
            active_ = std::move(fine.active);
            t_ += dt;
            ++stats_.accepted;
            stats_.min_step = std::min(stats_.min_step, dt);
            for (std::size_t i = 0; i < v_.size(); ++i)
                if (active_[i] && !std::isfinite(v_[i]))
                    throw std::runtime_error("pam: non-finite log u at t=" +
                                             std::to_string(t_) + ", site " +
                                             std::to_string(i));
            const double grow = err > 0.0 ? 0.9 * std::pow(tol_eff / err, 0.25) : 5.0;
            step_ = dt * std::clamp(grow, 0.2, 5.0);
        } else {
            step_ = dt * std::clamp(0.9 * std::pow(tol_eff / err, 0.25), 0.1, 0.9);
            ++stats_.rejected;
        }
        if (stats_.accepted + stats_.rejected > opts_.max_steps)
            throw std::runtime_error("pam: step budget exhausted (stiff system?)");
    }
    t_ = t_target;
}

PamSolution solve_pam_core(const Window& w, const std::vector<double>& xi_raw,
                           double horizon_micro, int grid_steps, PamOptions opts) {
    if (w.origin() < 0) throw std::invalid_argument("solve_pam: window lacks origin");
    if (grid_steps < 1) throw std::invalid_argument("solve_pam: need at least one grid step");
    if (!(horizon_micro > 0.0)) throw std::invalid_argument("solve_pam: horizon must be > 0");

    PamIntegrator integ(w, xi_raw, opts);
    std::vector<double> v0(w.size(), kNegInf);
    v0[w.origin()] = 0.0;  // u(., 0) = delta_0
    integ.set_state(std::move(v0), kNegInf, 0.0);

    PamSolution sol;
    sol.xi_raw = xi_raw;
    sol.grid_micro.resize(grid_steps + 1);
    for (int i = 0; i <= grid_steps; ++i)
        sol.grid_micro[i] = horizon_micro * static_cast<double>(i) / grid_steps;
    sol.logu.reserve(grid_steps + 1);
    sol.log_leak.reserve(grid_steps + 1);
    sol.logu.push_back(integ.v());
    sol.log_leak.push_back(integ.log_leak());
    for (int i = 1; i <= grid_steps; ++i) {
        integ.advance_to(sol.grid_micro[i]);
        sol.logu.push_back(integ.v());
        sol.log_leak.push_back(integ.log_leak());
    }
    sol.stats = integ.stats();
    return sol;
}

std::size_t PamField::grid_index(double t_micro) const {
    const auto& g = sol_.grid_micro;
    const double tol = 1e-9 * std::max(1.0, g.back());
    for (std::size_t i = 0; i < g.size(); ++i)
        if (std::abs(g[i] - t_micro) <= tol) return i;
    throw std::invalid_argument("PamField: time " + std::to_string(t_micro) +
                                " not on the solution grid");
}

std::vector<double> PamField::growth(double t_macro) const {
    const auto& sc = env_->scaling();
    const std::vector<double>& row = sol_.logu[grid_index(t_macro * sc.T)];
    const double denom = sc.aT * sc.T;
    std::vector<double> out(row.size(), 0.0);
    for (std::size_t z = 0; z < row.size(); ++z)
        if (row[z] > 0.0) out[z] = row[z] / denom;
    return out;
}

std::vector<double> PamField::hitting() const {
    const auto& sc = env_->scaling();
    const Window& w = env_->window();
    const std::size_t rows = sol_.logu.size();
    std::vector<double> out(w.size(), std::numeric_limits<double>::infinity());

    for (std::int32_t z = 0; z < w.size(); ++z) {
        std::size_t first = rows;
        for (std::size_t i = 0; i < rows; ++i)
            if (sol_.logu[i][z] >= 0.0) {
                first = i;
                break;
            }
        if (first == rows) continue;
        if (first == 0) {
            out[z] = 0.0;
            continue;
        }
        double lo = sol_.grid_micro[first - 1];
        double hi = sol_.grid_micro[first];
        // walker holds the state at lo, so each probe only integrates the
        // current bracket; total work stays near two bracket widths
        PamIntegrator walker(w, sol_.xi_raw, opts_);
        walker.set_state(sol_.logu[first - 1], sol_.log_leak[first - 1], lo);
        for (int iter = 0; iter < 30 && hi - lo > 1e-12 * sol_.grid_micro.back(); ++iter) {
            const double t_mid = 0.5 * (lo + hi);
            PamIntegrator probe = walker;
            probe.advance_to(t_mid);
            if (probe.v()[z] >= 0.0) {
                hi = t_mid;
            } else {
                lo = t_mid;
                walker = std::move(probe);
            }
        }
        out[z] = hi / sc.T;
    }
    return out;
}

PamField solve_pam(std::shared_ptr<const Environment> env, double t_end_macro,
                   int grid_steps, PamOptions opts) {
    const auto& sc = env->scaling();
    std::vector<double> xi(env->window().size());
    for (std::int32_t z = 0; z < env->window().size(); ++z) xi[z] = env->xi(z);
    PamSolution sol = solve_pam_core(env->window(), xi, t_end_macro * sc.T, grid_steps, opts);
    return PamField(std::move(env), t_end_macro, std::move(sol), opts);
}

}  // namespace lilypad
