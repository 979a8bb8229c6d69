#include "lilypad/mass_field.hpp"

#include <stdexcept>

namespace lilypad {

namespace {

double cone_drop(double q, std::int64_t l1, double spacing) {
    return q * static_cast<double>(l1) * spacing;
}

// Seed heights for m_T: f(y) = xi_T(y) (t - h(y))_+, zero for unhit sites.
std::vector<double> brw_seeds(const LilypadField& field, double t) {
    const std::int32_t n = field.env().window().size();
    std::vector<double> f(n, 0.0);
    for (std::int32_t y = 0; y < n; ++y) {
        const double slack = t - field.h(y);
        if (slack > 0.0) f[y] = field.env().xiT(y) * slack;
    }
    return f;
}

// Seed heights for lambda_T: g(y) = xi_T(y) t - q |y| (may be negative).
std::vector<double> pam_seeds(const Environment& env, double t) {
    const Window& w = env.window();
    const auto& s = env.scaling();
    const double spacing = 1.0 / s.rT;
    std::vector<double> g(w.size());
    for (std::int32_t y = 0; y < w.size(); ++y)
        g[y] = env.xiT(y) * t - cone_drop(s.q, w.l1_micro(y), spacing);
    return g;
}

}  // namespace

std::vector<double> cone_envelope_naive(const Window& w, const std::vector<double>& f,
                                        double q, double spacing) {
    const std::int32_t n = w.size();
    std::vector<double> out(n, -kInf);
    for (std::int32_t z = 0; z < n; ++z)
        for (std::int32_t y = 0; y < n; ++y) {
            const double v = f[y] - cone_drop(q, w.l1_micro(y, z), spacing);
            if (v > out[z]) out[z] = v;
        }
    return out;
}

std::vector<double> cone_envelope_sweep(const Window& w, const std::vector<double>& f,
                                        double q, double spacing) {
    const int d = w.dim();
    const std::int64_t M = w.half_extent();
    const double step = q * spacing;  // drop per lattice step
    std::vector<double> out = f;

    // One directional sweep: visit cells with axis k ascending when sigma_k
    // is +1, descending otherwise, relaxing from the neighbor just visited.
    const auto sweep = [&](unsigned sigma) {
        bool changed = false;
        std::vector<std::int64_t> c(d);
        std::vector<int> sgn(d);
        for (int k = 0; k < d; ++k) {
            sgn[k] = (sigma >> k) & 1u ? 1 : -1;
            c[k] = sgn[k] > 0 ? -M : M;
        }
        while (true) {
            const std::int32_t z = w.site_at(c.data());
            if (z >= 0) {
                for (int k = 0; k < d; ++k) {
                    const std::int32_t nb = w.neighbor(z, k, -sgn[k]);
                    if (nb < 0) continue;
                    const double cand = out[nb] - step;
                    if (cand > out[z]) {
                        out[z] = cand;
                        changed = true;
                    }
                }
            }
            int k = d - 1;
            for (; k >= 0; --k) {
                c[k] += sgn[k];
                if (c[k] >= -M && c[k] <= M) break;
                c[k] = sgn[k] > 0 ? -M : M;
            }
            if (k < 0) break;
        }
        return changed;
    };

    // The full set of 2^d sweeps, repeated to a fixed point. Two rounds
    // suffice for a cone metric on an l1 ball; convergence is asserted, not
    // assumed.
    const int max_rounds = 16;
    for (int round = 0; round < max_rounds; ++round) {
        bool changed = false;
        for (unsigned sigma = 0; sigma < (1u << d); ++sigma)
            changed = sweep(sigma) || changed;
        if (!changed) return out;
    }
    throw std::logic_error("cone_envelope_sweep: no fixed point after 16 rounds");
}

MassField mass_field(const LilypadField& field, double t, EnvelopeMode mode) {
    if (field.kind() != FieldKind::brw)
        throw std::invalid_argument("mass_field: requires a BRW hitting field");
    if (!(t >= 0.0)) throw std::invalid_argument("mass_field: time must be >= 0");
    const auto& s = field.env().scaling();
    const std::vector<double> f = brw_seeds(field, t);
    std::vector<double> values =
        mode == EnvelopeMode::naive
            ? cone_envelope_naive(field.env().window(), f, s.q, 1.0 / s.rT)
            : cone_envelope_sweep(field.env().window(), f, s.q, 1.0 / s.rT);
    return MassField(field.env_ptr(), MassKind::brw_profile, t, std::move(values));
}

MassField pam_lambda(std::shared_ptr<const Environment> env, double t, EnvelopeMode mode) {
    if (!(t >= 0.0)) throw std::invalid_argument("pam_lambda: time must be >= 0");
    const auto& s = env->scaling();
    const std::vector<double> g = pam_seeds(*env, t);
    std::vector<double> values = mode == EnvelopeMode::naive
                                     ? cone_envelope_naive(env->window(), g, s.q, 1.0 / s.rT)
                                     : cone_envelope_sweep(env->window(), g, s.q, 1.0 / s.rT);
    for (double& v : values)
        if (v < 0.0) v = 0.0;
    return MassField(std::move(env), MassKind::pam_profile, t, std::move(values));
}

std::vector<double> pam_lambda_alt(const LilypadField& tau_field, double t) {
    if (tau_field.kind() != FieldKind::pam)
        throw std::invalid_argument("pam_lambda_alt: requires a tau field");
    const auto& env = tau_field.env();
    const auto& s = env.scaling();
    const std::int32_t n = env.window().size();
    std::vector<double> f(n, 0.0);
    for (std::int32_t y = 0; y < n; ++y) {
        const double slack = t - tau_field.h(y);
        if (slack > 0.0) f[y] = env.xiT(y) * slack;
    }
    return cone_envelope_naive(env.window(), f, s.q, 1.0 / s.rT);
}

}  // namespace lilypad
