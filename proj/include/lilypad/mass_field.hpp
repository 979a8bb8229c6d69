#pragma once

#include <memory>
#include <vector>

#include "lilypad/lilypad_field.hpp"

// Rescaled mass profiles. For the BRW lilypad model
//
//   m_T(z, t) = sup_y { xi_T(y) (t - h_T(y))_+  -  q |z - y| }
//
// and for the PAM lilypad model
//
//   lambda_T(z, t) = sup_y { xi_T(y) t - q |y| - q |z - y| }  v  0 .
//
// Both are cone envelopes: every contributor y supports a slope-q l1 cone and
// the field is the upper envelope. Two interchangeable evaluation modes:
// a naive O(n^2) scan, and max-plus dynamic programming that relaxes
// m(z) <- max(m(z), m(w) - q/r(T)) from lattice neighbors in 2^d directional
// sweeps repeated to a fixed point. m_T is nonnegative without clipping (the
// y = z self-term contributes at least 0); lambda_T is clipped per definition.

namespace lilypad {

enum class MassKind { brw_profile, pam_profile };
enum class EnvelopeMode { naive, sweep };

class MassField {
  public:
    MassField(std::shared_ptr<const Environment> env, MassKind kind, double t,
              std::vector<double> values)
        : env_(std::move(env)), kind_(kind), t_(t), values_(std::move(values)) {}

    const Environment& env() const { return *env_; }
    const std::shared_ptr<const Environment>& env_ptr() const { return env_; }
    MassKind kind() const { return kind_; }
    double t() const { return t_; }
    double value(std::int32_t site) const { return values_[site]; }
    const std::vector<double>& values() const { return values_; }

  private:
    std::shared_ptr<const Environment> env_;
    MassKind kind_;
    double t_;
    std::vector<double> values_;
};

// Upper envelope of slope-q l1 cones seeded at heights f: out(z) = max_y
// (f(y) - q |z-y| spacing). Core forms with explicit spacing; unit-spacing
// reference cases call these directly.
std::vector<double> cone_envelope_naive(const Window& w, const std::vector<double>& f,
                                        double q, double spacing);
std::vector<double> cone_envelope_sweep(const Window& w, const std::vector<double>& f,
                                        double q, double spacing);

// m_T(., t) from a solved BRW hitting field.
MassField mass_field(const LilypadField& field, double t, EnvelopeMode mode);

// lambda_T(., t) straight from the potential.
MassField pam_lambda(std::shared_ptr<const Environment> env, double t, EnvelopeMode mode);

// Alternate lambda_T form routed through tau: sup_y { xi_T(y) (t - tau(y))_+
// - q |z - y| }. Equal to pam_lambda on the window; kept separate so the
// identity is checkable.
std::vector<double> pam_lambda_alt(const LilypadField& tau_field, double t);

}  // namespace lilypad
