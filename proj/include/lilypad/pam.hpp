#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "lilypad/environment.hpp"

// Numerical solution of the lattice parabolic Anderson equation
//
//   d/dt u(z,t) = Delta u(z,t) + xi(z) u(z,t),   u(.,0) = delta_0,
//
// with Delta f(z) = sum_{w ~ z} (f(w) - f(z)) and absorbing (Dirichlet)
// boundary outside the window. Solutions reach exp(Theta(a(T) T)) so the
// integration runs entirely in the log domain,
//
//   d/dt v(z) = xi(z) - 2d + sum_{w ~ z} exp(v(w) - v(z)),   v = log u,
//
// with adaptive RK4 step doubling. The exp(v(w) - v(z)) coupling is stiff
// wherever a site sits far below its neighbors (in particular right after
// activation, when the relaxation rate is the reciprocal of the site's age),
// so sites more than a fixed log gap below their strongest live neighbor are
// advanced by the integrating-factor solution of u' = (xi - 2d) u + S(t),
// where S sums the live neighbors and log S is modeled across the step by a
// cubic Hermite through its endpoint values and slopes; the source integral
// is taken by Gauss-Legendre quadrature in the log domain. That update has
// no stability limit, so only the explicitly stepped subset constrains the
// step size. Sites still at v = -inf are activated by their live neighbors
// with the first-order series u(z, t+dt) ~ dt * sum_{w ~ z} u(w, t); the
// activation error is excluded from the step error norm for that one step
// and is diluted afterwards by accretion. The integrated boundary leak is
// carried in the log domain as one extra state (advanced by the same source
// form) so sum(u) + leak is checkable. NaN or overflow aborts with
// diagnostics.

namespace lilypad {

struct PamOptions {
    double tol = 1e-12;              // per-step max-norm error on log u
    double max_step_micro = 1e18;    // optional user cap
    std::uint64_t max_steps = 50'000'000;
};

struct PamStats {
    std::uint64_t accepted = 0;
    std::uint64_t rejected = 0;
    double min_step = 1e18;
};

// Low-level stepper over a bare window and raw potential vector (which may be
// any values, e.g. identically zero; the environment wrapper passes xi >= 1).
class PamIntegrator {
  public:
    PamIntegrator(const Window& w, std::vector<double> xi_raw, PamOptions opts);

    void set_state(std::vector<double> v, double log_leak, double t);
    void advance_to(double t_target);

    double time() const { return t_; }
    const std::vector<double>& v() const { return v_; }
    double log_leak() const { return log_leak_; }
    const PamStats& stats() const { return stats_; }

  private:
    struct StepState {
        std::vector<double> v;
        double log_leak;
        std::vector<char> active;
    };
    void integrate_once(StepState& st, double dt) const;

    const Window* w_;
    std::vector<double> xi_;
    PamOptions opts_;
    std::vector<double> v_;
    double log_leak_ = 0.0;
    double t_ = 0.0;
    double step_ = 0.0;
    std::vector<char> active_;
    PamStats stats_;
    double rate_scale_ = 1.0;  // stability scale of the explicitly stepped subset
};

struct PamSolution {
    std::vector<double> xi_raw;  // potential used, kept for refinement
    std::vector<double> grid_micro;
    std::vector<std::vector<double>> logu;  // per grid time, -inf for u = 0
    std::vector<double> log_leak;
    PamStats stats;
};

PamSolution solve_pam_core(const Window& w, const std::vector<double>& xi_raw,
                           double horizon_micro, int grid_steps, PamOptions opts = {});

class PamField {
  public:
    PamField(std::shared_ptr<const Environment> env, double t_end_macro,
             PamSolution sol, PamOptions opts)
        : env_(std::move(env)), t_end_(t_end_macro), sol_(std::move(sol)), opts_(opts) {}

    const Environment& env() const { return *env_; }
    const std::shared_ptr<const Environment>& env_ptr() const { return env_; }
    double t_end_macro() const { return t_end_; }
    const std::vector<double>& grid_micro() const { return sol_.grid_micro; }
    const std::vector<double>& logu(std::size_t grid_idx) const { return sol_.logu[grid_idx]; }
    double log_leak(std::size_t grid_idx) const { return sol_.log_leak[grid_idx]; }
    const PamStats& stats() const { return sol_.stats; }

    // Rescaled growth profile Lambda_T(z,t) = log_+ u / (a(T) T); t must lie
    // on the grid.
    std::vector<double> growth(double t_macro) const;

    // Rescaled hitting times script-T(z) = inf { t : u(r(T)z, tT) >= 1 } in
    // macro units, +inf if never on the horizon. Grid crossings are refined
    // by bisection, re-integrating from the bracketing grid state.
    std::vector<double> hitting() const;

  private:
    std::size_t grid_index(double t_micro) const;

    std::shared_ptr<const Environment> env_;
    double t_end_;
    PamSolution sol_;
    PamOptions opts_;
};

PamField solve_pam(std::shared_ptr<const Environment> env, double t_end_macro,
                   int grid_steps, PamOptions opts = {});

}  // namespace lilypad
