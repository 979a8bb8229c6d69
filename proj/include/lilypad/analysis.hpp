#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "lilypad/brw.hpp"
#include "lilypad/mass_field.hpp"
#include "lilypad/pam.hpp"

// Cross-model analysis: supports and their Hausdorff distances, profile
// maximizers, intermittency mass fractions, constructed spike scenarios with
// machine-checkable conditions, and the closed-form error/tail diagnostics.

namespace lilypad {

enum class SupportSource { brw_lilypad, brw_simulated, pam_lilypad, pam_numeric };

struct SupportSet {
    std::shared_ptr<const Environment> env;
    double t = 0.0;
    SupportSource source = SupportSource::brw_lilypad;
    std::vector<std::int32_t> sites;  // ascending site ids
};

SupportSet support_from_field(const LilypadField& field, double t);
SupportSet support_from_record(const BRWRecord& record, double t);
SupportSet support_from_pam(const PamField& field, const std::vector<double>& hitting,
                            double t);

// l1 Hausdorff distance in macro units; rejects empty sets.
double hausdorff_l1(const SupportSet& a, const SupportSet& b);

// Argmax site, lexicographic micro-coordinate order on ties.
std::int32_t maximizer(const MassField& field);

// Fraction of total particle mass inside the open macro ball around `center`
// at snapshot time t. Rejects a zero total.
double intermittency_ratio(const BRWRecord& record, double t_macro, std::int32_t center,
                           double radius_macro);

// Number of nearest-neighbor connected components of a support.
int connected_components(const SupportSet& support);

// --- constructed spike scenarios ---------------------------------------
//
// Deterministic environments realizing the separation scenarios: one spike x
// near the origin carries xi_T in [eta, 2 eta), everything else in B(0,R) sits
// at or below eta/2, and the exterior is shaped per variant: S1 caps every
// exterior site below the cone eta + q(|y|-r)/t (BRW and PAM profiles agree
// and localize at x); S2 adds a far spike x' in the shell between R and R+1
// strong enough to win the PAM profile but not the BRW one; S3 plants x' near
// 2R sized so the PAM support splits into two distant components while the
// BRW support stays connected.

enum class ScenarioVariant { S1, S2, S3 };

struct ScenarioSpec {
    ScenarioVariant variant = ScenarioVariant::S1;
    double t = 1.0;
    double kappa = 0.5;
    double r = 0.1;
    double eta = 2.0;
    double R = 4.5;
    double window_radius = 0.0;  // 0: derived from the variant
};

double scenario_window_radius(const ScenarioSpec& spec, const ScalingConstants& sc);
// Micro coordinates of the near spike x and (S2/S3) the far spike x'; pure in
// (spec, scaling) so checking does not depend on construction.
std::vector<std::int64_t> scenario_x(const ScenarioSpec& spec, const ScalingConstants& sc);
std::vector<std::int64_t> scenario_xprime(const ScenarioSpec& spec, const ScalingConstants& sc);

Environment build_scenario(const ScenarioSpec& spec, const ScalingConstants& sc);

struct ScenarioCheck {
    bool setup = false;  // parameter constraints of the scenario family
    bool A = false;      // xi_T(x) in [eta, 2 eta)
    bool B = false;      // rest of B(0,R) at or below eta/2
    bool C = false;      // max_{L_T(0,r)} h_T <= t/8 (lilypad solve)
    bool S = false;      // the variant's exterior condition
    bool ok = false;
    std::string detail;
};

ScenarioCheck check_scenario(const Environment& env, const ScenarioSpec& spec);

// --- closed-form diagnostics --------------------------------------------

// log P(Poisson(mean) >= n), exact log-domain summation.
double log_poisson_upper_tail(double mean, std::int64_t n);

// Probability that a single random walk makes at least R r(T) jumps by micro
// time s T: P(Poisson(2 d s T) >= ceil(R r(T))), and its log form for the
// regime where the probability underflows.
double jump_tail(double s, double R, const ScalingConstants& sc);
double log_jump_tail(double s, double R, const ScalingConstants& sc);

// The two bookkeeping error terms:
//   E1(s,R) = (R/log T)(log R - log s) + 2 d s / a(T)
//   E2(s,R) = (R/log T)(log s - log R + 1 + log 2d + (q+1) log log T)
std::pair<double, double> error_terms(double s, double R, const ScalingConstants& sc);

// --- BRW vs lilypad comparison -------------------------------------------

struct ComparisonReport {
    std::vector<double> times;  // macro snapshot times compared
    double hit_radius = 0.0;
    double sup_mass_dev = 0.0;            // sup_t sup_z |M_T - m_T|
    double sup_hit_dev = 0.0;             // sup |H_T - h_T| over both-hit ball sites
    std::int64_t hit_status_mismatch = 0; // hit-by-horizon disagreements in the ball
    std::vector<double> hausdorff;        // d_H(S_T(t), s_T(t)); NaN if a side is empty
    std::int32_t brw_argmax = -1;
    std::int32_t lily_argmax = -1;
    double argmax_separation = 0.0;       // macro l1
    double intermittency = 0.0;           // mass fraction in eps_T ball at last time
    double certificate = 0.0;             // exactness horizon t* of the window
    bool truncated = false;
    double leaked = 0.0;
};

ComparisonReport compare(const BRWRecord& record, const LilypadField& field,
                         const std::vector<double>& times, double hit_radius);

}  // namespace lilypad
