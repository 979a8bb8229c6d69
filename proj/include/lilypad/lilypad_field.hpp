#pragma once

#include <limits>
#include <memory>
#include <vector>

#include "lilypad/environment.hpp"

// First-passage structure of the lilypad model. For the BRW variant the
// hitting times solve
//
//   h(0) = 0,   h(z) = min_{y != z} { h(y) + q |z - y| / xi_T(y) }
//
// on the window (distances macro: integer micro l1 divided by r(T)); for the
// PAM variant
//
//   tau(z) = min_y { q (|y| + |z - y|) / xi_T(y) },
//
// the best single relay y whose lilypad is seeded straight from the origin.
// Both are solved by an O(n^2) scan-based Dijkstra / direct scan on the
// complete graph; ties in the settle order and in every argmin are broken by
// lexicographic micro-coordinate order (= site id order). Values are never
// +inf on a window (potentials are floored at 1/a(T)), but the solver keeps
// the sentinel so partial relaxation states are representable.

namespace lilypad {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class FieldKind { brw, pam };

struct FirstPassage {
    std::vector<double> h;
    std::vector<std::int32_t> pred;  // -1 at the origin
    std::vector<std::int32_t> settle_order;
};

// Cost of relaxing y -> z. The operation order (q * l1) * spacing / xi is
// fixed: the Bellman-Ford oracle in the tests reproduces it literally so the
// two algorithms agree bit for bit.
inline double edge_cost(double q, std::int64_t l1, double spacing, double xi_T_from) {
    return q * static_cast<double>(l1) * spacing / xi_T_from;
}

// Core solvers on a bare window with explicit spacing; the public functions
// wrap them with spacing = 1/r(T). Kept separate so unit-spacing reference
// cases are expressible.
FirstPassage solve_first_passage_core(const Window& w, const std::vector<double>& xiT,
                                      double q, double spacing);
FirstPassage pam_tau_core(const Window& w, const std::vector<double>& xiT,
                          double q, double spacing);

class LilypadField {
  public:
    LilypadField(std::shared_ptr<const Environment> env, FieldKind kind, FirstPassage fp)
        : env_(std::move(env)), kind_(kind), fp_(std::move(fp)) {}

    const Environment& env() const { return *env_; }
    const std::shared_ptr<const Environment>& env_ptr() const { return env_; }
    FieldKind kind() const { return kind_; }

    double h(std::int32_t site) const { return fp_.h[site]; }
    const std::vector<double>& h_all() const { return fp_.h; }
    std::int32_t pred(std::int32_t site) const { return fp_.pred[site]; }
    const std::vector<std::int32_t>& settle_order() const { return fp_.settle_order; }

  private:
    std::shared_ptr<const Environment> env_;
    FieldKind kind_;
    FirstPassage fp_;
};

LilypadField solve_hitting_times(std::shared_ptr<const Environment> env);
LilypadField pam_tau(std::shared_ptr<const Environment> env);

// Optimal path from `site` back to the origin: [z, y_1, ..., 0]. For the BRW
// field this is the predecessor chain (costs telescope to h(z), potentials
// along y_1.. are non-increasing); for the PAM field it is the single relay
// [z, y*, 0].
std::vector<std::int32_t> optimal_path(const LilypadField& field, std::int32_t site);

// Deterministic exactness horizon for BRW hitting fields:
//
//   t* = max_{rho <= R}  q rho / max_{L_T(0,rho)} xi_T   >=   q R / xi_bar(R).
//
// Every h value strictly below t* is exact for the infinite-lattice model (no
// path can leave B(0,R) before t*, because reaching each intermediate radius
// rho already costs q rho / xi_bar(rho)). Monotone in R by construction. PAM
// fields admit no such window-local certificate and are rejected.
double exactness_certificate(const LilypadField& field, double R);

// Sites with h <= t, ascending site id.
std::vector<std::int32_t> sites_below(const LilypadField& field, double t);

}  // namespace lilypad
