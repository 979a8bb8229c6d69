#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "lilypad/lattice.hpp"
#include "lilypad/scaling.hpp"

// Pareto random potential on a lattice window. Raw potentials xi(z) >= 1 are
// i.i.d. with P(xi > x) = x^-alpha, drawn by inverse CDF xi = U^(-1/alpha)
// (U uniform on (0,1]) in site enumeration order, one value per site, from the
// stream derived from the seed. Rescaled potentials are xi_T(z) = xi / a(T);
// the raw column is canonical and xi_T is derived from it exactly once, so the
// pair never drifts apart.

namespace lilypad {

class Environment {
  public:
    // i.i.d. Pareto(alpha) potential on the open macro ball B(0, R).
    // Requires R * r(T) >= 1 (window contains at least the origin).
    static Environment sample(const ScalingConstants& scaling, double R, std::uint64_t seed);

    // Deterministic potential: every site starts at the raw floor xi = 1 and
    // listed sites (micro coordinates) are assigned the given *rescaled*
    // values. Values below the floor 1/a(T) are rejected, as are coordinates
    // outside the window.
    static Environment with_potential(
        const ScalingConstants& scaling, double R,
        const std::vector<std::pair<std::vector<std::int64_t>, double>>& rescaled);

    const ScalingConstants& scaling() const { return scaling_; }
    const Window& window() const { return window_; }
    double window_radius() const { return R_; }
    std::uint64_t seed() const { return seed_; }

    double xi(std::int32_t site) const { return xi_[site]; }
    double xiT(std::int32_t site) const { return xiT_[site]; }
    const std::vector<double>& xiT_all() const { return xiT_; }

    // Max rescaled potential over the sub-window L_T(0, R'), 0 if empty.
    // R' may not exceed the window radius.
    double max_potential(double R_sub) const;

    // Number of sites in L_T(0, R') with xi_T >= nu.
    std::int64_t tail_count(double R_sub, double nu) const;

    // Columnar text serialization; bit-exact round-trip.
    void save(std::ostream& out) const;
    static Environment load(std::istream& in);

  private:
    Environment(const ScalingConstants& s, double R, std::uint64_t seed);

    ScalingConstants scaling_;
    double R_ = 0.0;
    std::uint64_t seed_ = 0;
    Window window_;
    std::vector<double> xi_;
    std::vector<double> xiT_;
};

}  // namespace lilypad
