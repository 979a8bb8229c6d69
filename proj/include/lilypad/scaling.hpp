#pragma once

#include <stdexcept>

// The rescaling that turns the microscopic branching random walk into the
// lilypad picture. With q = d/(alpha - d):
//
//   a(T) = (T / log T)^q        potential scale
//   r(T) = (T / log T)^(q+1)    space scale
//
// so r(T)^d = a(T)^alpha, times rescale by T, potentials by a(T), distances by
// r(T). mu(T) = (log T)^(1/4) is the population threshold exponent for the
// H'_T hitting variant and eps(T) = (3/q) (log T)^(-1/4) the localisation
// radius used by intermittency diagnostics.

namespace lilypad {

struct ScalingConstants {
    int d = 0;
    double alpha = 0.0;
    double T = 0.0;
    double q = 0.0;
    double aT = 0.0;
    double rT = 0.0;
    double muT = 0.0;
    double epsT = 0.0;
};

ScalingConstants derive_scaling(int d, double alpha, double T);

}  // namespace lilypad
