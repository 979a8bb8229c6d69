#include "lilypad/scaling.hpp"

#include <cmath>
#include <string>

namespace lilypad {

ScalingConstants derive_scaling(int d, double alpha, double T) {
    if (d < 1) throw std::invalid_argument("derive_scaling: dimension must be >= 1");
    if (!(alpha > static_cast<double>(d)))
        throw std::invalid_argument("derive_scaling: need alpha > d, got alpha=" +
                                    std::to_string(alpha) + " d=" + std::to_string(d));
    if (!(T >= std::exp(1.0)))
        throw std::invalid_argument("derive_scaling: need T >= e, got T=" + std::to_string(T));

    ScalingConstants s;
    s.d = d;
    s.alpha = alpha;
    s.T = T;
    s.q = static_cast<double>(d) / (alpha - static_cast<double>(d));
    const double base = T / std::log(T);
    s.aT = std::pow(base, s.q);
    s.rT = std::pow(base, s.q + 1.0);
    s.muT = std::pow(std::log(T), 0.25);
    s.epsT = (3.0 / s.q) * std::pow(std::log(T), -0.25);
    return s;
}

}  // namespace lilypad
