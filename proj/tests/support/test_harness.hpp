#pragma once

#include <cmath>
#include <iostream>
#include <sstream>
#include <string>

namespace harness {

inline int failures = 0;
inline int checks = 0;

inline void expect(bool cond, const std::string& msg) {
    ++checks;
    if (!cond) {
        ++failures;
        std::cerr << "[FAIL] " << msg << "\n";
    }
}

inline void expect_near(double got, double want, double tol, const std::string& msg) {
    ++checks;
    const bool ok = std::isfinite(got) && std::isfinite(want) ? std::abs(got - want) <= tol
                                                              : got == want;
    if (!ok) {
        ++failures;
        std::ostringstream ss;
        ss << msg << " (got " << got << ", want " << want << " +- " << tol << ")";
        std::cerr << "[FAIL] " << ss.str() << "\n";
    }
}

inline void expect_eq_bits(double got, double want, const std::string& msg) {
    ++checks;
    const bool ok = (got == want) || (std::isnan(got) && std::isnan(want));
    if (!ok) {
        ++failures;
        std::ostringstream ss;
        ss.precision(17);
        ss << msg << " (got " << got << ", want " << want << ")";
        std::cerr << "[FAIL] " << ss.str() << "\n";
    }
}

inline int finish(const std::string& suite) {
    if (failures == 0) {
        std::cout << suite << ": all " << checks << " checks passed.\n";
        return 0;
    }
    std::cerr << suite << ": " << failures << " of " << checks << " checks failed.\n";
    return 1;
}

}  // namespace harness
