#pragma once

#include <cmath>
#include <numbers>

#include "slice/models.hpp"

namespace slice::test {

inline constexpr double kPi = std::numbers::pi;

/// Smooth state with w = 0 on the walls built from a streamfunction.
inline SliceState smooth_state(const Grid& g, double amp, bool compressible) {
    SliceState st = SliceState::zeros(g, compressible);
    const double kx = 2 * kPi / g.L, mz = kPi / g.H;
    st.u = ScalarField::from_function(g, [&](double x, double z) {
        return amp * (mz * std::sin(kx * x + 0.3) * std::cos(mz * z) + 0.5 * std::cos(mz * z));
    });
    st.w = ScalarField::from_function(g, [&](double x, double z) {
        return -amp * kx * std::cos(kx * x + 0.3) * std::sin(mz * z);
    });
    st.uT = ScalarField::from_function(g, [&](double x, double z) {
        return amp * (std::cos(kx * x) * std::cos(mz * z) + 0.3 * std::sin(2 * kx * x));
    });
    st.thetaS = ScalarField::from_function(g, [&](double x, double z) {
        return 0.1 * std::sin(kx * x + 1.0) * std::cos(mz * z) + 0.02 * z / g.H;
    });
    return st;
}

/// Scale a field so its magnitude is comparable to u.
inline double rel(const ScalarField& a, const ScalarField& b) {
    const double s = std::max(b.max_abs(), 1e-300);
    return (a - b).max_abs() / s;
}

}  // namespace slice::test
