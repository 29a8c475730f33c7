#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "slice/models.hpp"

namespace slice {

/// (u_S, u_T) in the slice algebra.
struct AlgebraElement {
    ScalarField xS_x;
    ScalarField xS_z;
    ScalarField xT;
};

/// (m_S, m_T) dual to the slice algebra.
struct MomentumElement {
    ScalarField mS_x;
    ScalarField mS_z;
    ScalarField mT;
};

/// ([u_S, w_S], u_S.grad w_T - w_S.grad u_T) with [u, w] = u.grad w - w.grad u.
AlgebraElement lie_bracket(const AlgebraElement& a, const AlgebraElement& b);

/// m_S' = div(u_S (x) m_S) + (grad u_S)^T m_S + m_T grad u_T, m_T' = div(u_S m_T).
MomentumElement ad_star(const AlgebraElement& a, const MomentumElement& m);

/// (-b grad theta, -b s).
MomentumElement diamond_theta(const ScalarField& b, const ScalarField& theta, double s);

/// D grad b.
std::pair<ScalarField, ScalarField> diamond_density(const ScalarField& b, const ScalarField& D);

/// <m, a> = integral(mS . uS + mT uT).
double pairing(const MomentumElement& m, const AlgebraElement& a);

/// Momentum tendency of the slice equations assembled as -ad*_u m + diamond
/// terms plus the f*x remainders, converted with the kind's operator.
Tendencies ep_tendencies_from_algebra(const VariationalDerivatives& vd, const SliceState& state,
                                      const ModelParams& params, ModelKind kind,
                                      const EllipticSolver* solver = nullptr);

struct StructureCheck {
    std::string name;
    double residual_coarse = 0.0;
    double residual_fine = 0.0;
    double ratio = 0.0;
    bool pass = false;
};

struct StructureReport {
    std::vector<StructureCheck> checks;

    bool pass() const;
    /// {check_name: {residual_coarse, residual_fine, ratio, pass}}
    std::string to_json() const;
};

/// Residuals at or below this relative size count as rounding level.
inline constexpr double kRoundingLevel = 1e-12;
/// Minimum coarse/fine residual ratio for a second-order identity.
inline constexpr double kMinRatio = 3.5;

/// Runs every identity on seeded random windowed fields on the coarse grid
/// and on its refinement (2 nx, 2 (nz - 1) + 1).
StructureReport verify_structure(const Grid& coarse, std::uint64_t seed);

/// Deterministic low-wavenumber field multiplied by sin^4(pi z / H), which
/// vanishes with its first three derivatives at the walls.
ScalarField windowed_random_field(const Grid& grid, std::uint64_t seed);

}  // namespace slice
