#pragma once

#include <optional>
#include <utility>

#include "slice/operators.hpp"
#include "slice/state.hpp"

namespace slice {

/// (v_S, v_T, pi, gamma_S) of a slice Lagrangian.
///
/// The non-periodic f*x contributions are kept out of the stored fields:
/// the full transverse derivative is vT + f*x and the full pi is
/// pi + f*x*u_T. Only their gradients enter the dynamics and diagnostics.
struct VariationalDerivatives {
    ScalarField vS_x;
    ScalarField vS_z;
    ScalarField vT;
    ScalarField pi;
    ScalarField gammaS;
    double f = 0.0;

    /// vT + f*x with x on [0, L).
    ScalarField vT_with_x() const;
};

struct Tendencies {
    ScalarField du;
    ScalarField dw;
    ScalarField duT;
    ScalarField dthetaS;
    std::optional<ScalarField> dD;
    /// Pressure from the incompressibility projection (Eady and alpha kinds).
    std::optional<ScalarField> p;

    bool all_finite() const;
};

/// Pi = (D R theta / p0)^(R/cv).
ScalarField exner(const ScalarField& D, const ScalarField& thetaS, const ModelParams& params);

/// (dPi/dtheta, dPi/dD) = (R Pi / (cv theta), R Pi / (cv D)).
std::pair<ScalarField, ScalarField> exner_partials(const ScalarField& D, const ScalarField& thetaS,
                                                   const ModelParams& params);

// Each incompressible tendency has an overload taking a prebuilt solver so a
// time loop factorises once. The solver's alpha must match params.alpha.

Tendencies eady_tendencies(const SliceState& state, const ModelParams& params,
                           const EllipticSolverConfig& cfg = {});
Tendencies eady_tendencies(const SliceState& state, const ModelParams& params, const EllipticSolver& solver);

/// Prognostic (u, w, uT) are the unsmoothed transport velocities; the
/// smoothed momenta are formed by stencil application and the returned
/// tendencies are those of the unsmoothed fields.
Tendencies alpha_tendencies(const SliceState& state, const ModelParams& params,
                            const EllipticSolverConfig& cfg = {});
Tendencies alpha_tendencies(const SliceState& state, const ModelParams& params, const EllipticSolver& solver);

Tendencies scm_tendencies(const SliceState& state, const ModelParams& params);
Tendencies cullen_tendencies(const SliceState& state, const ModelParams& params);

/// Dispatch on kind. solver may be null, in which case one is built when needed.
Tendencies model_tendencies(ModelKind kind, const SliceState& state, const ModelParams& params,
                            const EllipticSolver* solver = nullptr, const EllipticSolverConfig& cfg = {});

/// Throws NotVariational for the Cullen model, which has no Lagrangian.
VariationalDerivatives variational_derivatives(ModelKind kind, const SliceState& state, const ModelParams& params,
                                               const EllipticSolver* solver = nullptr);

/// Momentum-form Euler-Poincare right-hand side assembled from vd, converted
/// to velocity tendencies with the kind's kinetic-energy operator and, for
/// incompressible kinds, projected.
Tendencies ep_tendencies_generic(const VariationalDerivatives& vd, const SliceState& state,
                                 const ModelParams& params, ModelKind kind,
                                 const EllipticSolver* solver = nullptr);

/// The gravity potential entering pi: (g/theta0)(z - H/2) for the Boussinesq kinds.
ScalarField boussinesq_gamma(const Grid& grid, const ModelParams& params);

}  // namespace slice

namespace slice {

/// Momentum tendencies (dm_S, dm_T) of the periodic momentum parts D*vS and
/// D*vT, converted to prognostic tendencies for the given kind. dD and the
/// thetaS tendency are filled from the state's own continuity and tracer
/// equations. Shared by the generic engine and the structure checks.
Tendencies momentum_to_velocity_tendencies(ModelKind kind, const ScalarField& dm_x, const ScalarField& dm_z,
                                           const ScalarField& dm_T, const VariationalDerivatives& vd,
                                           const SliceState& state, const ModelParams& params,
                                           const EllipticSolver* solver = nullptr);

}  // namespace slice
