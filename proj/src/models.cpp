#include "slice/models.hpp"

#include <cmath>
#include <memory>

#include "slice/error.hpp"

namespace slice {

namespace {

void check_thermo(const ScalarField& D, const ScalarField& thetaS) {
    for (double d : D.values())
        if (!(d > 0.0)) throw Error(ErrorKind::NonpositiveDensity, "density must be positive");
    for (double t : thetaS.values())
        if (!(t > 0.0)) throw Error(ErrorKind::NonpositiveTemperature, "potential temperature must be positive");
}

const EllipticSolver& solver_or_build(const Grid& grid, double alpha, const EllipticSolver* solver,
                                      const EllipticSolverConfig& cfg, std::unique_ptr<EllipticSolver>& owned) {
    if (solver) {
        if (!(solver->grid() == grid) || solver->alpha() != alpha)
            throw Error(ErrorKind::InvalidArgument, "elliptic solver does not match grid or alpha");
        return *solver;
    }
    owned = std::make_unique<EllipticSolver>(grid, alpha, cfg);
    return *owned;
}

ScalarField x_coordinate(const Grid& g) {
    return ScalarField::from_function(g, [](double x, double) { return x; });
}

}  // namespace

ScalarField VariationalDerivatives::vT_with_x() const { return vT + f * x_coordinate(vT.grid()); }

bool Tendencies::all_finite() const {
    return du.all_finite() && dw.all_finite() && duT.all_finite() && dthetaS.all_finite() &&
           (!dD || dD->all_finite()) && (!p || p->all_finite());
}

ScalarField boussinesq_gamma(const Grid& grid, const ModelParams& params) {
    const double c = params.g / params.theta0;
    return ScalarField::from_function(grid, [&](double, double z) { return c * (z - 0.5 * grid.H); });
}

ScalarField exner(const ScalarField& D, const ScalarField& thetaS, const ModelParams& params) {
    check_thermo(D, thetaS);
    const double R = params.R();
    const double expo = R / params.cv;
    ScalarField Pi(D.grid());
    auto d = D.values();
    auto t = thetaS.values();
    auto out = Pi.values();
    for (std::size_t n = 0; n < out.size(); ++n) out[n] = std::pow(d[n] * R * t[n] / params.p0, expo);
    return Pi;
}

std::pair<ScalarField, ScalarField> exner_partials(const ScalarField& D, const ScalarField& thetaS,
                                                   const ModelParams& params) {
    ScalarField Pi = exner(D, thetaS, params);
    const double c = params.R() / params.cv;
    return {c * Pi / thetaS, c * Pi / D};
}

Tendencies eady_tendencies(const SliceState& state, const ModelParams& params, const EllipticSolverConfig& cfg) {
    EllipticSolver solver(state.grid(), 0.0, cfg);
    return eady_tendencies(state, params, solver);
}

Tendencies eady_tendencies(const SliceState& state, const ModelParams& params, const EllipticSolver& solver) {
    check_state_for_kind(ModelKind::EadyBoussinesq, state);
    if (solver.alpha() != 0.0) throw Error(ErrorKind::InvalidArgument, "Eady model needs an alpha = 0 solver");
    const Grid& g = state.grid();
    const auto& [u, w, uT, th] = std::tie(state.u, state.w, state.uT, state.thetaS);
    const double b = params.g / params.theta0;

    ScalarField du_star = params.f * uT - advect(u, w, u);
    ScalarField dw_star = b * th - advect(u, w, w);
    ProjectionResult pr = solver.project(du_star, dw_star);

    ScalarField gamma = boussinesq_gamma(g, params);
    ScalarField duT = -1.0 * advect(u, w, uT) - params.f * u - params.s * gamma;
    for (double& v : duT.values()) v -= params.f * params.frame_u;
    ScalarField dth = -1.0 * advect(u, w, th) - params.s * uT;
    return {std::move(pr.u), std::move(pr.w), std::move(duT), std::move(dth), std::nullopt, std::move(pr.p)};
}

Tendencies alpha_tendencies(const SliceState& state, const ModelParams& params, const EllipticSolverConfig& cfg) {
    EllipticSolver solver(state.grid(), params.alpha, cfg);
    return alpha_tendencies(state, params, solver);
}

Tendencies alpha_tendencies(const SliceState& state, const ModelParams& params, const EllipticSolver& solver) {
    check_state_for_kind(ModelKind::AlphaEady, state);
    if (!(params.alpha > 0.0)) throw Error(ErrorKind::InvalidArgument, "alpha model needs alpha > 0");
    if (solver.alpha() != params.alpha) throw Error(ErrorKind::InvalidArgument, "solver alpha mismatch");
    const Grid& g = state.grid();
    const auto& [u, w, uT, th] = std::tie(state.u, state.w, state.uT, state.thetaS);
    const double a2 = params.alpha * params.alpha;
    const double b = params.g / params.theta0;

    ScalarField Lu = laplacian_compact(u, WallCondition::Neumann);
    ScalarField Lw = laplacian_compact(w, WallCondition::Dirichlet);
    ScalarField LuT = laplacian_compact(uT, WallCondition::Neumann);
    ScalarField ut = u - a2 * Lu;
    ScalarField wt = w - a2 * Lw;
    ScalarField uTt = uT - a2 * LuT;

    // (grad u)^T u~ - grad(|u|^2/2) = -a2 (grad u)^T L u, and likewise for the
    // transverse coupling; the exact gradients are left to the pressure.
    ScalarField ux = ddx(u), uz = ddz(u), wx = ddx(w), wz = ddz(w);
    ScalarField uTx = ddx(uT), uTz = ddz(uT);
    ScalarField du_star = params.f * uT - advect(u, w, ut) + a2 * (ux * Lu + wx * Lw + LuT * uTx);
    ScalarField dw_star = b * th - advect(u, w, wt) + a2 * (uz * Lu + wz * Lw + LuT * uTz);
    ProjectionResult pr = solver.project(du_star, dw_star);

    ScalarField gamma = boussinesq_gamma(g, params);
    ScalarField duTt = -1.0 * advect(u, w, uTt) - params.f * u - params.s * gamma;
    for (double& v : duTt.values()) v -= params.f * params.frame_u;
    ScalarField duT = solver.solve_helmholtz(duTt, WallCondition::Neumann);
    ScalarField dth = -1.0 * advect(u, w, th) - params.s * uT;
    return {std::move(pr.u), std::move(pr.w), std::move(duT), std::move(dth), std::nullopt, std::move(pr.p)};
}

namespace {

Tendencies compressible_common(const SliceState& state, const ModelParams& params, const ScalarField& Pi) {
    const auto& [u, w, uT, th] = std::tie(state.u, state.w, state.uT, state.thetaS);
    const ScalarField& D = *state.D;
    ScalarField cpth = params.cp * th;
    ScalarField du = params.f * uT - advect(u, w, u) - cpth * ddx(Pi);
    ScalarField dw = -1.0 * advect(u, w, w) - cpth * ddz(Pi);
    for (double& v : dw.values()) v -= params.g;
    zero_walls(dw);
    ScalarField duT = -1.0 * advect(u, w, uT) - params.f * u;
    for (double& v : duT.values()) v -= params.f * params.frame_u;
    ScalarField dth = -1.0 * advect(u, w, th) - params.s * uT;
    ScalarField dD = -1.0 * divergence(D * u, D * w);
    return {std::move(du), std::move(dw), std::move(duT), std::move(dth), std::move(dD), std::nullopt};
}

}  // namespace

Tendencies scm_tendencies(const SliceState& state, const ModelParams& params) {
    check_state_for_kind(ModelKind::SCM, state);
    ScalarField Pi = exner(*state.D, state.thetaS, params);
    Tendencies t = compressible_common(state, params, Pi);
    t.duT.axpy(params.s * params.cp, Pi);
    return t;
}

Tendencies cullen_tendencies(const SliceState& state, const ModelParams& params) {
    check_state_for_kind(ModelKind::Cullen2008, state);
    ScalarField Pi = exner(*state.D, state.thetaS, params);
    Tendencies t = compressible_common(state, params, Pi);
    t.duT.axpy(-params.cp * params.Pi0_lapse_or_default(), state.thetaS);
    return t;
}

Tendencies model_tendencies(ModelKind kind, const SliceState& state, const ModelParams& params,
                            const EllipticSolver* solver, const EllipticSolverConfig& cfg) {
    std::unique_ptr<EllipticSolver> owned;
    switch (kind) {
        case ModelKind::EadyBoussinesq:
            return eady_tendencies(state, params, solver_or_build(state.grid(), 0.0, solver, cfg, owned));
        case ModelKind::AlphaEady:
            return alpha_tendencies(state, params, solver_or_build(state.grid(), params.alpha, solver, cfg, owned));
        case ModelKind::SCM: return scm_tendencies(state, params);
        case ModelKind::Cullen2008: return cullen_tendencies(state, params);
    }
    throw Error(ErrorKind::InvalidArgument, "unknown model kind");
}

VariationalDerivatives variational_derivatives(ModelKind kind, const SliceState& state, const ModelParams& params,
                                               const EllipticSolver* solver) {
    check_state_for_kind(kind, state);
    const Grid& g = state.grid();
    const auto& [u, w, uT, th] = std::tie(state.u, state.w, state.uT, state.thetaS);
    ScalarField ke = 0.5 * (u * u + w * w + uT * uT);
    std::unique_ptr<EllipticSolver> owned;

    switch (kind) {
        case ModelKind::EadyBoussinesq: {
            ScalarField gamma = boussinesq_gamma(g, params);
            Tendencies t = eady_tendencies(state, params, solver_or_build(g, 0.0, solver, {}, owned));
            ScalarField pi = ke - *t.p + gamma * th;
            return {u, w, uT, std::move(pi), std::move(gamma), params.f};
        }
        case ModelKind::AlphaEady: {
            ScalarField gamma = boussinesq_gamma(g, params);
            Tendencies t = alpha_tendencies(state, params, solver_or_build(g, params.alpha, solver, {}, owned));
            ScalarField pi = ke - *t.p + gamma * th;
            return {helmholtz_apply(params.alpha, u, WallCondition::Neumann),
                    helmholtz_apply(params.alpha, w, WallCondition::Dirichlet),
                    helmholtz_apply(params.alpha, uT, WallCondition::Neumann), std::move(pi), std::move(gamma),
                    params.f};
        }
        case ModelKind::SCM: {
            ScalarField Pi = exner(*state.D, th, params);
            ScalarField pi = ke - params.cp * Pi * th;
            const double gg = params.g;
            pi -= ScalarField::from_function(g, [gg](double, double z) { return gg * z; });
            return {u, w, uT, std::move(pi), -params.cp * Pi, params.f};
        }
        case ModelKind::Cullen2008:
            throw Error(ErrorKind::NotVariational, "the Cullen (2008) model has no slice Lagrangian");
    }
    throw Error(ErrorKind::InvalidArgument, "unknown model kind");
}

Tendencies momentum_to_velocity_tendencies(ModelKind kind, const ScalarField& dm_x, const ScalarField& dm_z,
                                           const ScalarField& dm_T, const VariationalDerivatives& vd,
                                           const SliceState& state, const ModelParams& params,
                                           const EllipticSolver* solver) {
    const auto& [u, w, uT, th] = std::tie(state.u, state.w, state.uT, state.thetaS);
    ScalarField dth = -1.0 * advect(u, w, th) - params.s * uT;
    std::unique_ptr<EllipticSolver> owned;

    switch (kind) {
        case ModelKind::EadyBoussinesq: {
            ProjectionResult pr = solver_or_build(state.grid(), 0.0, solver, {}, owned).project(dm_x, dm_z);
            return {std::move(pr.u), std::move(pr.w), dm_T, std::move(dth), std::nullopt, std::move(pr.p)};
        }
        case ModelKind::AlphaEady: {
            const EllipticSolver& s = solver_or_build(state.grid(), params.alpha, solver, {}, owned);
            ProjectionResult pr = s.project(dm_x, dm_z);
            ScalarField duT = s.solve_helmholtz(dm_T, WallCondition::Neumann);
            return {std::move(pr.u), std::move(pr.w), std::move(duT), std::move(dth), std::nullopt, std::move(pr.p)};
        }
        case ModelKind::SCM:
        case ModelKind::Cullen2008: {
            const ScalarField& D = *state.D;
            ScalarField dD = -1.0 * divergence(D * u, D * w);
            ScalarField du = (dm_x - vd.vS_x * dD) / D;
            ScalarField dw = (dm_z - vd.vS_z * dD) / D;
            zero_walls(dw);
            ScalarField duT = (dm_T - vd.vT * dD) / D;
            return {std::move(du), std::move(dw), std::move(duT), std::move(dth), std::move(dD), std::nullopt};
        }
    }
    throw Error(ErrorKind::InvalidArgument, "unknown model kind");
}

Tendencies ep_tendencies_generic(const VariationalDerivatives& vd, const SliceState& state,
                                 const ModelParams& params, ModelKind kind, const EllipticSolver* solver) {
    if (kind == ModelKind::Cullen2008)
        throw Error(ErrorKind::NotVariational, "the Cullen (2008) model has no slice Lagrangian");
    check_state_for_kind(kind, state);
    const Grid& g = state.grid();
    const auto& [u, w, uT, th] = std::tie(state.u, state.w, state.uT, state.thetaS);
    const ScalarField D = state.D ? *state.D : ScalarField(g, 1.0);

    ScalarField mx = D * vd.vS_x, mz = D * vd.vS_z, mT = D * vd.vT;
    ScalarField ux = ddx(u), uz = ddz(u), wx = ddx(w), wz = ddz(w);
    ScalarField uTx = ddx(uT), uTz = ddz(uT);
    ScalarField Dgamma = D * vd.gammaS;

    // The f*x parts of m_T and pi cancel in the slice equations except for
    // f*D*u_T (x component) and -f*D*u (transverse).
    ScalarField dm_x = -1.0 * (ddx(u * mx) + ddz(w * mx)) - (ux * mx + wx * mz) - mT * uTx + D * ddx(vd.pi) +
                       vd.f * D * uT - Dgamma * ddx(th);
    ScalarField dm_z = -1.0 * (ddx(u * mz) + ddz(w * mz)) - (uz * mx + wz * mz) - mT * uTz + D * ddz(vd.pi) -
                       Dgamma * ddz(th);
    ScalarField dm_T = -1.0 * (ddx(u * mT) + ddz(w * mT)) - vd.f * D * u - params.s * Dgamma;
    dm_T.axpy(-vd.f * params.frame_u, D);
    return momentum_to_velocity_tendencies(kind, dm_x, dm_z, dm_T, vd, state, params, solver);
}

}  // namespace slice
