#pragma once

#include <memory>
#include <vector>

#include "slice/grid.hpp"

namespace slice {

// Stencil calculus on the collocated grid. x derivatives are periodic centred
// differences; z derivatives are centred in the interior and one-sided
// three-point at the walls.

ScalarField ddx(const ScalarField& F);
ScalarField ddz(const ScalarField& F);
ScalarField divergence(const ScalarField& u, const ScalarField& w);
/// y-component of curl(u, 0, w): du/dz - dw/dx.
ScalarField curl_y(const ScalarField& u, const ScalarField& w);
/// a_x b_z - a_z b_x, equal to (grad b x grad a).y.
ScalarField jacobian(const ScalarField& a, const ScalarField& b);
/// (u d/dx + w d/dz) F
ScalarField advect(const ScalarField& u, const ScalarField& w, const ScalarField& F);

enum class WallCondition {
    Neumann,    // mirror ghost: dF/dz = 0 at the walls
    Dirichlet,  // F = 0 at the walls, interior rows only
};

/// Compact five-point Laplacian. The Dirichlet variant returns zero on the wall rows.
ScalarField laplacian_compact(const ScalarField& F, WallCondition wall = WallCondition::Neumann);

/// ddx(ddx(.)) + ddz(mask(ddz(.))): the divergence of the gradient with the
/// wall-normal component removed, i.e. the operator the projection inverts.
ScalarField laplacian_projection(const ScalarField& F);

/// Zero the two wall rows.
void zero_walls(ScalarField& F);

struct EllipticSolverConfig {
    /// Relative residual tolerance (weighted L2).
    double tol = 1.0e-10;
    /// Maximum refinement sweeps on top of the direct solve.
    int max_iter = 8;

    void validate() const;
};

struct ProjectionResult {
    ScalarField u;
    ScalarField w;
    ScalarField p;
};

/// Direct solver for the elliptic problems of the slice models. Every operator
/// involved commutes with x-translation, so each x-Fourier mode reduces to a
/// small dense system in z that is factorised once at construction. A residual
/// check in physical space with iterative refinement guards each solve.
///
/// With alpha > 0 the projection enforces div(u) = 0 on the velocity
/// recovered through (1 - alpha^2 lap)^{-1}; with alpha = 0 the pressure
/// operator is laplacian_projection.
class EllipticSolver {
public:
    EllipticSolver(const Grid& grid, double alpha, EllipticSolverConfig cfg = {});
    ~EllipticSolver();
    EllipticSolver(EllipticSolver&&) noexcept;
    EllipticSolver& operator=(EllipticSolver&&) noexcept;

    const Grid& grid() const;
    double alpha() const;
    const EllipticSolverConfig& config() const;

    /// Solves div(H^{-1} grad p) = rhs after removing the weighted mean and
    /// any other component outside the operator's range. Result has zero integral.
    ScalarField solve_pressure(const ScalarField& rhs) const;

    /// Solves (1 - alpha^2 lap) F = rhs with the given wall condition.
    ScalarField solve_helmholtz(const ScalarField& rhs, WallCondition wall) const;

    /// Applies div(H^{-1} grad p) in physical space.
    ScalarField apply_pressure_operator(const ScalarField& p) const;

    /// Splits (H^{-1}u*, H^{-1}w*) into a divergence-free part and a gradient.
    /// w* is treated as zero on the walls.
    ProjectionResult project(const ScalarField& u_star, const ScalarField& w_star) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Mean-free solution of laplacian_projection(p) = rhs.
ScalarField poisson_solve(const ScalarField& rhs, const EllipticSolverConfig& cfg = {});

/// Returns (u - ddx p, w - ddz p, p) with w = 0 on the walls and discrete divergence zero.
ProjectionResult project_divergence_free(const ScalarField& u, const ScalarField& w,
                                         const EllipticSolverConfig& cfg = {});

/// (1 - alpha^2 lap) F = rhs, periodic in x, Neumann in z.
ScalarField helmholtz_solve(double alpha, const ScalarField& rhs, const EllipticSolverConfig& cfg = {},
                            WallCondition wall = WallCondition::Neumann);

/// (1 - alpha^2 lap) F by direct stencil application.
ScalarField helmholtz_apply(double alpha, const ScalarField& F,
                            WallCondition wall = WallCondition::Neumann);

}  // namespace slice
