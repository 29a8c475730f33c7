#include "slice/operators.hpp"

#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>

#include <Eigen/Dense>
#include <fftw3.h>

#include "slice/error.hpp"

namespace slice {

ScalarField ddx(const ScalarField& F) {
    const Grid& g = F.grid();
    ScalarField out(g);
    const double c = 1.0 / (2.0 * g.dx);
    for (int k = 0; k < g.nz; ++k) {
        for (int i = 0; i < g.nx; ++i) {
            const int ip = (i + 1 == g.nx) ? 0 : i + 1;
            const int im = (i == 0) ? g.nx - 1 : i - 1;
            out(i, k) = c * (F(ip, k) - F(im, k));
        }
    }
    return out;
}

ScalarField ddz(const ScalarField& F) {
    const Grid& g = F.grid();
    ScalarField out(g);
    const double c = 1.0 / (2.0 * g.dz);
    const int N = g.nz - 1;
    for (int i = 0; i < g.nx; ++i) {
        out(i, 0) = c * (-3.0 * F(i, 0) + 4.0 * F(i, 1) - F(i, 2));
        out(i, N) = c * (3.0 * F(i, N) - 4.0 * F(i, N - 1) + F(i, N - 2));
    }
    for (int k = 1; k < N; ++k)
        for (int i = 0; i < g.nx; ++i) out(i, k) = c * (F(i, k + 1) - F(i, k - 1));
    return out;
}

ScalarField divergence(const ScalarField& u, const ScalarField& w) { return ddx(u) + ddz(w); }

ScalarField curl_y(const ScalarField& u, const ScalarField& w) { return ddz(u) - ddx(w); }

ScalarField jacobian(const ScalarField& a, const ScalarField& b) {
    return ddx(a) * ddz(b) - ddz(a) * ddx(b);
}

ScalarField advect(const ScalarField& u, const ScalarField& w, const ScalarField& F) {
    return u * ddx(F) + w * ddz(F);
}

void zero_walls(ScalarField& F) {
    const Grid& g = F.grid();
    for (int i = 0; i < g.nx; ++i) {
        F(i, 0) = 0.0;
        F(i, g.nz - 1) = 0.0;
    }
}

ScalarField laplacian_compact(const ScalarField& F, WallCondition wall) {
    const Grid& g = F.grid();
    ScalarField out(g);
    const double cx = 1.0 / (g.dx * g.dx);
    const double cz = 1.0 / (g.dz * g.dz);
    const int N = g.nz - 1;
    for (int k = 0; k <= N; ++k) {
        const bool at_wall = (k == 0 || k == N);
        if (at_wall && wall == WallCondition::Dirichlet) continue;
        for (int i = 0; i < g.nx; ++i) {
            const int ip = (i + 1 == g.nx) ? 0 : i + 1;
            const int im = (i == 0) ? g.nx - 1 : i - 1;
            double zpart;
            if (k == 0) {
                zpart = 2.0 * (F(i, 1) - F(i, 0));
            } else if (k == N) {
                zpart = 2.0 * (F(i, N - 1) - F(i, N));
            } else {
                const double below = (wall == WallCondition::Dirichlet && k == 1) ? 0.0 : F(i, k - 1);
                const double above = (wall == WallCondition::Dirichlet && k == N - 1) ? 0.0 : F(i, k + 1);
                zpart = above - 2.0 * F(i, k) + below;
            }
            out(i, k) = cx * (F(ip, k) - 2.0 * F(i, k) + F(im, k)) + cz * zpart;
        }
    }
    return out;
}

ScalarField laplacian_projection(const ScalarField& F) {
    ScalarField gz = ddz(F);
    zero_walls(gz);
    return ddx(ddx(F)) + ddz(gz);
}

ScalarField helmholtz_apply(double alpha, const ScalarField& F, WallCondition wall) {
    ScalarField out = F;
    if (alpha != 0.0) out.axpy(-alpha * alpha, laplacian_compact(F, wall));
    if (wall == WallCondition::Dirichlet) zero_walls(out);
    return out;
}

void EllipticSolverConfig::validate() const {
    if (!(tol > 0.0 && tol < 1.0)) throw Error(ErrorKind::InvalidArgument, "solver tol must lie in (0, 1)");
    if (max_iter < 1) throw Error(ErrorKind::InvalidArgument, "solver max_iter must be positive");
}

namespace {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwBuffer {
    double* real = nullptr;
    fftw_complex* spec = nullptr;
    FftwBuffer(std::size_t nreal, std::size_t nspec)
        : real(fftw_alloc_real(nreal)), spec(fftw_alloc_complex(nspec)) {}
    ~FftwBuffer() {
        fftw_free(real);
        fftw_free(spec);
    }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
};

// Dense z-operators shared by all modes.
Matrix ddz_matrix(const Grid& g) {
    const int n = g.nz, N = n - 1;
    Matrix D = Matrix::Zero(n, n);
    const double c = 1.0 / (2.0 * g.dz);
    D(0, 0) = -3 * c; D(0, 1) = 4 * c; D(0, 2) = -c;
    D(N, N) = 3 * c; D(N, N - 1) = -4 * c; D(N, N - 2) = c;
    for (int k = 1; k < N; ++k) {
        D(k, k + 1) = c;
        D(k, k - 1) = -c;
    }
    return D;
}

Matrix lapz_neumann(const Grid& g) {
    const int n = g.nz, N = n - 1;
    Matrix Lz = Matrix::Zero(n, n);
    const double c = 1.0 / (g.dz * g.dz);
    Lz(0, 0) = -2 * c; Lz(0, 1) = 2 * c;
    Lz(N, N) = -2 * c; Lz(N, N - 1) = 2 * c;
    for (int k = 1; k < N; ++k) {
        Lz(k, k - 1) = c; Lz(k, k) = -2 * c; Lz(k, k + 1) = c;
    }
    return Lz;
}

Matrix lapz_dirichlet_interior(const Grid& g) {
    const int m = g.nz - 2;
    Matrix Lz = Matrix::Zero(m, m);
    const double c = 1.0 / (g.dz * g.dz);
    for (int k = 0; k < m; ++k) {
        Lz(k, k) = -2 * c;
        if (k > 0) Lz(k, k - 1) = c;
        if (k + 1 < m) Lz(k, k + 1) = c;
    }
    return Lz;
}

}  // namespace

struct EllipticSolver::Impl {
    Grid grid;
    double alpha;
    EllipticSolverConfig cfg;
    int nmodes;
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;

    struct Mode {
        bool singular = false;
        // pressure operator
        Eigen::PartialPivLU<Matrix> lu;
        Matrix pinv;          // singular modes: pseudo-inverse
        Matrix left_null;     // singular modes: orthonormal basis of the range complement
        Matrix compat;        // singular modes: projector onto the range along simple z-profiles
        // Helmholtz operators
        Eigen::PartialPivLU<Matrix> helm_n;
        Eigen::PartialPivLU<Matrix> helm_d;
    };
    std::vector<Mode> modes;

    Impl(const Grid& g, double a, EllipticSolverConfig c) : grid(g), alpha(a), cfg(c), nmodes(g.nx / 2 + 1) {
        cfg.validate();
        if (!(alpha >= 0.0)) throw Error(ErrorKind::InvalidArgument, "alpha must be nonnegative");
        {
            std::lock_guard lock(fftw_planner_mutex());
            FftwBuffer buf(grid.size(), static_cast<std::size_t>(nmodes) * grid.nz);
            int n[] = {grid.nx};
            forward = fftw_plan_many_dft_r2c(1, n, grid.nz, buf.real, nullptr, 1, grid.nx, buf.spec, nullptr, 1,
                                             nmodes, FFTW_ESTIMATE);
            backward = fftw_plan_many_dft_c2r(1, n, grid.nz, buf.spec, nullptr, 1, nmodes, buf.real, nullptr, 1,
                                              grid.nx, FFTW_ESTIMATE);
        }
        factorise();
    }

    ~Impl() {
        std::lock_guard lock(fftw_planner_mutex());
        if (forward) fftw_destroy_plan(forward);
        if (backward) fftw_destroy_plan(backward);
    }

    void factorise() {
        const int n = grid.nz, m = n - 2;
        const Matrix Dz = ddz_matrix(grid);
        const Matrix Dz_in = Dz.middleCols(1, m);    // acts on interior-only vectors
        const Matrix Dz_out = Dz.middleRows(1, m);   // keeps interior rows
        const Matrix LzN = lapz_neumann(grid);
        const Matrix LzD = lapz_dirichlet_interior(grid);
        const double a2 = alpha * alpha;
        modes.resize(nmodes);
        for (int mode = 0; mode < nmodes; ++mode) {
            Mode& md = modes[mode];
            const double theta = 2.0 * std::numbers::pi * mode / grid.nx;
            const bool nyquist = (grid.nx % 2 == 0) && (mode == grid.nx / 2);
            const double sigma = (mode == 0 || nyquist) ? 0.0 : std::sin(theta) / grid.dx;
            const double s2 = 2.0 * std::sin(0.5 * theta) / grid.dx;
            const double lamx = -s2 * s2;

            Matrix Hn = Matrix::Identity(n, n) - a2 * (lamx * Matrix::Identity(n, n) + LzN);
            Matrix Hd = Matrix::Identity(m, m) - a2 * (lamx * Matrix::Identity(m, m) + LzD);
            md.helm_n.compute(Hn);
            md.helm_d.compute(Hd);

            Matrix A;
            if (alpha == 0.0) {
                A = -sigma * sigma * Matrix::Identity(n, n) + Dz_in * Dz_out;
            } else {
                A = -sigma * sigma * md.helm_n.inverse() + Dz_in * md.helm_d.inverse() * Dz_out;
            }
            md.singular = (sigma == 0.0);
            if (md.singular) {
                Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
                const Vector& sv = svd.singularValues();
                const double cutoff = sv(0) * 1e-11;
                int rank = 0;
                while (rank < sv.size() && sv(rank) > cutoff) ++rank;
                Matrix Sinv = Matrix::Zero(n, n);
                for (int r = 0; r < rank; ++r) Sinv(r, r) = 1.0 / sv(r);
                md.pinv = svd.matrixV() * Sinv * svd.matrixU().transpose();
                md.left_null = svd.matrixU().rightCols(n - rank);
                md.compat = compatibility_projector(md.left_null);
            } else {
                md.lu.compute(A);
            }
        }
    }

    // Range vectors pass unchanged; the complement removed is spanned by
    // z-constant and z-alternating profiles when those are transverse to the
    // range, so a uniform right-hand side maps to zero.
    static Matrix compatibility_projector(const Matrix& N) {
        const int n = static_cast<int>(N.rows()), r = static_cast<int>(N.cols());
        Matrix I = Matrix::Identity(n, n);
        if (r == 0) return I;
        Matrix C(n, 2);
        for (int k = 0; k < n; ++k) {
            C(k, 0) = 1.0;
            C(k, 1) = (k % 2 == 0) ? 1.0 : -1.0;
        }
        if (r <= 2) {
            Matrix Cr = C.leftCols(r);
            Matrix M = N.transpose() * Cr;
            Eigen::JacobiSVD<Matrix> svd(M);
            const Vector& sv = svd.singularValues();
            if (sv(r - 1) > 1e-3 * std::sqrt(static_cast<double>(n)))
                return I - Cr * M.inverse() * N.transpose();
        }
        return I - N * N.transpose();
    }

    // Forward transform of a field into per-mode complex vectors (column = mode).
    Eigen::MatrixXcd to_spectral(const ScalarField& F) const {
        FftwBuffer buf(grid.size(), static_cast<std::size_t>(nmodes) * grid.nz);
        std::copy(F.values().begin(), F.values().end(), buf.real);
        fftw_execute_dft_r2c(forward, buf.real, buf.spec);
        Eigen::MatrixXcd out(grid.nz, nmodes);
        for (int k = 0; k < grid.nz; ++k)
            for (int m = 0; m < nmodes; ++m) {
                const fftw_complex& c = buf.spec[static_cast<std::size_t>(k) * nmodes + m];
                out(k, m) = {c[0], c[1]};
            }
        return out;
    }

    ScalarField to_physical(const Eigen::MatrixXcd& spec) const {
        FftwBuffer buf(grid.size(), static_cast<std::size_t>(nmodes) * grid.nz);
        for (int k = 0; k < grid.nz; ++k)
            for (int m = 0; m < nmodes; ++m) {
                fftw_complex& c = buf.spec[static_cast<std::size_t>(k) * nmodes + m];
                c[0] = spec(k, m).real();
                c[1] = spec(k, m).imag();
            }
        fftw_execute_dft_c2r(backward, buf.spec, buf.real);
        ScalarField out(grid);
        const double scale = 1.0 / grid.nx;
        for (std::size_t n = 0; n < grid.size(); ++n) out[n] = buf.real[n] * scale;
        return out;
    }

    template <class Solve>
    static Eigen::VectorXcd solve_complex(const Solve& solve, const Eigen::VectorXcd& rhs) {
        Matrix b(rhs.size(), 2);
        b.col(0) = rhs.real();
        b.col(1) = rhs.imag();
        Matrix x = solve(b);
        Eigen::VectorXcd out(x.rows());
        out.real() = x.col(0);
        out.imag() = x.col(1);
        return out;
    }

    // Removes the part of rhs outside the pressure operator's range.
    ScalarField compatible(const ScalarField& rhs) const {
        Eigen::MatrixXcd spec = to_spectral(rhs);
        bool changed = false;
        for (int m = 0; m < nmodes; ++m) {
            const Mode& md = modes[m];
            if (!md.singular || md.left_null.cols() == 0) continue;
            spec.col(m) = md.compat.cast<std::complex<double>>() * spec.col(m);
            changed = true;
        }
        return changed ? to_physical(spec) : rhs;
    }

    ScalarField pressure_direct(const ScalarField& rhs) const {
        Eigen::MatrixXcd spec = to_spectral(rhs);
        for (int m = 0; m < nmodes; ++m) {
            const Mode& md = modes[m];
            if (md.singular) {
                spec.col(m) = solve_complex([&](const Matrix& b) { return Matrix(md.pinv * b); }, spec.col(m));
            } else {
                spec.col(m) = solve_complex([&](const Matrix& b) { return Matrix(md.lu.solve(b)); }, spec.col(m));
            }
        }
        return to_physical(spec);
    }

    ScalarField helmholtz_direct(const ScalarField& rhs, WallCondition wall) const {
        Eigen::MatrixXcd spec = to_spectral(rhs);
        const int m_in = grid.nz - 2;
        for (int m = 0; m < nmodes; ++m) {
            const Mode& md = modes[m];
            if (wall == WallCondition::Neumann) {
                spec.col(m) = solve_complex([&](const Matrix& b) { return Matrix(md.helm_n.solve(b)); }, spec.col(m));
            } else {
                Eigen::VectorXcd inner = spec.col(m).segment(1, m_in);
                inner = solve_complex([&](const Matrix& b) { return Matrix(md.helm_d.solve(b)); }, inner);
                spec.col(m).setZero();
                spec.col(m).segment(1, m_in) = inner;
            }
        }
        return to_physical(spec);
    }
};

EllipticSolver::EllipticSolver(const Grid& grid, double alpha, EllipticSolverConfig cfg)
    : impl_(std::make_unique<Impl>(grid, alpha, cfg)) {}
EllipticSolver::~EllipticSolver() = default;
EllipticSolver::EllipticSolver(EllipticSolver&&) noexcept = default;
EllipticSolver& EllipticSolver::operator=(EllipticSolver&&) noexcept = default;

const Grid& EllipticSolver::grid() const { return impl_->grid; }
double EllipticSolver::alpha() const { return impl_->alpha; }
const EllipticSolverConfig& EllipticSolver::config() const { return impl_->cfg; }

namespace {

void subtract_mean(ScalarField& F) {
    const Grid& g = F.grid();
    const double mean = integral(F) / (g.L * g.H);
    for (double& v : F.values()) v -= mean;
}

template <class Apply, class Solve>
ScalarField refine(const ScalarField& rhs, const Apply& apply, const Solve& solve, const EllipticSolverConfig& cfg,
                   const char* what, double scale) {
    ScalarField x = solve(rhs);
    if (scale == 0.0) return x;
    for (int it = 0;; ++it) {
        ScalarField r = rhs - apply(x);
        const double rel = l2_norm(r) / scale;
        if (!std::isfinite(rel))
            throw Error(ErrorKind::NoConvergence, std::string(what) + ": non-finite residual");
        if (rel <= cfg.tol) return x;
        if (it >= cfg.max_iter)
            throw Error(ErrorKind::NoConvergence, std::string(what) + ": relative residual " + std::to_string(rel) +
                                                      " above tolerance after " + std::to_string(it) +
                                                      " refinement sweeps");
        x += solve(r);
    }
}

}  // namespace

ScalarField EllipticSolver::apply_pressure_operator(const ScalarField& p) const {
    ScalarField gx = ddx(p);
    ScalarField gz = ddz(p);
    zero_walls(gz);
    if (impl_->alpha != 0.0) {
        gx = impl_->helmholtz_direct(gx, WallCondition::Neumann);
        gz = impl_->helmholtz_direct(gz, WallCondition::Dirichlet);
    }
    return divergence(gx, gz);
}

ScalarField EllipticSolver::solve_pressure(const ScalarField& rhs) const {
    if (!(rhs.grid() == impl_->grid)) throw Error(ErrorKind::InvalidArgument, "rhs grid does not match solver");
    // Residuals are measured against the unprojected right-hand side, so a
    // rhs lying wholly outside the range gives p = 0 rather than noise.
    ScalarField b = impl_->compatible(rhs);
    ScalarField p = refine(
        b, [&](const ScalarField& x) { return apply_pressure_operator(x); },
        [&](const ScalarField& r) { return impl_->pressure_direct(r); }, impl_->cfg, "pressure solve",
        l2_norm(rhs));
    subtract_mean(p);
    return p;
}

ScalarField EllipticSolver::solve_helmholtz(const ScalarField& rhs, WallCondition wall) const {
    if (!(rhs.grid() == impl_->grid)) throw Error(ErrorKind::InvalidArgument, "rhs grid does not match solver");
    if (impl_->alpha == 0.0) {
        ScalarField out = rhs;
        if (wall == WallCondition::Dirichlet) zero_walls(out);
        return out;
    }
    ScalarField b = rhs;
    if (wall == WallCondition::Dirichlet) zero_walls(b);
    return refine(
        b, [&](const ScalarField& x) { return helmholtz_apply(impl_->alpha, x, wall); },
        [&](const ScalarField& r) { return impl_->helmholtz_direct(r, wall); }, impl_->cfg, "helmholtz solve",
        l2_norm(b));
}

ProjectionResult EllipticSolver::project(const ScalarField& u_star, const ScalarField& w_star) const {
    ScalarField a = solve_helmholtz(u_star, WallCondition::Neumann);
    ScalarField b = solve_helmholtz(w_star, WallCondition::Dirichlet);
    ScalarField p = solve_pressure(divergence(a, b));
    ScalarField gz = ddz(p);
    zero_walls(gz);
    a -= solve_helmholtz(ddx(p), WallCondition::Neumann);
    b -= solve_helmholtz(gz, WallCondition::Dirichlet);
    return {std::move(a), std::move(b), std::move(p)};
}

ScalarField poisson_solve(const ScalarField& rhs, const EllipticSolverConfig& cfg) {
    return EllipticSolver(rhs.grid(), 0.0, cfg).solve_pressure(rhs);
}

ProjectionResult project_divergence_free(const ScalarField& u, const ScalarField& w, const EllipticSolverConfig& cfg) {
    return EllipticSolver(u.grid(), 0.0, cfg).project(u, w);
}

ScalarField helmholtz_solve(double alpha, const ScalarField& rhs, const EllipticSolverConfig& cfg,
                            WallCondition wall) {
    if (!(alpha >= 0.0)) throw Error(ErrorKind::InvalidArgument, "alpha must be nonnegative");
    return EllipticSolver(rhs.grid(), alpha, cfg).solve_helmholtz(rhs, wall);
}

}  // namespace slice
