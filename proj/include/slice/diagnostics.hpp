#pragma once

#include <array>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "slice/timestepping.hpp"

namespace slice {

/// Closed polygon of markers; the last point connects back to the first.
struct MaterialLoop {
    std::vector<Point> points;

    /// Throws InvalidArgument for fewer than 16 markers or any z outside (0, H).
    void validate(const Grid& grid) const;
};

/// Rectangle [x1, x2] x [z1, z2] with n/4 markers on each vertical edge and
/// the rest split over the horizontal edges, ordered
/// positively about y (up the left edge first), the
/// orientation under which the loop integral of v equals the area integral of curl_y v.
MaterialLoop make_rectangular_loop(double x1, double x2, double z1, double z2, int n);

/// Slice energy of the kind's Hamiltonian. For the Cullen kind this is the
/// SCM functional, which that model does not conserve.
double energy(ModelKind kind, const SliceState& state, const ModelParams& params);

/// The transverse and slice momenta per unit mass, (v_S, v_T - f x). Unlike
/// variational_derivatives this needs no pressure and also serves the Cullen
/// kind (same momenta as the SCM).
struct SliceMomenta {
    ScalarField vS_x;
    ScalarField vS_z;
    ScalarField vT;
    double f = 0.0;
};
SliceMomenta slice_momenta(ModelKind kind, const SliceState& state, const ModelParams& params);

/// q = (1/D)(s curl_y(v_S) + jacobian(v_T, theta_S)), the f*x part of v_T
/// entering only through its gradient (f, 0).
ScalarField potential_vorticity(ModelKind kind, const SliceState& state, const ModelParams& params);

/// Trapezoidal loop integral of (s v_S - v_T grad theta_S) . dx with
/// bilinear interpolation to the markers and f*x evaluated at unwrapped x.
double circulation(const MaterialLoop& loop, ModelKind kind, const SliceState& state, const ModelParams& params);

/// RK4 marker update over [a.time, a.time + dt] with the velocity linear in
/// time between the two states.
MaterialLoop advect_loop(const MaterialLoop& loop, const SliceState& a, const SliceState& b, double dt);
/// Same in the frozen velocity of one state.
MaterialLoop advect_loop(const MaterialLoop& loop, const SliceState& state, double dt);

/// c_p (1/D) jacobian(theta_S, Pi), i.e. c_p D^-1 (grad Pi x grad theta_S).y.
ScalarField pv_production_cullen(const SliceState& state, const ModelParams& params);

/// -s times the loop integral of c_p theta_S grad Pi . dx: the circulation
/// tendency of the Cullen model (zero for the SCM up to truncation).
double circulation_rate_cullen(const MaterialLoop& loop, const SliceState& state, const ModelParams& params);

/// s^-1 m_T grad theta_S with m_T = D (v_T + f x), x on [0, L).
std::pair<ScalarField, ScalarField> momentum_map_mR(ModelKind kind, const SliceState& state,
                                                    const ModelParams& params);

struct DiagnosticsRecord {
    double time = 0.0;
    double energy = 0.0;
    double mass = 0.0;
    double theta_integral = 0.0;
    double pv_min = 0.0;
    double pv_max = 0.0;
    double pv_l2 = 0.0;
    std::optional<double> div_linf;
    std::vector<double> circulation;
    std::optional<double> pv_production_l2;
};

DiagnosticsRecord compute_record(ModelKind kind, const SliceState& state, const ModelParams& params,
                                 std::span<const MaterialLoop> loops);

/// Writes the header for n_loops circulation columns.
void write_csv_header(std::ostream& os, std::size_t n_loops);
/// Absent entries are written as "nan".
void write_csv_row(std::ostream& os, const DiagnosticsRecord& rec);

/// Loops and tracer particles packed into one marker vector for integrate().
struct TrackedPoints {
    std::vector<MaterialLoop> loops;
    std::vector<Point> tracers;

    std::vector<Point> pack() const;
    void unpack(std::span<const Point> packed);
};

/// Tracer particles on a regular n_x by n_z lattice strictly inside the channel.
std::vector<Point> tracer_lattice(const Grid& grid, int n_x, int n_z, double margin_fraction = 0.2);

/// Field values at the particles by cubic interpolation.
std::vector<double> sample(const ScalarField& field, std::span<const Point> points);

}  // namespace slice
