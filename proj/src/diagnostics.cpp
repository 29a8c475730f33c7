#include "slice/diagnostics.hpp"

#include <cmath>
#include <cstdio>

#include "slice/error.hpp"

namespace slice {

void MaterialLoop::validate(const Grid& grid) const {
    if (points.size() < 16) throw Error(ErrorKind::InvalidArgument, "a material loop needs at least 16 markers");
    for (const Point& p : points)
        if (!(p.z > 0.0 && p.z < grid.H) || !std::isfinite(p.x))
            throw Error(ErrorKind::InvalidArgument, "loop markers must lie strictly inside the channel");
}

MaterialLoop make_rectangular_loop(double x1, double x2, double z1, double z2, int n) {
    if (!(x2 > x1 && z2 > z1)) throw Error(ErrorKind::InvalidArgument, "loop rectangle must have x2 > x1 and z2 > z1");
    if (n < 16) throw Error(ErrorKind::InvalidArgument, "a material loop needs at least 16 markers");
    const double w = x2 - x1, h = z2 - z1;
    // equal markers per edge (slice domains are far wider than deep, so a
    // split by physical length would leave the vertical edges unresolved);
    // corners always included
    const int nv = n / 4;
    const int nh = (n - 2 * nv) / 2;
    const int nv2 = nv;
    const int nh2 = n - nv - nh - nv2;
    MaterialLoop loop;
    loop.points.reserve(n);
    for (int j = 0; j < nv; ++j) loop.points.push_back({x1, z1 + h * j / nv});
    for (int j = 0; j < nh; ++j) loop.points.push_back({x1 + w * j / nh, z2});
    for (int j = 0; j < nv2; ++j) loop.points.push_back({x2, z2 - h * j / nv2});
    for (int j = 0; j < nh2; ++j) loop.points.push_back({x2 - w * j / nh2, z1});
    return loop;
}

namespace {

ScalarField density_or_one(const SliceState& s) { return s.D ? *s.D : ScalarField(s.grid(), 1.0); }

void add_sq_grad(const ScalarField& F, ScalarField& acc) {
    ScalarField fx = ddx(F), fz = ddz(F);
    acc += fx * fx + fz * fz;
}

}  // namespace

double energy(ModelKind kind, const SliceState& state, const ModelParams& params) {
    check_state_for_kind(kind, state);
    const Grid& g = state.grid();
    const auto& [u, w, uT, th] = std::tie(state.u, state.w, state.uT, state.thetaS);
    ScalarField ke = u * u + w * w + uT * uT;
    switch (kind) {
        case ModelKind::EadyBoussinesq:
        case ModelKind::AlphaEady: {
            if (kind == ModelKind::AlphaEady) {
                ScalarField grads(g);
                add_sq_grad(u, grads);
                add_sq_grad(w, grads);
                add_sq_grad(uT, grads);
                ke.axpy(params.alpha * params.alpha, grads);
            }
            ScalarField pe = boussinesq_gamma(g, params) * th;
            return integral(0.5 * ke - pe);
        }
        case ModelKind::SCM:
        case ModelKind::Cullen2008: {
            const ScalarField& D = *state.D;
            ScalarField Pi = exner(D, th, params);
            const double gg = params.g;
            ScalarField gz = ScalarField::from_function(g, [gg](double, double z) { return gg * z; });
            return integral(D * (0.5 * ke + gz + params.cv * Pi * th));
        }
    }
    throw Error(ErrorKind::InvalidArgument, "unknown model kind");
}

SliceMomenta slice_momenta(ModelKind kind, const SliceState& state, const ModelParams& params) {
    check_state_for_kind(kind, state);
    if (kind == ModelKind::AlphaEady)
        return {helmholtz_apply(params.alpha, state.u, WallCondition::Neumann),
                helmholtz_apply(params.alpha, state.w, WallCondition::Dirichlet),
                helmholtz_apply(params.alpha, state.uT, WallCondition::Neumann), params.f};
    return {state.u, state.w, state.uT, params.f};
}

ScalarField potential_vorticity(ModelKind kind, const SliceState& state, const ModelParams& params) {
    SliceMomenta m = slice_momenta(kind, state, params);
    const ScalarField& th = state.thetaS;
    ScalarField vTx = ddx(m.vT);
    for (double& v : vTx.values()) v += m.f;
    ScalarField jac = vTx * ddz(th) - ddz(m.vT) * ddx(th);
    ScalarField q = params.s * curl_y(m.vS_x, m.vS_z) + jac;
    if (state.D) q = q / *state.D;
    return q;
}

double circulation(const MaterialLoop& loop, ModelKind kind, const SliceState& state, const ModelParams& params) {
    SliceMomenta m = slice_momenta(kind, state, params);
    ScalarField tx = ddx(state.thetaS), tz = ddz(state.thetaS);
    const Grid& g = state.grid();
    const std::size_t n = loop.points.size();
    std::vector<Point> F(n);
    for (std::size_t j = 0; j < n; ++j) {
        const Point& p = loop.points[j];
        velocity_at(state, p);  // escape check
        const double z = std::clamp(p.z, 0.0, g.H);
        const double vT = interp_bilinear(m.vT, p.x, z) + m.f * p.x;
        F[j] = {params.s * interp_bilinear(m.vS_x, p.x, z) - vT * interp_bilinear(tx, p.x, z),
                params.s * interp_bilinear(m.vS_z, p.x, z) - vT * interp_bilinear(tz, p.x, z)};
    }
    double c = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t k = (j + 1) % n;
        const double dx = loop.points[k].x - loop.points[j].x;
        const double dz = loop.points[k].z - loop.points[j].z;
        c += 0.5 * ((F[j].x + F[k].x) * dx + (F[j].z + F[k].z) * dz);
    }
    return c;
}

MaterialLoop advect_loop(const MaterialLoop& loop, const SliceState& a, const SliceState& b, double dt) {
    if (!(a.grid() == b.grid())) throw Error(ErrorKind::InvalidArgument, "states must share a grid");
    auto vel = [&](const Point& p, double c) {
        Point va = velocity_at(a, p), vb = velocity_at(b, p);
        return Point{(1 - c) * va.x + c * vb.x, (1 - c) * va.z + c * vb.z};
    };
    MaterialLoop out = loop;
    for (Point& p : out.points) {
        const Point p0 = p;
        Point k1 = vel(p0, 0.0);
        Point k2 = vel({p0.x + 0.5 * dt * k1.x, p0.z + 0.5 * dt * k1.z}, 0.5);
        Point k3 = vel({p0.x + 0.5 * dt * k2.x, p0.z + 0.5 * dt * k2.z}, 0.5);
        Point k4 = vel({p0.x + dt * k3.x, p0.z + dt * k3.z}, 1.0);
        p.x = p0.x + dt / 6.0 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x);
        p.z = p0.z + dt / 6.0 * (k1.z + 2 * k2.z + 2 * k3.z + k4.z);
    }
    clamp_to_channel(a.grid(), out.points);
    return out;
}

MaterialLoop advect_loop(const MaterialLoop& loop, const SliceState& state, double dt) {
    return advect_loop(loop, state, state, dt);
}

ScalarField pv_production_cullen(const SliceState& state, const ModelParams& params) {
    if (!state.D) throw Error(ErrorKind::KindStateMismatch, "PV production needs a compressible state");
    ScalarField Pi = exner(*state.D, state.thetaS, params);
    return params.cp * jacobian(state.thetaS, Pi) / *state.D;
}

double circulation_rate_cullen(const MaterialLoop& loop, const SliceState& state, const ModelParams& params) {
    if (!state.D) throw Error(ErrorKind::KindStateMismatch, "Cullen circulation rate needs a compressible state");
    ScalarField Pi = exner(*state.D, state.thetaS, params);
    ScalarField fx = params.cp * state.thetaS * ddx(Pi), fz = params.cp * state.thetaS * ddz(Pi);
    const std::size_t n = loop.points.size();
    double c = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const Point& p = loop.points[j];
        const Point& q = loop.points[(j + 1) % n];
        c += 0.5 * ((interp_bilinear(fx, p.x, p.z) + interp_bilinear(fx, q.x, q.z)) * (q.x - p.x) +
                    (interp_bilinear(fz, p.x, p.z) + interp_bilinear(fz, q.x, q.z)) * (q.z - p.z));
    }
    return -params.s * c;
}

std::pair<ScalarField, ScalarField> momentum_map_mR(ModelKind kind, const SliceState& state,
                                                    const ModelParams& params) {
    if (params.s == 0.0) throw Error(ErrorKind::SZero, "the momentum map needs s != 0");
    SliceMomenta m = slice_momenta(kind, state, params);
    const double f = m.f;
    ScalarField mT = m.vT + ScalarField::from_function(state.grid(), [f](double x, double) { return f * x; });
    if (state.D) mT = mT * *state.D;
    mT *= 1.0 / params.s;
    return {mT * ddx(state.thetaS), mT * ddz(state.thetaS)};
}

DiagnosticsRecord compute_record(ModelKind kind, const SliceState& state, const ModelParams& params,
                                 std::span<const MaterialLoop> loops) {
    DiagnosticsRecord r;
    r.time = state.time;
    r.energy = energy(kind, state, params);
    ScalarField D = density_or_one(state);
    r.mass = integral(D);
    r.theta_integral = integral(D * state.thetaS);
    ScalarField q = potential_vorticity(kind, state, params);
    r.pv_min = q.min();
    r.pv_max = q.max();
    r.pv_l2 = l2_norm(q);
    if (!is_compressible(kind)) r.div_linf = divergence(state.u, state.w).max_abs();
    for (const MaterialLoop& loop : loops) r.circulation.push_back(circulation(loop, kind, state, params));
    if (kind == ModelKind::Cullen2008) r.pv_production_l2 = l2_norm(pv_production_cullen(state, params));
    return r;
}

void write_csv_header(std::ostream& os, std::size_t n_loops) {
    os << "time,energy,mass,theta_integral,pv_min,pv_max,pv_l2,div_linf";
    for (std::size_t j = 0; j < n_loops; ++j) os << ",circ_" << j;
    os << ",pv_prod_l2\n";
}

namespace {

void put(std::ostream& os, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
}

}  // namespace

void write_csv_row(std::ostream& os, const DiagnosticsRecord& rec) {
    const double nan = std::nan("");
    for (double v : {rec.time, rec.energy, rec.mass, rec.theta_integral, rec.pv_min, rec.pv_max, rec.pv_l2}) {
        put(os, v);
        os << ',';
    }
    put(os, rec.div_linf.value_or(nan));
    for (double c : rec.circulation) {
        os << ',';
        put(os, c);
    }
    os << ',';
    put(os, rec.pv_production_l2.value_or(nan));
    os << '\n';
}

std::vector<Point> TrackedPoints::pack() const {
    std::vector<Point> out;
    for (const MaterialLoop& l : loops) out.insert(out.end(), l.points.begin(), l.points.end());
    out.insert(out.end(), tracers.begin(), tracers.end());
    return out;
}

void TrackedPoints::unpack(std::span<const Point> packed) {
    std::size_t total = tracers.size();
    for (const MaterialLoop& l : loops) total += l.points.size();
    if (packed.size() != total) throw Error(ErrorKind::InvalidArgument, "packed marker count mismatch");
    std::size_t n = 0;
    for (MaterialLoop& l : loops)
        for (Point& p : l.points) p = packed[n++];
    for (Point& p : tracers) p = packed[n++];
}

std::vector<Point> tracer_lattice(const Grid& grid, int n_x, int n_z, double margin_fraction) {
    if (n_x < 1 || n_z < 1) throw Error(ErrorKind::InvalidArgument, "tracer lattice needs positive counts");
    std::vector<Point> out;
    const double z0 = margin_fraction * grid.H, z1 = (1 - margin_fraction) * grid.H;
    for (int k = 0; k < n_z; ++k)
        for (int i = 0; i < n_x; ++i) {
            const double z = n_z == 1 ? 0.5 * grid.H : z0 + (z1 - z0) * k / (n_z - 1);
            out.push_back({grid.L * (i + 0.5) / n_x, z});
        }
    return out;
}

std::vector<double> sample(const ScalarField& field, std::span<const Point> points) {
    std::vector<double> out;
    out.reserve(points.size());
    for (const Point& p : points) out.push_back(interp_cubic(field, p.x, p.z));
    return out;
}

}  // namespace slice
