#include "slice/timestepping.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "slice/error.hpp"

namespace slice {

std::string_view to_string(Scheme scheme) { return scheme == Scheme::RK4 ? "rk4" : "ssprk3"; }

Scheme scheme_from_string(std::string_view name) {
    if (name == "rk4" || name == "RK4") return Scheme::RK4;
    if (name == "ssprk3" || name == "SSPRK3") return Scheme::SSPRK3;
    throw Error(ErrorKind::Config, "unknown scheme '" + std::string(name) + "' (expected rk4 or ssprk3)");
}

void IntegratorConfig::validate() const {
    if (dt && !(*dt > 0.0)) throw Error(ErrorKind::InvalidTimeStep, "dt must be positive");
    if (!(courant > 0.0 && courant <= 1.0)) throw Error(ErrorKind::InvalidArgument, "courant must lie in (0, 1]");
    if (!(dt_max > 0.0)) throw Error(ErrorKind::InvalidArgument, "dt_max must be positive");
    if (!std::isfinite(t_end)) throw Error(ErrorKind::InvalidArgument, "t_end must be finite");
    solver.validate();
}

namespace {

constexpr double kEscapeTol = 1e-9;

std::string time_str(double t) {
    std::ostringstream os;
    os.precision(17);
    os << t;
    return os.str();
}

// a + c*b for every prognostic field
SliceState combine(const SliceState& a, double c, const Tendencies& b) {
    SliceState out = a;
    out.u.axpy(c, b.du);
    out.w.axpy(c, b.dw);
    out.uT.axpy(c, b.duT);
    out.thetaS.axpy(c, b.dthetaS);
    if (out.D && b.dD) out.D->axpy(c, *b.dD);
    out.enforce_walls();
    return out;
}

// ca*a + cb*b
SliceState blend(double ca, const SliceState& a, double cb, const SliceState& b) {
    SliceState out = a;
    out.u *= ca;
    out.u.axpy(cb, b.u);
    out.w *= ca;
    out.w.axpy(cb, b.w);
    out.uT *= ca;
    out.uT.axpy(cb, b.uT);
    out.thetaS *= ca;
    out.thetaS.axpy(cb, b.thetaS);
    if (out.D) {
        *out.D *= ca;
        out.D->axpy(cb, *b.D);
    }
    out.enforce_walls();
    return out;
}

std::vector<Point> velocities(const SliceState& s, const std::vector<Point>& pts) {
    std::vector<Point> v(pts.size());
    for (std::size_t n = 0; n < pts.size(); ++n) v[n] = velocity_at(s, pts[n]);
    return v;
}

std::vector<Point> shifted(const std::vector<Point>& p, double c, const std::vector<Point>& v) {
    std::vector<Point> out(p.size());
    for (std::size_t n = 0; n < p.size(); ++n) out[n] = {p[n].x + c * v[n].x, p[n].z + c * v[n].z};
    return out;
}

}  // namespace

Point velocity_at(const SliceState& state, const Point& p) {
    const Grid& g = state.grid();
    const double tol = kEscapeTol * g.H;
    if (!(p.z >= -tol && p.z <= g.H + tol))
        throw Error(ErrorKind::MarkerEscape, "marker at z = " + time_str(p.z) + " left the channel");
    const double z = std::clamp(p.z, 0.0, g.H);
    return {interp_bilinear(state.u, p.x, z), interp_bilinear(state.w, p.x, z)};
}

void clamp_to_channel(const Grid& grid, std::vector<Point>& points) {
    const double tol = kEscapeTol * grid.H;
    for (Point& p : points) {
        if (!(p.z >= -tol && p.z <= grid.H + tol) || !std::isfinite(p.x))
            throw Error(ErrorKind::MarkerEscape, "marker at z = " + time_str(p.z) + " left the channel");
        p.z = std::clamp(p.z, 0.0, grid.H);
    }
}

Stepper::Stepper(ModelKind kind, const ModelParams& params, const Grid& grid, EllipticSolverConfig solver_cfg,
                 Scheme scheme)
    : kind_(kind), params_(params), scheme_(scheme) {
    params_.validate();
    if (kind == ModelKind::EadyBoussinesq) solver_.emplace(grid, 0.0, solver_cfg);
    if (kind == ModelKind::AlphaEady) {
        if (!(params.alpha > 0.0)) throw Error(ErrorKind::InvalidArgument, "alpha model needs alpha > 0");
        solver_.emplace(grid, params.alpha, solver_cfg);
    }
}

Tendencies Stepper::tendencies(const SliceState& state) const {
    return model_tendencies(kind_, state, params_, solver());
}

SliceState Stepper::step(const SliceState& s0, double dt, std::vector<Point>* markers) const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorKind::InvalidTimeStep, "dt must be positive and finite");
    const bool track = markers && !markers->empty();
    const Grid& g = s0.grid();
    auto finite_or_throw = [&](const SliceState& s, double t) {
        if (!s.all_finite()) throw Error(ErrorKind::BlowUp, "non-finite prognostic field at t = " + time_str(t));
    };
    finite_or_throw(s0, s0.time);
    SliceState out;
    std::vector<Point> p0 = track ? *markers : std::vector<Point>{};

    if (scheme_ == Scheme::RK4) {
        Tendencies k1 = tendencies(s0);
        std::vector<Point> v1 = track ? velocities(s0, p0) : std::vector<Point>{};
        SliceState s1 = combine(s0, 0.5 * dt, k1);
        finite_or_throw(s1, s0.time + 0.5 * dt);
        std::vector<Point> p1 = shifted(p0, 0.5 * dt, v1);

        Tendencies k2 = tendencies(s1);
        std::vector<Point> v2 = track ? velocities(s1, p1) : std::vector<Point>{};
        SliceState s2 = combine(s0, 0.5 * dt, k2);
        finite_or_throw(s2, s0.time + 0.5 * dt);
        std::vector<Point> p2 = shifted(p0, 0.5 * dt, v2);

        Tendencies k3 = tendencies(s2);
        std::vector<Point> v3 = track ? velocities(s2, p2) : std::vector<Point>{};
        SliceState s3 = combine(s0, dt, k3);
        finite_or_throw(s3, s0.time + dt);
        std::vector<Point> p3 = shifted(p0, dt, v3);

        Tendencies k4 = tendencies(s3);
        std::vector<Point> v4 = track ? velocities(s3, p3) : std::vector<Point>{};

        out = combine(s0, dt / 6.0, k1);
        auto acc = [&](double c, const Tendencies& k) {
            out.u.axpy(c, k.du);
            out.w.axpy(c, k.dw);
            out.uT.axpy(c, k.duT);
            out.thetaS.axpy(c, k.dthetaS);
            if (out.D && k.dD) out.D->axpy(c, *k.dD);
        };
        acc(dt / 3.0, k2);
        acc(dt / 3.0, k3);
        acc(dt / 6.0, k4);
        out.enforce_walls();
        if (track) {
            for (std::size_t n = 0; n < p0.size(); ++n) {
                (*markers)[n].x = p0[n].x + dt / 6.0 * (v1[n].x + 2 * v2[n].x + 2 * v3[n].x + v4[n].x);
                (*markers)[n].z = p0[n].z + dt / 6.0 * (v1[n].z + 2 * v2[n].z + 2 * v3[n].z + v4[n].z);
            }
        }
    } else {
        Tendencies k1 = tendencies(s0);
        std::vector<Point> v1 = track ? velocities(s0, p0) : std::vector<Point>{};
        SliceState s1 = combine(s0, dt, k1);
        finite_or_throw(s1, s0.time + dt);
        std::vector<Point> p1 = shifted(p0, dt, v1);

        Tendencies k2 = tendencies(s1);
        std::vector<Point> v2 = track ? velocities(s1, p1) : std::vector<Point>{};
        SliceState s2 = blend(0.75, s0, 0.25, combine(s1, dt, k2));
        finite_or_throw(s2, s0.time + 0.5 * dt);
        std::vector<Point> p2(p0.size());
        for (std::size_t n = 0; n < p0.size(); ++n)
            p2[n] = {0.75 * p0[n].x + 0.25 * (p1[n].x + dt * v2[n].x), 0.75 * p0[n].z + 0.25 * (p1[n].z + dt * v2[n].z)};

        Tendencies k3 = tendencies(s2);
        std::vector<Point> v3 = track ? velocities(s2, p2) : std::vector<Point>{};
        out = blend(1.0 / 3.0, s0, 2.0 / 3.0, combine(s2, dt, k3));
        if (track) {
            for (std::size_t n = 0; n < p0.size(); ++n) {
                (*markers)[n].x = p0[n].x / 3.0 + 2.0 / 3.0 * (p2[n].x + dt * v3[n].x);
                (*markers)[n].z = p0[n].z / 3.0 + 2.0 / 3.0 * (p2[n].z + dt * v3[n].z);
            }
        }
    }
    out.time = s0.time + dt;
    if (!out.all_finite())
        throw Error(ErrorKind::BlowUp, "non-finite prognostic field at t = " + time_str(out.time));
    if (track) clamp_to_channel(g, *markers);
    return out;
}

SliceState step(ModelKind kind, const SliceState& state, const ModelParams& params, double dt,
                const IntegratorConfig& cfg) {
    if (!(dt > 0.0)) throw Error(ErrorKind::InvalidTimeStep, "dt must be positive");
    return Stepper(kind, params, state.grid(), cfg.solver, cfg.scheme).step(state, dt);
}

double cfl_dt(const SliceState& state, const ModelParams& params, double courant, double dt_max) {
    const Grid& g = state.grid();
    const double h = std::min(g.dx, g.dz);
    double cs = 0.0;
    if (state.D) {
        ScalarField Pi = exner(*state.D, state.thetaS, params);
        double m = 0.0;
        for (std::size_t n = 0; n < Pi.size(); ++n) m = std::max(m, Pi[n] * state.thetaS[n]);
        cs = std::sqrt(params.cp * params.R() * m / params.cv);
    }
    const double cmax = std::max(state.u.max_abs(), state.w.max_abs()) + cs;
    double dt = cmax > 0.0 ? courant * h / cmax : dt_max;
    if (!state.D) {
        ScalarField n2 = (params.g / params.theta0) * ddz(state.thetaS);
        const double N = std::sqrt(std::max(0.0, n2.max()));
        if (N > 0.0) dt = std::min(dt, courant / N);
    }
    return std::min(dt, dt_max);
}

SliceState integrate(ModelKind kind, const SliceState& state0, const ModelParams& params,
                     const IntegratorConfig& cfg, const DiagnosticCallback& on_diagnostic,
                     std::vector<Point>* markers) {
    cfg.validate();
    check_state_for_kind(kind, state0);
    const double t0 = state0.time;
    if (cfg.t_end < t0) throw Error(ErrorKind::InvalidArgument, "t_end precedes the initial time");
    Stepper stepper(kind, params, state0.grid(), cfg.solver, cfg.scheme);
    std::vector<Point> none;
    auto emit = [&](const SliceState& s) {
        if (on_diagnostic) on_diagnostic(s, markers ? std::span<const Point>(*markers) : std::span<const Point>(none));
    };

    SliceState state = state0;
    emit(state);
    const double span = cfg.t_end - t0;
    if (span == 0.0) return state;
    const double interval = cfg.diag_interval > 0.0 ? cfg.diag_interval : span;

    for (long seg = 0;; ++seg) {
        const double seg_start = state.time;
        double len = interval;
        bool last = false;
        if (cfg.t_end - seg_start <= interval * (1.0 + 1e-12)) {
            len = cfg.t_end - seg_start;
            last = true;
        }
        if (len <= 0.0) break;
        const double target = cfg.dt ? *cfg.dt : cfl_dt(state, params, cfg.courant, cfg.dt_max);
        const long n = std::max(1L, static_cast<long>(std::ceil(len / target - 1e-9)));
        const double h = len / static_cast<double>(n);
        for (long j = 0; j < n; ++j) {
            try {
                state = stepper.step(state, h, markers);
            } catch (const Error& e) {
                std::string msg = e.what();
                const auto colon = msg.find(": ");
                if (colon != std::string::npos) msg = msg.substr(colon + 2);
                throw Error(e.kind(), msg + " (last good time " + time_str(state.time) + ")");
            }
        }
        state.time = last ? cfg.t_end : seg_start + len;
        emit(state);
        if (last) break;
    }
    return state;
}

}  // namespace slice
