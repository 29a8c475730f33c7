#include "slice/harness.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <numbers>

#include "json.hpp"
#include "slice/config.hpp"
#include "slice/error.hpp"

namespace slice {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

ExperimentConfig::ExperimentConfig() {
    integrator.t_end = 86400.0;
    integrator.diag_interval = 3600.0;
}

void ExperimentConfig::validate() const {
    auto fail = [](const std::string& msg) { throw Error(ErrorKind::InvalidArgument, msg); };
    if (grid.nx < 4 || grid.nz < 4) fail("grid needs nx, nz >= 4");
    if (!(grid.L > 0.0) || !(grid.H > 0.0)) fail("grid extents must be positive");
    params.validate();
    integrator.validate();
    if (!(N2 >= 0.0)) fail("N2 must be nonnegative");
    if (!(Pi_surface > 0.0)) fail("Pi_surface must be positive");
    if (!(perturbation.amplitude >= 0.0)) fail("perturbation.amplitude must be nonnegative");
    if (perturbation.mode < 1) fail("perturbation.mode must be >= 1");
    for (const LoopSpec& l : loops) {
        if (!(l.x1 < l.x2) || !(0.0 < l.z1) || !(l.z1 < l.z2) || !(l.z2 < 1.0) || l.n < 16)
            fail("loop needs x1 < x2, 0 < z1 < z2 < 1 and n >= 16");
    }
    if (tracers.nx < 1 || tracers.nz < 1 || !(tracers.margin >= 0.0) || !(tracers.margin < 0.5))
        fail("tracers need positive counts and margin in [0, 0.5)");
}

SliceState boussinesq_balanced_state(const Grid& grid, const ModelParams& params, double N2) {
    if (params.f == 0.0) throw Error(ErrorKind::FZero, "balanced state needs f != 0");
    SliceState st = SliceState::zeros(grid, false);
    const double shear = -params.g * params.s / (params.f * params.theta0);
    const double lapse = params.theta0 * N2 / params.g;
    st.u = ScalarField::from_function(grid, [&](double, double z) { return shear * (z - 0.5 * grid.H) - params.frame_u; });
    st.thetaS = ScalarField::from_function(grid, [&](double, double z) { return lapse * (z - 0.5 * grid.H); });
    return st;
}

namespace {

// Pi at every z node by RK4 with substeps.
std::vector<double> hydrostatic_exner(const Grid& grid, const ModelParams& params,
                                      const std::function<double(double)>& theta, double Pi_surface) {
    auto rhs = [&](double z) {
        const double th = theta(z);
        if (!(th > 0.0)) throw Error(ErrorKind::NonpositiveTemperature, "theta profile must be positive");
        return -params.g / (params.cp * th);
    };
    constexpr int sub = 8;
    const double h = grid.dz / sub;
    std::vector<double> Pi(grid.nz);
    double P = Pi_surface, z = 0.0;
    Pi[0] = P;
    for (int k = 1; k < grid.nz; ++k) {
        for (int j = 0; j < sub; ++j) {
            // rhs does not depend on Pi, so RK4 reduces to Simpson's rule
            P += h / 6.0 * (rhs(z) + 4.0 * rhs(z + 0.5 * h) + rhs(z + h));
            z += h;
        }
        z = k * grid.dz;
        if (!(P > 0.0)) throw Error(ErrorKind::NonpositiveExner, "Exner function reached zero; domain too tall");
        Pi[k] = P;
    }
    return Pi;
}

}  // namespace

SliceState scm_hydrostatic_state(const Grid& grid, const ModelParams& params,
                                 const std::function<double(double)>& theta_profile, double Pi_surface) {
    if (params.f == 0.0) throw Error(ErrorKind::FZero, "balanced state needs f != 0");
    const std::vector<double> Pi = hydrostatic_exner(grid, params, theta_profile, Pi_surface);
    SliceState st = SliceState::zeros(grid, true);
    const double R = params.R();
    for (int k = 0; k < grid.nz; ++k) {
        const double z = k * grid.dz;
        const double th = theta_profile(z);
        const double D = params.p0 * std::pow(Pi[k], params.cv / R) / (R * th);
        const double u = params.s / params.f * params.cp * Pi[k] - params.frame_u;
        for (int i = 0; i < grid.nx; ++i) {
            st.u(i, k) = u;
            st.thetaS(i, k) = th;
            (*st.D)(i, k) = D;
        }
    }
    return st;
}

std::function<double(double)> stratified_theta(const ModelParams& params, double N2, double H) {
    return [=](double z) { return params.theta0 * (1.0 + N2 * (z - 0.5 * H) / params.g); };
}

SliceState add_perturbation(const SliceState& state, double amplitude, int mode) {
    SliceState out = state;
    if (amplitude == 0.0) return out;
    const Grid& g = state.grid();
    out.thetaS += ScalarField::from_function(g, [&](double x, double z) {
        return amplitude * std::sin(2.0 * std::numbers::pi * mode * x / g.L) * std::sin(std::numbers::pi * z / g.H);
    });
    return out;
}

double reference_exner_mid(const ExperimentConfig& cfg) {
    GridSpec column = cfg.grid;
    column.nx = 4;
    if ((column.nz - 1) % 2 != 0) column.nz += 1;  // need a node at H/2
    const Grid g = column.make();
    return hydrostatic_exner(g, cfg.params, stratified_theta(cfg.params, cfg.N2, cfg.grid.H), cfg.Pi_surface)[(g.nz - 1) / 2];
}

SliceState initial_state(const ExperimentConfig& cfg) {
    const Grid g = cfg.grid.make();
    SliceState st = is_compressible(cfg.kind) ? scm_hydrostatic_state(g, cfg.params, stratified_theta(cfg.params, cfg.N2, cfg.grid.H), cfg.Pi_surface)
                                              : boussinesq_balanced_state(g, cfg.params, cfg.N2);
    return add_perturbation(st, cfg.perturbation.amplitude, cfg.perturbation.mode);
}

namespace {

double max_grad(const ScalarField& f) {
    ScalarField gx = ddx(f), gz = ddz(f);
    double m = 0.0;
    for (std::size_t n = 0; n < f.size(); ++n) m = std::max(m, std::hypot(gx[n], gz[n]));
    return m;
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// trapezoid accumulation of samples taken at diagnostic times
struct Accumulator {
    std::vector<double> total;
    std::vector<double> last;
    double last_t = 0.0;
    bool started = false;

    void add(double t, const std::vector<double>& v) {
        if (!started) {
            total.assign(v.size(), 0.0);
            started = true;
        } else {
            for (std::size_t j = 0; j < v.size(); ++j) total[j] += 0.5 * (t - last_t) * (v[j] + last[j]);
        }
        last = v;
        last_t = t;
    }
};

void write_tracer_rows(std::ostream& os, double t, std::span<const Point> pts, const std::vector<double>& q) {
    char buf[160];
    for (std::size_t j = 0; j < pts.size(); ++j) {
        std::snprintf(buf, sizeof buf, "%.17g,%zu,%.17g,%.17g,%.17g\n", t, j, pts[j].x, pts[j].z, q[j]);
        os << buf;
    }
}

}  // namespace

RunSummary run_tracked(const ExperimentConfig& cfg, bool write_files) {
    cfg.validate();
    const Grid g = cfg.grid.make();
    const SliceState s0 = initial_state(cfg);
    const ModelParams& p = cfg.params;
    const bool cullen = cfg.kind == ModelKind::Cullen2008;

    TrackedPoints tp;
    for (const LoopSpec& l : cfg.loops)
        tp.loops.push_back(make_rectangular_loop(l.x1 * g.L, l.x2 * g.L, l.z1 * g.H, l.z2 * g.H, l.n));
    tp.tracers = tracer_lattice(g, cfg.tracers.nx, cfg.tracers.nz, cfg.tracers.margin);
    std::vector<Point> markers = tp.pack();

    std::ofstream diag_csv, tracer_csv;
    fs::path dir(cfg.output_dir);
    if (write_files) {
        fs::create_directories(dir);
        if (cfg.write_snapshots) fs::create_directories(dir / "snapshots");
        diag_csv.open(dir / "diagnostics.csv");
        tracer_csv.open(dir / "tracers.csv");
        if (!diag_csv || !tracer_csv) throw Error(ErrorKind::Io, "cannot write into " + dir.string());
        write_csv_header(diag_csv, tp.loops.size());
        tracer_csv << "time,id,x,z,q\n";
        write_provenance(dir.string(), cfg, "run");
    }

    RunSummary out;
    std::vector<double> q0, q_last;
    double pv_dev = 0.0;
    Accumulator pv_budget, circ_budget;
    int snap = 0;
    auto on_diag = [&](const SliceState& st, std::span<const Point> pts) {
        tp.unpack(pts);
        DiagnosticsRecord rec = compute_record(cfg.kind, st, p, tp.loops);
        ScalarField q = potential_vorticity(cfg.kind, st, p);
        std::vector<double> qs = sample(q, tp.tracers);
        if (q0.empty()) q0 = qs;
        for (std::size_t j = 0; j < qs.size(); ++j) pv_dev = std::max(pv_dev, std::abs(qs[j] - q0[j]));
        q_last = qs;
        if (cullen) {
            std::vector<double> prod = sample(p.s * pv_production_cullen(st, p), tp.tracers);
            pv_budget.add(st.time, prod);
            std::vector<double> rates;
            for (const MaterialLoop& l : tp.loops) rates.push_back(circulation_rate_cullen(l, st, p));
            circ_budget.add(st.time, rates);
        }
        if (write_files) {
            write_csv_row(diag_csv, rec);
            write_tracer_rows(tracer_csv, st.time, tp.tracers, qs);
            if (cfg.write_snapshots) {
                char prefix[32];
                std::snprintf(prefix, sizeof prefix, "t%05d_", snap);
                write_state_snapshot((dir / "snapshots").string(), st, prefix);
            }
        }
        ++snap;
        out.records.push_back(std::move(rec));
    };

    out.dt = cfg.integrator.dt ? *cfg.integrator.dt : cfl_dt(s0, p, cfg.integrator.courant, cfg.integrator.dt_max);
    out.final_state = integrate(cfg.kind, s0, p, cfg.integrator, on_diag, &markers);

    const DiagnosticsRecord& a = out.records.front();
    const DiagnosticsRecord& b = out.records.back();
    const double U = std::max({s0.u.max_abs(), s0.w.max_abs(), 1e-300});
    const double problem_scale = std::abs(p.s) * U * g.L;
    double c0 = 0.0;
    for (double c : a.circulation) c0 = std::max(c0, std::abs(c));
    out.circulation_scale = c0 > 1e-8 * problem_scale ? c0 : problem_scale;
    double de = 0.0, dm = 0.0, dc = 0.0;
    for (const DiagnosticsRecord& r : out.records) {
        de = std::max(de, std::abs(r.energy - a.energy));
        dm = std::max(dm, std::abs(r.mass - a.mass));
        for (std::size_t j = 0; j < a.circulation.size(); ++j)
            dc = std::max(dc, std::abs(r.circulation[j] - a.circulation[j]));
    }
    out.energy_drift = de / std::max(std::abs(a.energy), 1e-300);
    if (is_compressible(cfg.kind)) out.mass_drift = dm / a.mass;
    out.circulation_drift = dc / std::max(out.circulation_scale, 1e-300);
    out.pv_error = pv_dev / std::max(max_abs(q0), 1e-300);

    std::vector<double> delta_q(q0.size());
    for (std::size_t j = 0; j < q0.size(); ++j) delta_q[j] = q_last[j] - q0[j];

    if (cullen) {
        double e = 0.0;
        for (std::size_t j = 0; j < delta_q.size(); ++j) e = std::max(e, std::abs(delta_q[j] - pv_budget.total[j]));
        out.pv_budget_error = e / std::max(max_abs(pv_budget.total), 1e-300);
        double ec = 0.0;
        for (std::size_t j = 0; j < a.circulation.size(); ++j)
            ec = std::max(ec, std::abs(b.circulation[j] - a.circulation[j] - circ_budget.total[j]));
        out.circulation_budget_error = ec / std::max(max_abs(circ_budget.total), 1e-300);
    }
    out.grad_theta_initial = max_grad(s0.thetaS);
    out.grad_theta_final = max_grad(out.final_state.thetaS);

    if (write_files) {
        ordered_json j;
        j["energy_drift"] = out.energy_drift;
        j["circulation_drift"] = out.circulation_drift;
        j["pv_error"] = out.pv_error;
        j["mass_drift"] = out.mass_drift ? ordered_json(*out.mass_drift) : ordered_json(nullptr);
        j["pv_budget_error"] = out.pv_budget_error ? ordered_json(*out.pv_budget_error) : ordered_json(nullptr);
        j["circulation_budget_error"] =
            out.circulation_budget_error ? ordered_json(*out.circulation_budget_error) : ordered_json(nullptr);
        j["max_grad_theta_initial"] = out.grad_theta_initial;
        j["max_grad_theta_final"] = out.grad_theta_final;
        j["frontogenesis_ratio"] = out.grad_theta_final / std::max(out.grad_theta_initial, 1e-300);
        std::ofstream(dir / "summary.json") << j.dump(2) << '\n';
    }
    return out;
}

RunSummary run_frontogenesis(const ExperimentConfig& cfg) { return run_tracked(cfg, true); }

std::optional<double> observed_order(double coarse, double fine, double floor) {
    if (coarse < floor && fine < floor) return std::nullopt;
    if (fine == 0.0) return std::numeric_limits<double>::infinity();
    return std::log2(coarse / fine);
}

ConvergenceTable convergence_study(const ExperimentConfig& cfg, const std::vector<GridSpec>& levels) {
    if (levels.size() < 3) throw Error(ErrorKind::InvalidArgument, "convergence study needs >= 3 levels");
    cfg.validate();
    ExperimentConfig first = cfg;
    first.grid = levels[0];
    const double dx0 = levels[0].L / levels[0].nx;
    const double dt0 = cfg.integrator.dt ? *cfg.integrator.dt
                                         : cfl_dt(initial_state(first), cfg.params, cfg.integrator.courant,
                                                  cfg.integrator.dt_max);
    ConvergenceTable table;
    table.kind = cfg.kind;
    std::vector<std::future<RunSummary>> jobs;
    for (const GridSpec& gs : levels) {
        ConvergenceRow row;
        row.grid = gs;
        row.dt = dt0 * (gs.L / gs.nx) / dx0;
        ExperimentConfig c = cfg;
        c.grid = gs;
        c.integrator.dt = row.dt;
        jobs.push_back(std::async(std::launch::async, [c] { return run_tracked(c, false); }));
        table.rows.push_back(std::move(row));
    }
    for (std::size_t l = 0; l < jobs.size(); ++l) table.rows[l].summary = jobs[l].get();
    for (std::size_t l = 0; l + 1 < table.rows.size(); ++l) {
        const RunSummary& a = table.rows[l].summary;
        const RunSummary& b = table.rows[l + 1].summary;
        table.energy_order.push_back(observed_order(a.energy_drift, b.energy_drift));
        table.circulation_order.push_back(observed_order(a.circulation_drift, b.circulation_drift));
        table.pv_order.push_back(observed_order(a.pv_error, b.pv_error));
        if (a.mass_drift && b.mass_drift) table.mass_order.push_back(observed_order(*a.mass_drift, *b.mass_drift));
    }
    return table;
}

namespace {

double l2_diff(const ScalarField& a, const ScalarField& b) { return l2_norm(a - b); }

double order_between(double d0, double d1, double e0, double e1) { return std::log(d0 / d1) / std::log(e0 / e1); }

}  // namespace

LowMachTable low_mach_study(const ExperimentConfig& cfg, const std::vector<double>& epsilons) {
    if (epsilons.size() < 3) throw Error(ErrorKind::InvalidArgument, "low-Mach study needs >= 3 epsilon values");
    for (std::size_t j = 0; j < epsilons.size(); ++j) {
        if (!(epsilons[j] > 0.0)) throw Error(ErrorKind::InvalidArgument, "epsilon must be positive");
        if (j > 0 && !(epsilons[j] < epsilons[j - 1]))
            throw Error(ErrorKind::InvalidArgument, "epsilon values must be strictly decreasing");
    }
    cfg.validate();

    auto scaled = [&](double eps) {
        ExperimentConfig c = cfg;
        c.kind = ModelKind::SCM;
        const double k = 1.0 / (eps * eps);
        c.params.theta0 *= k;
        c.params.s *= k;
        c.perturbation.amplitude *= k;
        c.params.frame_u = 0.0;
        c.params.frame_u = c.params.s / c.params.f * c.params.cp * reference_exner_mid(c);
        return c;
    };

    // The perturbation is applied at fixed pressure (D theta unchanged) so the
    // data are well prepared: a fixed-D perturbation carries a pressure pulse
    // whose acoustic velocities grow like the sound speed.
    auto scm_initial = [](const ExperimentConfig& c) {
        const Grid g = c.grid.make();
        const SliceState bal = scm_hydrostatic_state(g, c.params, stratified_theta(c.params, c.N2, c.grid.H), c.Pi_surface);
        SliceState st = add_perturbation(bal, c.perturbation.amplitude, c.perturbation.mode);
        *st.D = *bal.D * bal.thetaS / st.thetaS;
        return st;
    };

    // matched incompressible data: the SCM velocity in the moving frame does
    // not depend on eps, and eps^2 (theta - theta0/eps^2) is the Boussinesq theta
    ExperimentConfig c0 = scaled(epsilons.front());
    const SliceState scm0 = scm_initial(c0);
    SliceState bsq0 = SliceState::zeros(scm0.grid(), false);
    bsq0.u = scm0.u;
    bsq0.w = scm0.w;
    bsq0.uT = scm0.uT;
    const double e2 = epsilons.front() * epsilons.front();
    bsq0.thetaS = e2 * (scm0.thetaS - ScalarField(scm0.grid(), c0.params.theta0));

    auto bsq_job = std::async(std::launch::async, [&] {
        return integrate(ModelKind::EadyBoussinesq, bsq0, cfg.params, cfg.integrator);
    });
    std::vector<std::future<SliceState>> jobs;
    for (double eps : epsilons)
        jobs.push_back(std::async(std::launch::async, [c = scaled(eps), &scm_initial] {
            return integrate(ModelKind::SCM, scm_initial(c), c.params, c.integrator);
        }));
    const SliceState bsq = bsq_job.get();

    LowMachTable t;
    for (std::size_t j = 0; j < epsilons.size(); ++j) {
        const SliceState scm = jobs[j].get();
        const double eps2 = epsilons[j] * epsilons[j];
        const double th0 = cfg.params.theta0 / eps2;
        LowMachRow r;
        r.epsilon = epsilons[j];
        r.diff_u = l2_diff(scm.u, bsq.u);
        r.diff_uT = l2_diff(scm.uT, bsq.uT);
        r.diff_theta = l2_diff(eps2 * (scm.thetaS - ScalarField(scm.grid(), th0)), bsq.thetaS);
        t.rows.push_back(r);
    }
    t.monotone = true;
    for (std::size_t j = 0; j + 1 < t.rows.size(); ++j) {
        const LowMachRow &a = t.rows[j], &b = t.rows[j + 1];
        t.orders.push_back({order_between(a.diff_u, b.diff_u, a.epsilon, b.epsilon),
                            order_between(a.diff_uT, b.diff_uT, a.epsilon, b.epsilon),
                            order_between(a.diff_theta, b.diff_theta, a.epsilon, b.epsilon)});
        if (!(b.diff_u < a.diff_u) || !(b.diff_uT < a.diff_uT) || !(b.diff_theta < a.diff_theta)) t.monotone = false;
    }
    return t;
}

AlphaTable alpha_limit_study(const ExperimentConfig& cfg, const std::vector<double>& alphas) {
    if (alphas.size() < 2) throw Error(ErrorKind::InvalidArgument, "alpha study needs >= 2 values");
    ExperimentConfig base = cfg;
    base.kind = ModelKind::EadyBoussinesq;
    base.params.alpha = 0.0;
    base.validate();
    const SliceState s0 = initial_state(base);
    IntegratorConfig ic = cfg.integrator;
    if (!ic.dt) ic.dt = cfl_dt(s0, base.params, ic.courant, ic.dt_max);

    auto ref_job = std::async(std::launch::async,
                              [&] { return integrate(ModelKind::EadyBoussinesq, s0, base.params, ic); });
    std::vector<std::future<SliceState>> jobs;
    for (double a : alphas) {
        ModelParams p = base.params;
        p.alpha = a;
        p.validate();
        jobs.push_back(std::async(std::launch::async, [&, p] { return integrate(ModelKind::AlphaEady, s0, p, ic); }));
    }
    const SliceState ref = ref_job.get();
    AlphaTable t;
    for (std::size_t j = 0; j < alphas.size(); ++j) {
        const SliceState s = jobs[j].get();
        const double du = l2_diff(s.u, ref.u), dw = l2_diff(s.w, ref.w), duT = l2_diff(s.uT, ref.uT);
        t.rows.push_back({alphas[j], std::sqrt(du * du + dw * dw + duT * duT), l2_diff(s.thetaS, ref.thetaS)});
    }
    for (std::size_t j = 0; j + 1 < t.rows.size(); ++j) {
        const AlphaRow &a = t.rows[j], &b = t.rows[j + 1];
        t.orders.push_back({order_between(a.diff_velocity, b.diff_velocity, a.alpha, b.alpha),
                            order_between(a.diff_theta, b.diff_theta, a.alpha, b.alpha)});
    }
    return t;
}

namespace {

ordered_json opt_order(const std::optional<double>& o) {
    if (!o) return "exact";
    if (!std::isfinite(*o)) return "inf";
    return *o;
}

ordered_json opt_value(const std::optional<double>& o) { return o ? ordered_json(*o) : ordered_json(nullptr); }

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : "nan"; }

void write_sidecar(const fs::path& path, const ExperimentConfig& cfg, ordered_json results) {
    ordered_json j;
    j["version"] = kVersion;
    j["config"] = ordered_json::parse(config_to_json(cfg));
    j["results"] = std::move(results);
    std::ofstream os(path);
    if (!os) throw Error(ErrorKind::Io, "cannot write " + path.string());
    os << j.dump(2) << '\n';
}

}  // namespace

void write_convergence(const std::string& dir, const ConvergenceTable& t, const ExperimentConfig& cfg) {
    fs::create_directories(dir);
    std::ofstream os(fs::path(dir) / "convergence.csv");
    if (!os) throw Error(ErrorKind::Io, "cannot write convergence.csv");
    os << "nx,nz,dt,energy_drift,circulation_drift,pv_error,mass_drift,pv_budget_error,circulation_budget_error\n";
    for (const ConvergenceRow& r : t.rows) {
        const RunSummary& s = r.summary;
        os << r.grid.nx << ',' << r.grid.nz << ',' << fmt(r.dt) << ',' << fmt(s.energy_drift) << ','
           << fmt(s.circulation_drift) << ',' << fmt(s.pv_error) << ',' << fmt(s.mass_drift) << ','
           << fmt(s.pv_budget_error) << ',' << fmt(s.circulation_budget_error) << '\n';
    }
    ordered_json res;
    res["kind"] = std::string(to_string(t.kind));
    auto arr = [](const std::vector<std::optional<double>>& v) {
        ordered_json a = ordered_json::array();
        for (const auto& o : v) a.push_back(opt_order(o));
        return a;
    };
    res["energy_order"] = arr(t.energy_order);
    res["circulation_order"] = arr(t.circulation_order);
    res["pv_order"] = arr(t.pv_order);
    res["mass_order"] = arr(t.mass_order);
    ordered_json levels = ordered_json::array();
    for (const ConvergenceRow& r : t.rows) {
        ordered_json l;
        l["nx"] = r.grid.nx;
        l["nz"] = r.grid.nz;
        l["dt"] = r.dt;
        l["energy_drift"] = r.summary.energy_drift;
        l["circulation_drift"] = r.summary.circulation_drift;
        l["pv_error"] = r.summary.pv_error;
        l["mass_drift"] = opt_value(r.summary.mass_drift);
        l["pv_budget_error"] = opt_value(r.summary.pv_budget_error);
        l["circulation_budget_error"] = opt_value(r.summary.circulation_budget_error);
        levels.push_back(l);
    }
    res["levels"] = levels;
    write_sidecar(fs::path(dir) / "convergence.json", cfg, res);
}

void write_low_mach(const std::string& dir, const LowMachTable& t, const ExperimentConfig& cfg) {
    fs::create_directories(dir);
    std::ofstream os(fs::path(dir) / "low_mach.csv");
    if (!os) throw Error(ErrorKind::Io, "cannot write low_mach.csv");
    os << "epsilon,diff_u,diff_uT,diff_theta\n";
    for (const LowMachRow& r : t.rows)
        os << fmt(r.epsilon) << ',' << fmt(r.diff_u) << ',' << fmt(r.diff_uT) << ',' << fmt(r.diff_theta) << '\n';
    ordered_json res;
    res["monotone"] = t.monotone;
    ordered_json orders = ordered_json::array();
    for (const auto& o : t.orders) orders.push_back({{"u", o[0]}, {"uT", o[1]}, {"thetaS", o[2]}});
    res["orders"] = orders;
    write_sidecar(fs::path(dir) / "low_mach.json", cfg, res);
}

void write_alpha(const std::string& dir, const AlphaTable& t, const ExperimentConfig& cfg) {
    fs::create_directories(dir);
    std::ofstream os(fs::path(dir) / "alpha_limit.csv");
    if (!os) throw Error(ErrorKind::Io, "cannot write alpha_limit.csv");
    os << "alpha,diff_velocity,diff_theta\n";
    for (const AlphaRow& r : t.rows) os << fmt(r.alpha) << ',' << fmt(r.diff_velocity) << ',' << fmt(r.diff_theta) << '\n';
    ordered_json res;
    ordered_json orders = ordered_json::array();
    for (const auto& o : t.orders) orders.push_back({{"velocity", o[0]}, {"thetaS", o[1]}});
    res["orders"] = orders;
    write_sidecar(fs::path(dir) / "alpha_limit.json", cfg, res);
}

}  // namespace slice
