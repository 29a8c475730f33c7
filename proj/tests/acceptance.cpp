// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "slice/diagnostics.hpp"
#include "slice/error.hpp"
#include "slice/harness.hpp"
#include "slice/operators.hpp"
#include "slice/structure.hpp"

using namespace slice;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kFixedPointTol = 1e-10;
constexpr double kFixedPointSeconds = 10.0;
// Observed orders of a second-order scheme approach 2 from either side
// depending on the sign of the next error term.
constexpr double kMinOrder = 2.0 - 0.05;
constexpr double kCirculationFinest = 1e-4;
constexpr double kEnergyStudySeconds = 600.0;
constexpr double kCullenBudgetTol = 0.20;
constexpr double kAlphaMinOrder = 1.5;
constexpr double kProjectionFactor = 10.0;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

/// Order fitted across three levels with refinement ratio 2: log2(e0 / e2) / 2.
double fit_order(double e0, double e2) { return std::log2(e0 / e2) / 2.0; }

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
    if (!pass) ++failures;
    std::printf("%s  %2d  %-28s %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
    std::fflush(stdout);
}

void guarded(const std::vector<std::pair<int, std::string>>& ids, const std::function<void()>& body) {
    try {
        body();
    } catch (const std::exception& e) {
        for (const auto& [id, name] : ids) report(id, name, false, std::string("threw ") + e.what());
    }
}

std::vector<GridSpec> three_levels(const GridSpec& g) { return {g, g.refined(), g.refined().refined()}; }

ExperimentConfig eady_study_config() {
    ExperimentConfig c;
    c.grid = {32, 17, 1.0e6, 1.0e4};
    c.perturbation.amplitude = 0.1;
    c.integrator.dt = 60.0;
    c.integrator.t_end = 12 * 3600.0;
    c.integrator.diag_interval = 3600.0;
    return c;
}

ExperimentConfig alpha_study_config() {
    ExperimentConfig c = eady_study_config();
    c.kind = ModelKind::AlphaEady;
    c.params.alpha = 5000.0;
    // without the transverse gradient: the natural wall condition of the
    // Helmholtz inversion is incompatible with a uniform thermal-wind shear
    c.params.s = 0.0;
    return c;
}

ExperimentConfig scm_study_config() {
    ExperimentConfig c;
    c.kind = ModelKind::SCM;
    c.grid = {32, 17, 1.0e6, 1.0e4};
    c.perturbation.amplitude = 0.1;
    c.integrator.t_end = 1800.0;
    c.integrator.diag_interval = 300.0;
    return c;
}

struct Drifts {
    std::vector<double> energy, circulation, pv;
};

Drifts drifts(const ConvergenceTable& t) {
    Drifts d;
    for (const ConvergenceRow& r : t.rows) {
        d.energy.push_back(r.summary.energy_drift);
        d.circulation.push_back(r.summary.circulation_drift);
        d.pv.push_back(r.summary.pv_error);
    }
    return d;
}

std::string series(const std::vector<double>& v) {
    std::string s;
    for (double x : v) s += fmt("%s%.3e", s.empty() ? "" : " ", x);
    return s;
}

bool decreasing(const std::vector<double>& v) {
    for (std::size_t j = 1; j < v.size(); ++j)
        if (!(v[j] < v[j - 1])) return false;
    return true;
}

// 1
void balanced_fixed_point() {
    const auto t0 = Clock::now();
    const ExperimentConfig c;
    const Grid g = make_grid(64, 33, 1.0e6, 1.0e4);
    const SliceState s0 = boussinesq_balanced_state(g, c.params, c.N2);
    Stepper stepper(ModelKind::EadyBoussinesq, c.params, g);
    SliceState s = s0;
    for (int n = 0; n < 100; ++n) s = stepper.step(s, 300.0);
    const double U = s0.u.max_abs();
    auto rel = [&](const ScalarField& a, const ScalarField& b) {
        return (a - b).max_abs() / std::max(b.max_abs(), U);
    };
    const double worst = std::max({rel(s.u, s0.u), rel(s.w, s0.w), rel(s.uT, s0.uT), rel(s.thetaS, s0.thetaS)});
    const double secs = seconds_since(t0);
    report(1, "balanced fixed point", worst <= kFixedPointTol && secs < kFixedPointSeconds,
           fmt("max rel change %.2e <= %.0e, %.2f s < %.0f s", worst, kFixedPointTol, secs, kFixedPointSeconds));
}

// 2, 3, 4
void conservation() {
    const auto t0 = Clock::now();
    const ExperimentConfig ce = eady_study_config(), ca = alpha_study_config(), cs = scm_study_config();
    const Drifts e = drifts(convergence_study(ce, three_levels(ce.grid)));
    const Drifts a = drifts(convergence_study(ca, three_levels(ca.grid)));
    const Drifts s = drifts(convergence_study(cs, three_levels(cs.grid)));
    const double secs = seconds_since(t0);

    const double oe = fit_order(e.energy[0], e.energy[2]);
    const double oa = fit_order(a.energy[0], a.energy[2]);
    const double os = fit_order(s.energy[0], s.energy[2]);
    report(2, "energy conservation",
           decreasing(e.energy) && decreasing(a.energy) && decreasing(s.energy) && oe >= kMinOrder &&
               oa >= kMinOrder && os >= kMinOrder && secs < kEnergyStudySeconds,
           fmt("orders eady %.2f alpha %.2f scm %.2f (>= %.2f); eady [%s] alpha [%s] scm [%s]; %.0f s < %.0f s", oe, oa,
               os, kMinOrder, series(e.energy).c_str(), series(a.energy).c_str(), series(s.energy).c_str(), secs,
               kEnergyStudySeconds));

    const double oc = fit_order(e.circulation[0], e.circulation[2]);
    report(3, "circulation conservation",
           decreasing(e.circulation) && oc >= kMinOrder && e.circulation[2] <= kCirculationFinest,
           fmt("eady order %.2f (>= %.2f), finest %.2e <= %.0e; [%s]", oc, kMinOrder, e.circulation[2],
               kCirculationFinest, series(e.circulation).c_str()));

    const double qe = fit_order(e.pv[0], e.pv[2]);
    const double qa = fit_order(a.pv[0], a.pv[2]);
    const double qs = fit_order(s.pv[0], s.pv[2]);
    report(4, "material pv conservation",
           decreasing(e.pv) && decreasing(a.pv) && decreasing(s.pv) && qe >= kMinOrder && qa >= kMinOrder &&
               qs >= kMinOrder,
           fmt("orders eady %.2f alpha %.2f scm %.2f (>= %.2f); eady [%s] alpha [%s] scm [%s]", qe, qa, qs, kMinOrder,
               series(e.pv).c_str(), series(a.pv).c_str(), series(s.pv).c_str()));
}

// 5
void cullen_twin() {
    ExperimentConfig c = scm_study_config();
    c.integrator.t_end = 600.0;
    c.integrator.diag_interval = 10.0;
    const ConvergenceTable scm = convergence_study(c, three_levels(c.grid));
    c.kind = ModelKind::Cullen2008;
    const ConvergenceTable cul = convergence_study(c, three_levels(c.grid));
    std::vector<double> q, budget;
    for (const auto& r : scm.rows) q.push_back(r.summary.pv_error);
    for (const auto& r : cul.rows) budget.push_back(r.summary.pv_budget_error.value_or(INFINITY));
    const double oq = fit_order(q[0], q[2]);
    report(5, "cullen pv production",
           decreasing(q) && oq > 0.0 && budget[1] <= kCullenBudgetTol && decreasing(budget),
           fmt("scm pv drift [%s] order %.2f; cullen budget error [%s], 64x33 %.3f <= %.2f", series(q).c_str(), oq,
               series(budget).c_str(), budget[1], kCullenBudgetTol));
}

// 6
void low_mach() {
    ExperimentConfig c;
    c.grid = {32, 17, 1.0e6, 1.0e4};
    c.integrator.t_end = 3600.0;
    c.integrator.diag_interval = 0.0;
    const LowMachTable t = low_mach_study(c, {1.0, 0.5, 0.25});
    std::string rows;
    for (const LowMachRow& r : t.rows)
        rows += fmt("%seps %.2f: %.3e %.3e %.3e", rows.empty() ? "" : "; ", r.epsilon, r.diff_u, r.diff_uT, r.diff_theta);
    report(6, "low-mach limit", t.monotone, "strictly decreasing u, uT, thetaS; " + rows);
}

// 7
void alpha_limit() {
    ExperimentConfig c;
    c.grid = {128, 65, 1.0e4, 1.0e4};
    c.params.s = 0.0;
    c.perturbation.amplitude = 0.1;
    c.integrator.t_end = 3600.0;
    c.integrator.diag_interval = 0.0;
    const double dx = c.grid.L / c.grid.nx;
    const AlphaTable t = alpha_limit_study(c, {2 * dx, dx, dx / 2});
    const double ov = fit_order(t.rows[0].diff_velocity, t.rows[2].diff_velocity);
    const double ot = fit_order(t.rows[0].diff_theta, t.rows[2].diff_theta);
    report(7, "alpha -> 0 recovery", ov >= kAlphaMinOrder && ot >= kAlphaMinOrder,
           fmt("orders velocity %.2f thetaS %.2f (>= %.2f); velocity [%.3e %.3e %.3e]", ov, ot, kAlphaMinOrder,
               t.rows[0].diff_velocity, t.rows[1].diff_velocity, t.rows[2].diff_velocity));
}

// 8
void structure() {
    const StructureReport r = verify_structure(make_grid(32, 17, 1.0e6, 1.0e4), 0);
    std::string failed;
    for (const StructureCheck& k : r.checks)
        if (!k.pass) failed += " " + k.name;
    report(8, "structure checks", r.pass(),
           fmt("%zu checks on 32x17 / 64x33, rounding %.0e or ratio >= %.1f%s", r.checks.size(), kRoundingLevel,
               kMinRatio, failed.empty() ? "" : ("; failed:" + failed).c_str()));
}

// 9
void solvers() {
    constexpr double pi = std::numbers::pi;
    EllipticSolverConfig cfg;
    const double alpha = 0.1;
    double ep[3], eh[3];
    for (int j = 0; j < 3; ++j) {
        const int n = 16 << j;
        const Grid g = make_grid(n, n / 2 + 1, 1.0, 0.5);
        const double kx = 2 * pi / g.L, mz = pi / g.H;
        const auto exact = ScalarField::from_function(
            g, [&](double x, double z) { return std::cos(kx * x + 0.4) * std::cos(mz * z); });
        ep[j] = (poisson_solve(-(kx * kx + mz * mz) * exact, cfg) - exact).max_abs();
        eh[j] = (helmholtz_solve(alpha, (1 + alpha * alpha * (kx * kx + mz * mz)) * exact, cfg) - exact).max_abs();
    }
    const double op = fit_order(ep[0], ep[2]), oh = fit_order(eh[0], eh[2]);

    const Grid g = make_grid(32, 17, 1.0, 1.0);
    const auto phi = ScalarField::from_function(
        g, [&](double x, double z) { return std::sin(2 * pi * x) * std::cos(pi * z) + 0.3 * std::cos(4 * pi * x); });
    ScalarField gx = ddx(phi), gz = ddz(phi);
    zero_walls(gz);
    const ProjectionResult r = project_divergence_free(gx, gz, cfg);
    const double left = std::max(r.u.max_abs(), r.w.max_abs()) / std::max(gx.max_abs(), gz.max_abs());
    report(9, "solver correctness",
           op >= kMinOrder && oh >= kMinOrder && left <= kProjectionFactor * cfg.tol,
           fmt("poisson order %.2f, helmholtz order %.2f (>= %.2f); projected gradient %.2e <= %.0e", op, oh,
               kMinOrder, left, kProjectionFactor * cfg.tol));
}

// 10
std::map<std::string, std::string> read_tree(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        std::ifstream in(e.path(), std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        out[fs::relative(e.path(), dir).string()] = ss.str();
    }
    return out;
}

void determinism() {
    const fs::path dir = fs::temp_directory_path() / "slicelab_acceptance_rerun";
    bool identical = true, restart = true;
    std::size_t files = 0;
    for (ModelKind kind : {ModelKind::EadyBoussinesq, ModelKind::SCM}) {
        ExperimentConfig c;
        c.kind = kind;
        c.grid = {32, 17, 1.0e6, 1.0e4};
        c.integrator.t_end = kind == ModelKind::SCM ? 600.0 : 6 * 3600.0;
        c.integrator.diag_interval = c.integrator.t_end / 4;
        c.output_dir = dir.string();
        fs::remove_all(dir);
        run_frontogenesis(c);
        const auto first = read_tree(dir);
        fs::remove_all(dir);
        run_frontogenesis(c);
        identical = identical && first == read_tree(dir);
        files += first.size();

        // restart from the snapshot at the half-way diagnostic time
        const SliceState s0 = initial_state(c);
        const SliceState full = integrate(kind, s0, c.params, c.integrator);
        IntegratorConfig half = c.integrator;
        half.t_end = c.integrator.t_end / 2;
        const fs::path snap = dir / "restart";
        write_state_snapshot(snap.string(), integrate(kind, s0, c.params, half));
        const SliceState rest = integrate(kind, read_state_snapshot(snap.string()), c.params, c.integrator);
        restart = restart && rest.u == full.u && rest.w == full.w && rest.uT == full.uT &&
                  rest.thetaS == full.thetaS && rest.time == full.time && (!full.D || *rest.D == *full.D);
    }
    fs::remove_all(dir);
    report(10, "determinism and restart", identical && restart,
           fmt("%zu output files byte-identical: %s; restart bit-exact (eady, scm): %s", files,
               identical ? "yes" : "no", restart ? "yes" : "no"));
}

}  // namespace

int main() {
    const auto t0 = Clock::now();
    guarded({{1, "balanced fixed point"}}, balanced_fixed_point);
    guarded({{2, "energy conservation"}, {3, "circulation conservation"}, {4, "material pv conservation"}},
            conservation);
    guarded({{5, "cullen pv production"}}, cullen_twin);
    guarded({{6, "low-mach limit"}}, low_mach);
    guarded({{7, "alpha -> 0 recovery"}}, alpha_limit);
    guarded({{8, "structure checks"}}, structure);
    guarded({{9, "solver correctness"}}, solvers);
    guarded({{10, "determinism and restart"}}, determinism);
    std::printf("%d failed, %.0f s\n", failures, seconds_since(t0));
    return failures;
}
