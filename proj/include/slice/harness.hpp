#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "slice/diagnostics.hpp"
#include "slice/timestepping.hpp"

namespace slice {

struct GridSpec {
    int nx = 64;
    int nz = 33;
    double L = 1.0e6;
    double H = 1.0e4;

    Grid make() const { return make_grid(nx, nz, L, H); }
    /// (2 nx, 2 (nz - 1) + 1) on the same domain.
    GridSpec refined() const { return {2 * nx, 2 * (nz - 1) + 1, L, H}; }
};

/// theta_S += amplitude * sin(2 pi mode x / L) * sin(pi z / H).
struct PerturbationSpec {
    double amplitude = 0.5;
    int mode = 1;
};

/// Rectangle as fractions of (L, H).
struct LoopSpec {
    double x1 = 0.4;
    double x2 = 0.6;
    double z1 = 0.25;
    double z2 = 0.75;
    int n = 64;
};

struct TracerSpec {
    int nx = 10;
    int nz = 10;
    double margin = 0.2;
};

struct ExperimentConfig {
    ModelKind kind = ModelKind::EadyBoussinesq;
    GridSpec grid;
    ModelParams params;
    /// Background buoyancy frequency squared [1/s^2].
    double N2 = 2.5e-5;
    /// Surface Exner value for the compressible reference column.
    double Pi_surface = 1.0;
    PerturbationSpec perturbation;
    IntegratorConfig integrator;
    std::vector<LoopSpec> loops{LoopSpec{}};
    TracerSpec tracers;
    std::string output_dir = "out";
    std::uint64_t seed = 0;
    bool write_snapshots = true;

    ExperimentConfig();
    void validate() const;
};

/// u = -(g s/(f theta0)) (z - H/2) - frame_u, theta_S = (theta0 N2/g)(z - H/2).
SliceState boussinesq_balanced_state(const Grid& grid, const ModelParams& params, double N2);

/// Hydrostatic column for theta(z): dPi/dz = -g/(cp theta) integrated with
/// RK4 from Pi(0) = Pi_surface, D from the ideal gas law, u = (s/f) cp Pi -
/// frame_u.
SliceState scm_hydrostatic_state(const Grid& grid, const ModelParams& params,
                                 const std::function<double(double)>& theta_profile, double Pi_surface = 1.0);

/// theta0 (1 + N2 (z - H/2) / g).
std::function<double(double)> stratified_theta(const ModelParams& params, double N2, double H);

SliceState add_perturbation(const SliceState& state, double amplitude, int mode);

/// Balanced state of the configured kind plus the perturbation.
SliceState initial_state(const ExperimentConfig& cfg);

/// Exner value at mid-depth of the reference column; the SCM balanced flow has
/// the uniform part (s/f) cp Pi_ref.
double reference_exner_mid(const ExperimentConfig& cfg);

struct RunSummary {
    SliceState final_state;
    std::vector<DiagnosticsRecord> records;
    // Drifts are maxima over the diagnostic times t of the deviation from t = 0.
    double energy_drift = 0.0;       ///< |E(t) - E(0)| / |E(0)|
    double circulation_drift = 0.0;  ///< |C(t) - C(0)| over loops / circulation scale
    double circulation_scale = 0.0;
    double pv_error = 0.0;           ///< |q(t) - q(0)| over tracers / max |q(0)|
    std::optional<double> mass_drift;
    /// Cullen only: max |dq - integral of production| / max |integral of production|.
    std::optional<double> pv_budget_error;
    /// Cullen only: max over loops |dC - integral of dC/dt| / max |integral of dC/dt|.
    std::optional<double> circulation_budget_error;
    double grad_theta_initial = 0.0;
    double grad_theta_final = 0.0;
    double dt = 0.0;
    long steps = 0;
};

/// Integrates cfg from initial_state with loops and tracers. When write_files
/// is set, diagnostics.csv, tracers.csv, provenance.json and (optionally)
/// snapshots go to cfg.output_dir.
RunSummary run_tracked(const ExperimentConfig& cfg, bool write_files);

/// run_tracked with files.
RunSummary run_frontogenesis(const ExperimentConfig& cfg);

struct LowMachRow {
    double epsilon = 0.0;
    double diff_u = 0.0;
    double diff_uT = 0.0;
    double diff_theta = 0.0;
};

struct LowMachTable {
    std::vector<LowMachRow> rows;
    /// log(d_i / d_{i+1}) / log(eps_i / eps_{i+1}) per field, per pair.
    std::vector<std::array<double, 3>> orders;
    bool monotone = false;
};

/// SCM with theta0, s and the perturbation scaled by 1/eps^2 (g theta'/theta0,
/// N2, shear and f fixed), run in the frame moving with the uniform part of
/// its balanced flow, against one Eady run from the matched initial data. The
/// SCM perturbation is applied at fixed pressure. The compared theta is
/// eps^2 (theta_SCM - theta0/eps^2).
LowMachTable low_mach_study(const ExperimentConfig& cfg, const std::vector<double>& epsilons);

struct AlphaRow {
    double alpha = 0.0;
    double diff_velocity = 0.0;  ///< L2 of (u, w, uT) difference
    double diff_theta = 0.0;
};

struct AlphaTable {
    std::vector<AlphaRow> rows;
    std::vector<std::array<double, 2>> orders;
};

/// Alpha-model runs against the Eady run from the same state with the same
/// fixed step.
AlphaTable alpha_limit_study(const ExperimentConfig& cfg, const std::vector<double>& alphas);

struct ConvergenceRow {
    GridSpec grid;
    double dt = 0.0;
    RunSummary summary;
};

struct ConvergenceTable {
    ModelKind kind = ModelKind::EadyBoussinesq;
    std::vector<ConvergenceRow> rows;
    /// Observed orders between successive levels; nullopt means both drifts are
    /// at rounding level ("exact").
    std::vector<std::optional<double>> energy_order, circulation_order, pv_order, mass_order;
};

/// log2 ratio of successive values, nullopt when both are below floor
/// (relative drifts at rounding level).
std::optional<double> observed_order(double coarse, double fine, double floor = 1e-10);

/// Runs cfg at each grid with dt proportional to dx: dt_l = dt_0 dx_l / dx_0,
/// where dt_0 is cfg.integrator.dt or the CFL step of the first level.
/// Levels run concurrently.
ConvergenceTable convergence_study(const ExperimentConfig& cfg, const std::vector<GridSpec>& levels);

/// CSV plus a JSON sidecar (<stem>.json) with the config and observed orders.
void write_convergence(const std::string& dir, const ConvergenceTable& table, const ExperimentConfig& cfg);
void write_low_mach(const std::string& dir, const LowMachTable& table, const ExperimentConfig& cfg);
void write_alpha(const std::string& dir, const AlphaTable& table, const ExperimentConfig& cfg);

}  // namespace slice
