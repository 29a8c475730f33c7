#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "slice/config.hpp"
#include "slice/error.hpp"
#include "slice/harness.hpp"
#include "slice/structure.hpp"

using namespace slice;

namespace {

enum Exit { kOk = 0, kUsage = 1, kNumerical = 2, kAcceptance = 3 };

struct Common {
    std::string config;
    std::string out;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("-c,--config", c.config, "JSON config file (defaults when omitted)")->check(CLI::ExistingFile);
    sub->add_option("-o,--out", c.out, "output directory (overrides output_dir)");
    sub->add_option("-s,--set", c.overrides, "override a.b=value, applied after the file")->allow_extra_args(false);
}

ExperimentConfig load(const Common& c) {
    ExperimentConfig cfg = c.config.empty() ? parse_config_text("{}", c.overrides) : parse_config(c.config, c.overrides);
    if (!c.out.empty()) cfg.output_dir = c.out;
    return cfg;
}

std::vector<GridSpec> levels_from(const GridSpec& g, int n) {
    std::vector<GridSpec> out{g};
    while (static_cast<int>(out.size()) < n) out.push_back(out.back().refined());
    return out;
}

std::string fmt_order(const std::optional<double>& o) {
    if (!o) return "exact";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", *o);
    return buf;
}

int cmd_run(const ExperimentConfig& cfg, const std::string& command) {
    const RunSummary s = run_frontogenesis(cfg);
    write_provenance(cfg.output_dir, cfg, command);
    std::printf("steps %ld  dt %.6g s\n", s.steps, s.dt);
    std::printf("energy drift       %.3e\n", s.energy_drift);
    std::printf("circulation drift  %.3e\n", s.circulation_drift);
    std::printf("tracked pv error   %.3e\n", s.pv_error);
    if (s.mass_drift) std::printf("mass drift         %.3e\n", *s.mass_drift);
    if (s.pv_budget_error) std::printf("pv budget error    %.3e\n", *s.pv_budget_error);
    if (s.circulation_budget_error) std::printf("circ budget error  %.3e\n", *s.circulation_budget_error);
    std::printf("max |grad theta| growth %.4f\n", s.grad_theta_final / s.grad_theta_initial);
    std::printf("output in %s\n", cfg.output_dir.c_str());
    return kOk;
}

int cmd_convergence(const ExperimentConfig& cfg, int n_levels, const std::string& command) {
    const ConvergenceTable t = convergence_study(cfg, levels_from(cfg.grid, n_levels));
    write_convergence(cfg.output_dir, t, cfg);
    write_provenance(cfg.output_dir, cfg, command);
    std::printf("%6s %6s %10s %12s %12s %12s\n", "nx", "nz", "dt", "energy", "circulation", "pv");
    for (const ConvergenceRow& r : t.rows)
        std::printf("%6d %6d %10.4g %12.4e %12.4e %12.4e\n", r.grid.nx, r.grid.nz, r.dt, r.summary.energy_drift,
                    r.summary.circulation_drift, r.summary.pv_error);
    for (std::size_t j = 0; j < t.energy_order.size(); ++j)
        std::printf("order %zu-%zu: energy %s circulation %s pv %s\n", j, j + 1, fmt_order(t.energy_order[j]).c_str(),
                    fmt_order(t.circulation_order[j]).c_str(), fmt_order(t.pv_order[j]).c_str());
    return kOk;
}

int cmd_low_mach(const ExperimentConfig& cfg, const std::vector<double>& eps, const std::string& command) {
    const LowMachTable t = low_mach_study(cfg, eps);
    write_low_mach(cfg.output_dir, t, cfg);
    write_provenance(cfg.output_dir, cfg, command);
    std::printf("%8s %12s %12s %12s\n", "eps", "u", "uT", "thetaS");
    for (const LowMachRow& r : t.rows)
        std::printf("%8.4g %12.4e %12.4e %12.4e\n", r.epsilon, r.diff_u, r.diff_uT, r.diff_theta);
    for (const auto& o : t.orders) std::printf("order in eps: %.2f %.2f %.2f\n", o[0], o[1], o[2]);
    if (!t.monotone) {
        std::fprintf(stderr, "low-Mach differences are not monotone decreasing in eps\n");
        return kAcceptance;
    }
    return kOk;
}

int cmd_alpha(const ExperimentConfig& cfg, std::vector<double> alphas, const std::string& command) {
    if (alphas.empty()) {
        const double dx = cfg.grid.L / cfg.grid.nx;
        alphas = {2 * dx, dx, dx / 2};
    }
    const AlphaTable t = alpha_limit_study(cfg, alphas);
    write_alpha(cfg.output_dir, t, cfg);
    write_provenance(cfg.output_dir, cfg, command);
    std::printf("%12s %12s %12s\n", "alpha", "velocity", "thetaS");
    for (const AlphaRow& r : t.rows) std::printf("%12.4g %12.4e %12.4e\n", r.alpha, r.diff_velocity, r.diff_theta);
    for (const auto& o : t.orders) std::printf("order in alpha: %.2f %.2f\n", o[0], o[1]);
    return kOk;
}

int cmd_verify(const ExperimentConfig& cfg, std::uint64_t seed, const std::string& command) {
    const StructureReport rep = verify_structure(cfg.grid.make(), seed);
    std::filesystem::create_directories(cfg.output_dir);
    const std::filesystem::path path = std::filesystem::path(cfg.output_dir) / "structure.json";
    std::ofstream(path) << rep.to_json() << '\n';
    ExperimentConfig c = cfg;
    c.seed = seed;
    write_provenance(cfg.output_dir, c, command);
    for (const StructureCheck& k : rep.checks)
        std::printf("%-36s %.3e %.3e %s\n", k.name.c_str(), k.residual_coarse, k.residual_fine, k.pass ? "pass" : "FAIL");
    std::printf("%s\n", path.string().c_str());
    return rep.pass() ? kOk : kAcceptance;
}

int cmd_info(const ExperimentConfig& cfg) {
    const ModelParams& p = cfg.params;
    std::cout << config_to_json(cfg) << '\n';
    const double shear = std::abs(p.g * p.s / (p.f * p.theta0));
    const double N = std::sqrt(cfg.N2);
    const double sound = std::sqrt(p.cp / p.cv * p.R() * p.theta0 * cfg.Pi_surface);
    const SliceState s0 = initial_state(cfg);
    std::printf("thermal wind shear     %.4e 1/s (%.3f m/s over the depth)\n", shear, shear * cfg.grid.H);
    std::printf("sound speed (surface)  %.2f m/s\n", sound);
    if (N > 0) {
        std::printf("deformation radius     %.1f km\n", N * cfg.grid.H / std::abs(p.f) / 1e3);
        if (shear > 0) std::printf("Richardson number      %.3g\n", cfg.N2 / (shear * shear));
    }
    std::printf("grid spacing           dx %.1f m  dz %.1f m\n", cfg.grid.L / cfg.grid.nx, cfg.grid.H / (cfg.grid.nz - 1));
    std::printf("CFL dt                 %.4g s\n", cfl_dt(s0, p, cfg.integrator.courant, cfg.integrator.dt_max));
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Vertical slice model lab"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    Common common;
    auto* run = app.add_subcommand("run", "integrate one experiment with diagnostics");
    add_common(run, common);

    auto* conv = app.add_subcommand("convergence", "refinement study of the conservation diagnostics");
    add_common(conv, common);
    int n_levels = 3;
    conv->add_option("--levels", n_levels, "number of refinement levels")->check(CLI::Range(3, 8));

    auto* lm = app.add_subcommand("low-mach", "SCM against Eady-Boussinesq as the Mach number decreases");
    add_common(lm, common);
    std::vector<double> eps{1.0, 0.5, 0.25};
    lm->add_option("--eps", eps, "decreasing Mach scale factors")->delimiter(',');

    auto* al = app.add_subcommand("alpha-limit", "alpha model against Eady as alpha decreases");
    add_common(al, common);
    std::vector<double> alphas;
    al->add_option("--alpha", alphas, "alpha values in m (default 2dx, dx, dx/2)")->delimiter(',');

    auto* vs = app.add_subcommand("verify-structure", "algebraic identities and the Eady dual-path check");
    add_common(vs, common);
    std::uint64_t seed = 0;
    vs->add_option("--seed", seed, "random field seed");

    auto* info = app.add_subcommand("info", "resolved parameters and derived scales");
    add_common(info, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << e.what() << "\n\n" << app.help();
        return kUsage;
    }

    std::string command;
    for (int i = 0; i < argc; ++i) command += (i ? " " : "") + std::string(i ? argv[i] : "slicelab");

    try {
        const ExperimentConfig cfg = load(common);
        if (*run) return cmd_run(cfg, command);
        if (*conv) return cmd_convergence(cfg, n_levels, command);
        if (*lm) return cmd_low_mach(cfg, eps, command);
        if (*al) return cmd_alpha(cfg, alphas, command);
        if (*vs) return cmd_verify(cfg, seed, command);
        return cmd_info(cfg);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return e.is_numerical() ? kNumerical : kUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    }
}
