#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "slice/models.hpp"

namespace slice {

enum class Scheme { RK4, SSPRK3 };

std::string_view to_string(Scheme scheme);
Scheme scheme_from_string(std::string_view name);

struct IntegratorConfig {
    Scheme scheme = Scheme::RK4;
    /// Fixed step; when unset the step comes from cfl_dt at the start of
    /// every diagnostic interval.
    std::optional<double> dt;
    double courant = 0.5;
    double t_end = 0.0;
    /// Diagnostics cadence; <= 0 means only at the start and end.
    double diag_interval = 0.0;
    /// Upper bound for CFL-derived steps.
    double dt_max = 300.0;
    EllipticSolverConfig solver;

    void validate() const;
};

/// A marker or tracer particle position. x is unwrapped (not reduced mod L).
struct Point {
    double x = 0.0;
    double z = 0.0;
};

/// Slice velocity (u, w) at p by bilinear interpolation. Throws MarkerEscape
/// when p lies outside the channel beyond a small tolerance.
Point velocity_at(const SliceState& state, const Point& p);

/// Clamps z into [0, H] after checking the escape tolerance.
void clamp_to_channel(const Grid& grid, std::vector<Point>& points);

/// Holds the per-grid solver so repeated steps factorise once.
class Stepper {
public:
    Stepper(ModelKind kind, const ModelParams& params, const Grid& grid, EllipticSolverConfig solver_cfg = {},
            Scheme scheme = Scheme::RK4);

    /// One step. Markers, when given, are advanced with the same stages
    /// using the stage velocities.
    SliceState step(const SliceState& state, double dt, std::vector<Point>* markers = nullptr) const;

    Tendencies tendencies(const SliceState& state) const;

    ModelKind kind() const { return kind_; }
    const ModelParams& params() const { return params_; }
    const EllipticSolver* solver() const { return solver_ ? &*solver_ : nullptr; }

private:
    ModelKind kind_;
    ModelParams params_;
    Scheme scheme_;
    std::optional<EllipticSolver> solver_;
};

SliceState step(ModelKind kind, const SliceState& state, const ModelParams& params, double dt,
                const IntegratorConfig& cfg = {});

/// courant * min(dx, dz) / c_max, with the sound speed included when the
/// state carries D, a buoyancy-frequency cap courant / N otherwise, and
/// dt_max when no scale limits the step.
double cfl_dt(const SliceState& state, const ModelParams& params, double courant, double dt_max = 300.0);

using DiagnosticCallback = std::function<void(const SliceState&, std::span<const Point>)>;

/// Steps from state0.time to cfg.t_end, calling on_diagnostic at the start,
/// every diag_interval, and at t_end. Each interval is covered by equal steps
/// so interval boundaries are hit exactly; this makes a run restarted from
/// an interval-boundary snapshot reproduce the unsplit run bit for bit.
SliceState integrate(ModelKind kind, const SliceState& state0, const ModelParams& params,
                     const IntegratorConfig& cfg, const DiagnosticCallback& on_diagnostic = {},
                     std::vector<Point>* markers = nullptr);

}  // namespace slice
