#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "slice/grid.hpp"

namespace slice {

enum class ModelKind { EadyBoussinesq, AlphaEady, SCM, Cullen2008 };

std::string_view to_string(ModelKind kind);
ModelKind model_kind_from_string(std::string_view name);

inline bool is_compressible(ModelKind kind) {
    return kind == ModelKind::SCM || kind == ModelKind::Cullen2008;
}

/// Physical constants. R is derived as cp - cv.
struct ModelParams {
    double f = 1.0e-4;
    double g = 9.81;
    double theta0 = 300.0;
    double s = -3.0e-6;
    double cp = 1004.0;
    double cv = 717.0;
    double p0 = 1.0e5;
    double alpha = 0.0;
    /// x-velocity of the frame the equations are written in; u is relative to
    /// it and the transverse equation gains -f*frame_u.
    double frame_u = 0.0;
    /// Reference Exner lapse for the Cullen model; when unset, -g/(cp*theta0).
    std::optional<double> Pi0_lapse;

    double R() const { return cp - cv; }
    double Pi0_lapse_or_default() const { return Pi0_lapse ? *Pi0_lapse : -g / (cp * theta0); }

    /// Throws InvalidArgument when a physical invariant is violated.
    void validate() const;
};

/// Prognostic fields. D is absent for the incompressible models.
struct SliceState {
    ScalarField u;
    ScalarField w;
    ScalarField uT;
    ScalarField thetaS;
    std::optional<ScalarField> D;
    double time = 0.0;

    const Grid& grid() const { return u.grid(); }

    /// Zero state on a grid; D = 1 when compressible.
    static SliceState zeros(const Grid& grid, bool compressible);

    bool all_finite() const;
    void enforce_walls();
};

/// Throws KindStateMismatch when the state does not fit the model kind.
void check_state_for_kind(ModelKind kind, const SliceState& state);

}  // namespace slice

namespace slice {

/// Writes one snapshot file per prognostic field (u, w, uT, thetaS and D when
/// present) into dir, named <prefix><field>.bin.
void write_state_snapshot(const std::string& dir, const SliceState& state, const std::string& prefix = "");

/// Reads a state written by write_state_snapshot. D is read when its file exists.
SliceState read_state_snapshot(const std::string& dir, const std::string& prefix = "");

}  // namespace slice
