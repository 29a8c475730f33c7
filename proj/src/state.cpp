#include "slice/state.hpp"

#include <cmath>
#include <filesystem>

#include "slice/error.hpp"

namespace slice {

std::string_view to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::EadyBoussinesq: return "eady";
        case ModelKind::AlphaEady: return "alpha";
        case ModelKind::SCM: return "scm";
        case ModelKind::Cullen2008: return "cullen";
    }
    return "unknown";
}

ModelKind model_kind_from_string(std::string_view name) {
    if (name == "eady") return ModelKind::EadyBoussinesq;
    if (name == "alpha") return ModelKind::AlphaEady;
    if (name == "scm") return ModelKind::SCM;
    if (name == "cullen") return ModelKind::Cullen2008;
    throw Error(ErrorKind::Config, "unknown model kind '" + std::string(name) +
                                       "' (expected eady, alpha, scm or cullen)");
}

void ModelParams::validate() const {
    auto fail = [](const std::string& msg) { throw Error(ErrorKind::InvalidArgument, msg); };
    if (f == 0.0) fail("f must be nonzero");
    if (!(g > 0.0)) fail("g must be positive");
    if (!(theta0 > 0.0)) fail("theta0 must be positive");
    if (!(cv > 0.0) || !(cp > cv)) fail("need cp > cv > 0");
    if (!(p0 > 0.0)) fail("p0 must be positive");
    if (!(alpha >= 0.0)) fail("alpha must be nonnegative");
}

SliceState SliceState::zeros(const Grid& grid, bool compressible) {
    SliceState s{ScalarField(grid), ScalarField(grid), ScalarField(grid), ScalarField(grid), std::nullopt, 0.0};
    if (compressible) s.D = ScalarField(grid, 1.0);
    return s;
}

bool SliceState::all_finite() const {
    return u.all_finite() && w.all_finite() && uT.all_finite() && thetaS.all_finite() &&
           (!D || D->all_finite()) && std::isfinite(time);
}

void SliceState::enforce_walls() {
    const Grid& g = grid();
    for (int i = 0; i < g.nx; ++i) {
        w(i, 0) = 0.0;
        w(i, g.nz - 1) = 0.0;
    }
}

void check_state_for_kind(ModelKind kind, const SliceState& state) {
    if (is_compressible(kind)) {
        if (!state.D) throw Error(ErrorKind::KindStateMismatch, "compressible model needs a density field");
        for (double d : state.D->values())
            if (!(d > 0.0)) throw Error(ErrorKind::NonpositiveDensity, "density must be positive");
    } else if (state.D) {
        for (double d : state.D->values())
            if (d != 1.0)
                throw Error(ErrorKind::KindStateMismatch, "incompressible model requires D == 1");
    }
}

namespace {

std::string field_path(const std::string& dir, const std::string& prefix, const char* name) {
    return (std::filesystem::path(dir) / (prefix + name + ".bin")).string();
}

}  // namespace

void write_state_snapshot(const std::string& dir, const SliceState& state, const std::string& prefix) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create " + dir + ": " + ec.message());
    write_snapshot(field_path(dir, prefix, "u"), state.u, "u", state.time);
    write_snapshot(field_path(dir, prefix, "w"), state.w, "w", state.time);
    write_snapshot(field_path(dir, prefix, "uT"), state.uT, "uT", state.time);
    write_snapshot(field_path(dir, prefix, "thetaS"), state.thetaS, "thetaS", state.time);
    if (state.D) write_snapshot(field_path(dir, prefix, "D"), *state.D, "D", state.time);
}

SliceState read_state_snapshot(const std::string& dir, const std::string& prefix) {
    Snapshot u = read_snapshot(field_path(dir, prefix, "u"));
    Snapshot w = read_snapshot(field_path(dir, prefix, "w"));
    Snapshot uT = read_snapshot(field_path(dir, prefix, "uT"));
    Snapshot th = read_snapshot(field_path(dir, prefix, "thetaS"));
    for (const Snapshot* s : {&w, &uT, &th})
        if (!(s->field.grid() == u.field.grid()) || s->time != u.time)
            throw Error(ErrorKind::Io, "inconsistent snapshot set in " + dir);
    SliceState st{std::move(u.field), std::move(w.field), std::move(uT.field), std::move(th.field), std::nullopt,
                  u.time};
    const std::string dpath = field_path(dir, prefix, "D");
    if (std::filesystem::exists(dpath)) {
        Snapshot d = read_snapshot(dpath);
        if (!(d.field.grid() == st.grid()) || d.time != st.time)
            throw Error(ErrorKind::Io, "inconsistent snapshot set in " + dir);
        st.D = std::move(d.field);
    }
    return st;
}

}  // namespace slice
