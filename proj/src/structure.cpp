#include "slice/structure.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "json.hpp"
#include "slice/error.hpp"

namespace slice {

AlgebraElement lie_bracket(const AlgebraElement& a, const AlgebraElement& b) {
    return {advect(a.xS_x, a.xS_z, b.xS_x) - advect(b.xS_x, b.xS_z, a.xS_x),
            advect(a.xS_x, a.xS_z, b.xS_z) - advect(b.xS_x, b.xS_z, a.xS_z),
            advect(a.xS_x, a.xS_z, b.xT) - advect(b.xS_x, b.xS_z, a.xT)};
}

MomentumElement ad_star(const AlgebraElement& a, const MomentumElement& m) {
    const ScalarField& u = a.xS_x;
    const ScalarField& w = a.xS_z;
    ScalarField ux = ddx(u), uz = ddz(u), wx = ddx(w), wz = ddz(w);
    return {ddx(u * m.mS_x) + ddz(w * m.mS_x) + (ux * m.mS_x + wx * m.mS_z) + m.mT * ddx(a.xT),
            ddx(u * m.mS_z) + ddz(w * m.mS_z) + (uz * m.mS_x + wz * m.mS_z) + m.mT * ddz(a.xT),
            ddx(u * m.mT) + ddz(w * m.mT)};
}

MomentumElement diamond_theta(const ScalarField& b, const ScalarField& theta, double s) {
    return {-1.0 * b * ddx(theta), -1.0 * b * ddz(theta), -s * b};
}

std::pair<ScalarField, ScalarField> diamond_density(const ScalarField& b, const ScalarField& D) {
    return {D * ddx(b), D * ddz(b)};
}

double pairing(const MomentumElement& m, const AlgebraElement& a) {
    return inner(m.mS_x, a.xS_x) + inner(m.mS_z, a.xS_z) + inner(m.mT, a.xT);
}

Tendencies ep_tendencies_from_algebra(const VariationalDerivatives& vd, const SliceState& state,
                                      const ModelParams& params, ModelKind kind, const EllipticSolver* solver) {
    if (kind == ModelKind::Cullen2008)
        throw Error(ErrorKind::NotVariational, "the Cullen (2008) model has no slice Lagrangian");
    const Grid& g = state.grid();
    const ScalarField D = state.D ? *state.D : ScalarField(g, 1.0);
    AlgebraElement a{state.u, state.w, state.uT};
    MomentumElement m{D * vd.vS_x, D * vd.vS_z, D * vd.vT};
    MomentumElement ad = ad_star(a, m);
    auto [dx, dz] = diamond_density(vd.pi, D);
    MomentumElement th = diamond_theta(D * vd.gammaS, state.thetaS, params.s);
    ScalarField dm_x = -1.0 * ad.mS_x + dx + th.mS_x + vd.f * D * state.uT;
    ScalarField dm_z = -1.0 * ad.mS_z + dz + th.mS_z;
    ScalarField dm_T = -1.0 * ad.mT + th.mT - vd.f * D * state.u;
    return momentum_to_velocity_tendencies(kind, dm_x, dm_z, dm_T, vd, state, params, solver);
}

bool StructureReport::pass() const {
    for (const StructureCheck& c : checks)
        if (!c.pass) return false;
    return !checks.empty();
}

std::string StructureReport::to_json() const {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const StructureCheck& c : checks) {
        nlohmann::ordered_json e;
        e["residual_coarse"] = c.residual_coarse;
        e["residual_fine"] = c.residual_fine;
        if (std::isfinite(c.ratio))
            e["ratio"] = c.ratio;
        else
            e["ratio"] = nullptr;
        e["pass"] = c.pass;
        j[c.name] = e;
    }
    return j.dump(2);
}

ScalarField windowed_random_field(const Grid& grid, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    // portable uniform in [-1, 1)
    auto uni = [&] { return 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0; };
    constexpr int K = 3;
    double amp[K + 1][K + 1], phase[K + 1][K + 1];
    for (int kx = 0; kx <= K; ++kx)
        for (int mz = 0; mz <= K; ++mz) {
            amp[kx][mz] = uni() / (1.0 + kx + mz);
            phase[kx][mz] = std::numbers::pi * uni();
        }
    const double two_pi = 2.0 * std::numbers::pi;
    return ScalarField::from_function(grid, [&](double x, double z) {
        double v = 0.0;
        for (int kx = 0; kx <= K; ++kx)
            for (int mz = 0; mz <= K; ++mz)
                v += amp[kx][mz] * std::cos(two_pi * kx * x / grid.L + phase[kx][mz]) *
                     std::cos(std::numbers::pi * mz * z / grid.H);
        const double sw = std::sin(std::numbers::pi * z / grid.H);
        return v * sw * sw * sw * sw;
    });
}

namespace {

struct Sample {
    AlgebraElement a, b;
    MomentumElement m;
    ScalarField beta, theta, D;
    SliceState eady;
};

Sample make_sample(const Grid& g, std::uint64_t seed) {
    std::uint64_t s = seed * 1000;
    auto next = [&] { return windowed_random_field(g, ++s); };
    Sample out{{next(), next(), next()}, {next(), next(), next()}, {next(), next(), next()},
               next(), next(), next(), SliceState::zeros(g, false)};
    out.D = out.D + ScalarField(g, 2.0);
    // divergence-free Eady velocity from a windowed streamfunction
    ScalarField psi = next();
    out.eady.u = ddz(psi);
    out.eady.w = -1.0 * ddx(psi);
    zero_walls(out.eady.w);
    ProjectionResult pr = project_divergence_free(out.eady.u, out.eady.w);
    out.eady.u = pr.u;
    out.eady.w = pr.w;
    out.eady.uT = next();
    out.eady.thetaS = next();
    return out;
}

double rel_residual(double lhs, double rhs, double scale) { return std::abs(lhs - rhs) / std::max(scale, 1e-300); }

double tendency_gap(const Tendencies& a, const Tendencies& b) {
    auto r = [](const ScalarField& x, const ScalarField& y) {
        return (x - y).max_abs() / std::max(y.max_abs(), 1e-300);
    };
    return std::max({r(a.du, b.du), r(a.dw, b.dw), r(a.duT, b.duT), r(a.dthetaS, b.dthetaS)});
}

// One resolution's residuals, in check order.
std::vector<double> residuals(const Grid& g, std::uint64_t seed) {
    Sample S = make_sample(g, seed);
    std::vector<double> r;

    AlgebraElement ab = lie_bracket(S.a, S.b), ba = lie_bracket(S.b, S.a), aa = lie_bracket(S.a, S.a);
    const double anti = std::max({(ab.xS_x + ba.xS_x).max_abs(), (ab.xS_z + ba.xS_z).max_abs(),
                                  (ab.xT + ba.xT).max_abs(), aa.xS_x.max_abs(), aa.xS_z.max_abs(), aa.xT.max_abs()});
    r.push_back(anti / std::max({ab.xS_x.max_abs(), ab.xS_z.max_abs(), ab.xT.max_abs(), 1e-300}));

    // <ad*_a m, b> = -<m, [a, b]> with [a, b] = a.grad b - b.grad a
    MomentumElement adm = ad_star(S.a, S.m);
    const double l1 = pairing(adm, S.b), r1 = -pairing(S.m, ab);
    const double n_ad = std::abs(pairing(MomentumElement{adm.mS_x * adm.mS_x, adm.mS_z * adm.mS_z, adm.mT * adm.mT},
                                         AlgebraElement{S.b.xS_x * S.b.xS_x, S.b.xS_z * S.b.xS_z, S.b.xT * S.b.xT}));
    r.push_back(rel_residual(l1, r1, std::sqrt(n_ad) + std::abs(r1)));

    MomentumElement dt = diamond_theta(S.beta, S.theta, 0.7);
    const double l2 = pairing(dt, S.b);
    const double r2 = inner(S.beta, -1.0 * advect(S.b.xS_x, S.b.xS_z, S.theta) - 0.7 * S.b.xT);
    r.push_back(rel_residual(l2, r2, std::abs(l2) + std::abs(r2)));

    auto [ddx_, ddz_] = diamond_density(S.beta, S.D);
    const double l3 = inner(ddx_, S.b.xS_x) + inner(ddz_, S.b.xS_z);
    const double r3 = -inner(S.beta, divergence(S.b.xS_x * S.D, S.b.xS_z * S.D));
    r.push_back(rel_residual(l3, r3, l2_norm(ddx_) * l2_norm(S.b.xS_x) + l2_norm(ddz_) * l2_norm(S.b.xS_z)));

    ModelParams p;
    p.f = 1.0;
    p.g = 1.0;
    p.theta0 = 1.0;
    p.s = 0.7;
    EllipticSolver solver(g, 0.0);
    VariationalDerivatives vd = variational_derivatives(ModelKind::EadyBoussinesq, S.eady, p, &solver);
    Tendencies generic = ep_tendencies_generic(vd, S.eady, p, ModelKind::EadyBoussinesq, &solver);
    Tendencies algebra = ep_tendencies_from_algebra(vd, S.eady, p, ModelKind::EadyBoussinesq, &solver);
    Tendencies direct = eady_tendencies(S.eady, p, solver);
    r.push_back(tendency_gap(generic, algebra));
    r.push_back(tendency_gap(generic, direct));
    return r;
}

}  // namespace

StructureReport verify_structure(const Grid& coarse, std::uint64_t seed) {
    const Grid fine = make_grid(2 * coarse.nx, 2 * (coarse.nz - 1) + 1, coarse.L, coarse.H);
    const std::vector<double> rc = residuals(coarse, seed), rf = residuals(fine, seed);
    const char* names[] = {"lie_bracket_antisymmetry", "ad_star_duality", "diamond_theta_duality",
                           "diamond_density_duality", "eady_generic_vs_algebra_assembly",
                           "eady_generic_vs_direct"};
    StructureReport rep;
    for (std::size_t j = 0; j < rc.size(); ++j) {
        StructureCheck c;
        c.name = names[j];
        c.residual_coarse = rc[j];
        c.residual_fine = rf[j];
        c.ratio = rf[j] > 0.0 ? rc[j] / rf[j] : std::numeric_limits<double>::infinity();
        c.pass = (rc[j] <= kRoundingLevel && rf[j] <= kRoundingLevel) || c.ratio >= kMinRatio;
        rep.checks.push_back(c);
    }
    return rep;
}

}  // namespace slice
