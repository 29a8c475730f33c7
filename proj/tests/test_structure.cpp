#include <doctest.h>

#include "json.hpp"
#include "slice/error.hpp"
#include "slice/structure.hpp"
#include "test_support.hpp"

using namespace slice;

TEST_CASE("lie bracket is antisymmetric and vanishes on itself") {
    Grid g = make_grid(32, 17, 1.0, 1.0);
    AlgebraElement a{windowed_random_field(g, 1), windowed_random_field(g, 2), windowed_random_field(g, 3)};
    AlgebraElement b{windowed_random_field(g, 4), windowed_random_field(g, 5), windowed_random_field(g, 6)};
    AlgebraElement ab = lie_bracket(a, b), ba = lie_bracket(b, a), aa = lie_bracket(a, a);
    CHECK((ab.xS_x + ba.xS_x).max_abs() == 0.0);
    CHECK((ab.xS_z + ba.xS_z).max_abs() == 0.0);
    CHECK((ab.xT + ba.xT).max_abs() == 0.0);
    CHECK(aa.xT.max_abs() == 0.0);
}

TEST_CASE("diamond_theta pairs pointwise") {
    Grid g = make_grid(16, 9, 2.0, 1.0);
    ScalarField b = windowed_random_field(g, 7);
    ScalarField th = ScalarField::from_function(g, [](double x, double z) { return z + 0.1 * std::sin(x); });
    MomentumElement m = diamond_theta(b, th, 0.5);
    CHECK(m.mT.max_abs() == doctest::Approx(0.5 * b.max_abs()));
    CHECK((m.mS_z + b * ddz(th)).max_abs() == 0.0);
}

TEST_CASE("ad_star of zero momentum is zero") {
    Grid g = make_grid(16, 9, 1.0, 1.0);
    AlgebraElement a{windowed_random_field(g, 1), windowed_random_field(g, 2), windowed_random_field(g, 3)};
    MomentumElement m{ScalarField(g, 0.0), ScalarField(g, 0.0), ScalarField(g, 0.0)};
    MomentumElement r = ad_star(a, m);
    CHECK(r.mS_x.max_abs() == 0.0);
    CHECK(r.mT.max_abs() == 0.0);
}

TEST_CASE("windowed field vanishes at walls and is reproducible") {
    Grid g = make_grid(16, 9, 1.0, 1.0);
    ScalarField a = windowed_random_field(g, 42), b = windowed_random_field(g, 42), c = windowed_random_field(g, 43);
    CHECK((a - b).max_abs() == 0.0);
    CHECK((a - c).max_abs() > 0.0);
    for (int i = 0; i < g.nx; ++i) {
        CHECK(std::abs(a[g.index(i, 0)]) < 1e-14);
        CHECK(std::abs(a[g.index(i, g.nz - 1)]) < 1e-14);
    }
}

TEST_CASE("verify_structure passes on the default grid pair") {
    Grid g = make_grid(32, 17, 1.0e6, 1.0e4);
    StructureReport rep = verify_structure(g, 1);
    for (const auto& c : rep.checks) {
        MESSAGE(c.name << " coarse=" << c.residual_coarse << " fine=" << c.residual_fine << " ratio=" << c.ratio);
        CHECK_MESSAGE(c.pass, c.name);
    }
    CHECK(rep.checks.size() == 6);
    auto j = nlohmann::json::parse(rep.to_json());
    CHECK(j.contains("ad_star_duality"));
    CHECK(j["ad_star_duality"].contains("residual_coarse"));
    CHECK(j["eady_generic_vs_algebra_assembly"]["residual_fine"].get<double>() < kRoundingLevel);
}

TEST_CASE("Cullen has no algebra assembly") {
    Grid g = make_grid(16, 9, 1.0e6, 1.0e4);
    SliceState s = test::smooth_state(g, 1.0, true);
    ModelParams p;
    VariationalDerivatives vd;
    vd.f = p.f;
    vd.vS_x = s.u; vd.vS_z = s.w; vd.vT = s.uT; vd.pi = s.u; vd.gammaS = s.u;
    CHECK_THROWS_AS(ep_tendencies_from_algebra(vd, s, p, ModelKind::Cullen2008), Error);
}
