#include <cmath>
#include <sstream>

#include "doctest.h"
#include "slice/diagnostics.hpp"
#include "slice/error.hpp"
#include "test_support.hpp"

using namespace slice;
using namespace slice::test;

namespace {

ModelParams unit_params() {
    ModelParams p;
    p.f = 1.0;
    p.g = 2.0;
    p.theta0 = 1.0;
    p.s = 0.5;
    return p;
}

}  // namespace

TEST_CASE("energy") {
    Grid g = make_grid(32, 17, 2.0, 1.0);
    ModelParams p = unit_params();
    SliceState st = SliceState::zeros(g, false);
    st.thetaS = ScalarField(g, 4.0);
    CHECK(std::abs(energy(ModelKind::EadyBoussinesq, st, p)) < 1e-14);

    SliceState uni = SliceState::zeros(g, false);
    uni.u = ScalarField(g, 3.0);
    CHECK(energy(ModelKind::EadyBoussinesq, uni, p) == doctest::Approx(0.5 * 9.0 * 2.0 * 1.0));

    SUBCASE("alpha energy of a Fourier mode") {
        ModelParams q = p;
        q.alpha = 0.2;
        const double A = 1.5, k = 2 * kPi / g.L;
        SliceState m = SliceState::zeros(g, false);
        m.u = ScalarField::from_function(g, [&](double x, double) { return A * std::cos(k * x); });
        // centred differences see the wavenumber sin(k dx)/dx
        const double keff = std::sin(k * g.dx) / g.dx;
        const double expect = 0.25 * A * A * g.L * g.H * (1 + q.alpha * q.alpha * keff * keff);
        CHECK(energy(ModelKind::AlphaEady, m, q) == doctest::Approx(expect).epsilon(1e-13));
        CHECK(energy(ModelKind::EadyBoussinesq, m, q) == doctest::Approx(0.25 * A * A * g.L * g.H).epsilon(1e-13));
    }

    SUBCASE("SCM uniform state") {
        ModelParams q;
        SliceState s = SliceState::zeros(g, true);
        s.thetaS = ScalarField(g, 300.0);
        s.D = ScalarField(g, 1.2);
        const double Pi = std::pow(1.2 * q.R() * 300.0 / q.p0, q.R() / q.cv);
        const double expect = 1.2 * (q.g * 0.5 * g.H + q.cv * Pi * 300.0) * g.L * g.H;
        CHECK(energy(ModelKind::SCM, s, q) == doctest::Approx(expect).epsilon(1e-13));
        CHECK(energy(ModelKind::Cullen2008, s, q) == energy(ModelKind::SCM, s, q));
        CHECK_THROWS_AS(energy(ModelKind::SCM, st, q), Error);
    }
}

TEST_CASE("potential_vorticity") {
    Grid g = make_grid(16, 9, 1.0, 1.0);
    ModelParams p = unit_params();
    const double Lam = 0.7;

    SliceState rest = SliceState::zeros(g, false);
    rest.thetaS = ScalarField::from_function(g, [&](double, double z) { return Lam * z; });
    CHECK(rel(potential_vorticity(ModelKind::EadyBoussinesq, rest, p), ScalarField(g, Lam * p.f)) < 1e-13);

    ModelParams p0 = p;
    p0.s = 0.0;
    SliceState flat = SliceState::zeros(g, false);
    flat.thetaS = ScalarField(g, 2.0);
    flat.u = ScalarField::from_function(g, [](double x, double z) { return std::sin(2 * kPi * x) * z; });
    CHECK(potential_vorticity(ModelKind::EadyBoussinesq, flat, p0).max_abs() == 0.0);

    SliceState shear = SliceState::zeros(g, false);
    shear.u = ScalarField::from_function(g, [](double, double z) { return 0.3 * z; });
    CHECK(rel(potential_vorticity(ModelKind::EadyBoussinesq, shear, p), ScalarField(g, p.s * 0.3)) < 1e-13);

    SliceState comp = SliceState::zeros(g, true);
    comp.thetaS = ScalarField::from_function(g, [&](double, double z) { return 300 + Lam * z; });
    comp.D = ScalarField(g, 2.0);
    CHECK(rel(potential_vorticity(ModelKind::SCM, comp, p), ScalarField(g, Lam * p.f / 2.0)) < 1e-11);
}

TEST_CASE("circulation") {
    Grid g = make_grid(32, 17, 4.0, 2.0);
    ModelParams p = unit_params();
    MaterialLoop loop = make_rectangular_loop(0.5, 2.5, 0.4, 1.6, 64);
    CHECK(loop.points.size() == 64);
    loop.validate(g);

    SliceState rest = SliceState::zeros(g, false);
    rest.thetaS = ScalarField(g, 1.0);
    CHECK(circulation(loop, ModelKind::EadyBoussinesq, rest, p) == 0.0);

    const double Lam = 0.3;
    rest.thetaS = ScalarField::from_function(g, [&](double, double z) { return Lam * z; });
    const double x1 = 0.5, x2 = 2.5, z1 = 0.4, z2 = 1.6;
    CHECK(circulation(loop, ModelKind::EadyBoussinesq, rest, p) ==
          doctest::Approx(-p.f * Lam * (x1 - x2) * (z2 - z1)).epsilon(1e-12));

    SUBCASE("orientation matches the area integral of curl_y") {
        SliceState sh = SliceState::zeros(g, false);
        sh.u = ScalarField::from_function(g, [](double, double z) { return z; });
        // only s v_S contributes: s * area
        CHECK(circulation(loop, ModelKind::EadyBoussinesq, sh, p) == doctest::Approx(p.s * (x2 - x1) * (z2 - z1)));
    }

    SUBCASE("unwrapped x keeps a loop across the periodic seam single valued") {
        MaterialLoop seam = make_rectangular_loop(3.5, 5.5, 0.4, 1.6, 64);
        CHECK(circulation(seam, ModelKind::EadyBoussinesq, rest, p) == doctest::Approx(p.f * Lam * 2.0 * 1.2).epsilon(1e-12));
    }

    SUBCASE("marker refinement") {
        Grid fine = make_grid(64, 33, 4.0, 2.0);
        SliceState st = smooth_state(fine, 0.3, false);
        auto c = [&](int n) {
            return circulation(make_rectangular_loop(0.5, 2.5, 0.4, 1.6, n), ModelKind::EadyBoussinesq, st, p);
        };
        const double e1 = std::abs(c(64) - c(128)), e2 = std::abs(c(128) - c(256));
        CHECK(e1 / e2 > 3.0);
    }

    CHECK_THROWS_AS(MaterialLoop{std::vector<Point>(8)}.validate(g), Error);
}

TEST_CASE("advect_loop") {
    Grid g = make_grid(16, 9, 1.0, 1.0);
    MaterialLoop loop = make_rectangular_loop(0.2, 0.6, 0.2, 0.7, 32);
    SliceState st = SliceState::zeros(g, false);
    MaterialLoop same = advect_loop(loop, st, 0.1);
    for (std::size_t j = 0; j < loop.points.size(); ++j) {
        CHECK(same.points[j].x == loop.points[j].x);
        CHECK(same.points[j].z == loop.points[j].z);
    }
    st.u = ScalarField(g, 0.25);
    MaterialLoop moved = advect_loop(loop, st, 0.4);
    for (std::size_t j = 0; j < loop.points.size(); ++j) {
        CHECK(moved.points[j].x == doctest::Approx(loop.points[j].x + 0.1).epsilon(1e-14));
        CHECK(moved.points[j].z == loop.points[j].z);
    }

    SUBCASE("cellular flow against an analytic-velocity reference") {
        // psi = sin(2 pi x) sin(pi z): u = psi_z, w = -psi_x
        auto uex = [](double x, double z) { return kPi * std::sin(2 * kPi * x) * std::cos(kPi * z); };
        auto wex = [](double x, double z) { return -2 * kPi * std::cos(2 * kPi * x) * std::sin(kPi * z); };
        const Point start{0.15, 0.35};
        const double T = 0.4;
        Point ref = start;
        const int nref = 4000;
        for (int j = 0; j < nref; ++j) {
            const double h = T / nref;
            auto f = [&](Point q) { return Point{uex(q.x, q.z), wex(q.x, q.z)}; };
            Point k1 = f(ref), k2 = f({ref.x + 0.5 * h * k1.x, ref.z + 0.5 * h * k1.z});
            Point k3 = f({ref.x + 0.5 * h * k2.x, ref.z + 0.5 * h * k2.z}), k4 = f({ref.x + h * k3.x, ref.z + h * k3.z});
            ref.x += h / 6 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x);
            ref.z += h / 6 * (k1.z + 2 * k2.z + 2 * k3.z + k4.z);
        }
        auto err = [&](int n) {
            Grid gg = make_grid(n, n + 1, 1.0, 1.0);
            SliceState s = SliceState::zeros(gg, false);
            s.u = ScalarField::from_function(gg, uex);
            s.w = ScalarField::from_function(gg, wex);
            MaterialLoop one{{start}};
            for (int j = 0; j < 400; ++j) one = advect_loop(one, s, T / 400);
            return std::hypot(one.points[0].x - ref.x, one.points[0].z - ref.z);
        };
        const double e1 = err(32), e2 = err(64);
        CHECK(e1 < 0.01);
        CHECK(e1 / e2 > 3.5);
    }

    SUBCASE("escape is reported") {
        SliceState up = SliceState::zeros(g, false);
        up.w = ScalarField(g, 1.0);
        MaterialLoop near{{{0.5, 0.99}}};
        CHECK_THROWS_AS(advect_loop(near, up, 1.0), Error);
    }
}

TEST_CASE("pv_production_cullen") {
    Grid g = make_grid(32, 17, 1.0e5, 1.0e4);
    ModelParams p;
    SliceState st = SliceState::zeros(g, true);
    st.thetaS = ScalarField::from_function(g, [](double, double z) { return 300 + 3e-3 * z; });
    st.D = ScalarField::from_function(g, [](double, double z) { return 1.2 * std::exp(-z / 8000); });
    CHECK(pv_production_cullen(st, p).max_abs() < 1e-20);

    auto err = [&](int n) {
        Grid gg = make_grid(n, n / 2 + 1, 1.0e5, 1.0e4);
        const double k = 2 * kPi / gg.L;
        const double b = -3e-5;
        SliceState s = SliceState::zeros(gg, true);
        s.thetaS = ScalarField::from_function(gg, [&](double x, double) { return 300 + 2 * std::sin(k * x); });
        // choose D so that Pi = 1 + b z exactly
        s.D = ScalarField::from_function(gg, [&](double x, double z) {
            return p.p0 * std::pow(1 + b * z, p.cv / p.R()) / (p.R() * (300 + 2 * std::sin(k * x)));
        });
        // (grad Pi x grad theta).y = Pi_z theta_x
        ScalarField expect = ScalarField::from_function(gg, [&](double x, double) { return b * 2 * k * std::cos(k * x); });
        expect = p.cp * expect / *s.D;
        return rel(pv_production_cullen(s, p), expect);
    };
    CHECK(err(32) < 0.01);
    CHECK(err(32) / err(64) > 3.5);
    CHECK_THROWS_AS(pv_production_cullen(SliceState::zeros(g, false), p), Error);
}

TEST_CASE("momentum_map_mR") {
    Grid g = make_grid(16, 9, 1.0, 1.0);
    ModelParams p = unit_params();
    SliceState st = SliceState::zeros(g, false);
    st.thetaS = ScalarField(g, 5.0);
    auto [a, b] = momentum_map_mR(ModelKind::EadyBoussinesq, st, p);
    CHECK(a.max_abs() == 0.0);
    CHECK(b.max_abs() == 0.0);

    const double Lam = 0.4;
    st.thetaS = ScalarField::from_function(g, [&](double, double z) { return Lam * z; });
    auto [c, d] = momentum_map_mR(ModelKind::EadyBoussinesq, st, p);
    CHECK(c.max_abs() < 1e-14);
    auto expect = ScalarField::from_function(g, [&](double x, double) { return p.f * x * Lam / p.s; });
    CHECK((d - expect).max_abs() < 1e-14);

    ModelParams p0 = p;
    p0.s = 0.0;
    CHECK_THROWS_AS(momentum_map_mR(ModelKind::EadyBoussinesq, st, p0), Error);

    SUBCASE("curl of s v_S - s m_R / D reproduces D q") {
        // the x-periodic part of v_T must be used here: f*x has a jump at the seam
        ModelParams q = p;
        q.f = 0.0;
        auto err = [&](int n) {
            Grid gg = make_grid(n, n / 2 + 1, 1.0, 1.0);
            SliceState s = smooth_state(gg, 1.0, false);
            auto [mx, mz] = momentum_map_mR(ModelKind::EadyBoussinesq, s, q);
            ScalarField lhs = curl_y(q.s * s.u - q.s * mx, q.s * s.w - q.s * mz);
            return rel(lhs, potential_vorticity(ModelKind::EadyBoussinesq, s, q));
        };
        CHECK(err(32) < 0.05);
        CHECK(err(32) / err(64) > 3.5);
    }
}

TEST_CASE("records and CSV") {
    Grid g = make_grid(16, 9, 1.0, 1.0);
    ModelParams p = unit_params();
    SliceState st = smooth_state(g, 0.2, false);
    std::vector<MaterialLoop> loops{make_rectangular_loop(0.2, 0.6, 0.2, 0.7, 32),
                                    make_rectangular_loop(0.3, 0.8, 0.3, 0.6, 16)};
    DiagnosticsRecord r = compute_record(ModelKind::EadyBoussinesq, st, p, loops);
    CHECK(r.circulation.size() == 2);
    CHECK(r.div_linf.has_value());
    CHECK(!r.pv_production_l2.has_value());
    CHECK(r.mass == doctest::Approx(1.0));

    std::ostringstream os;
    write_csv_header(os, 2);
    write_csv_row(os, r);
    const std::string text = os.str();
    CHECK(text.rfind("time,energy,mass,theta_integral,pv_min,pv_max,pv_l2,div_linf,circ_0,circ_1,pv_prod_l2\n", 0) == 0);
    CHECK(text.find(",nan\n") != std::string::npos);

    TrackedPoints tp{loops, tracer_lattice(g, 5, 4)};
    CHECK(tp.tracers.size() == 20);
    std::vector<Point> packed = tp.pack();
    CHECK(packed.size() == 68);
    packed[0].x = 9.0;
    packed[67].z = 0.5;
    tp.unpack(packed);
    CHECK(tp.loops[0].points[0].x == 9.0);
    CHECK(tp.tracers[19].z == 0.5);
}
