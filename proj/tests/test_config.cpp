#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "json.hpp"

#include "slice/config.hpp"
#include "slice/error.hpp"

using namespace slice;

namespace {

std::string error_of(const std::string& text, const std::vector<std::string>& ov = {}) {
    try {
        parse_config_text(text, ov);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Config);
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("parse_config") {
    SUBCASE("empty object gives the documented defaults") {
        const ExperimentConfig c = parse_config_text("{}");
        const ExperimentConfig d;
        CHECK(c.kind == ModelKind::EadyBoussinesq);
        CHECK(c.grid.nx == 64);
        CHECK(c.grid.nz == 33);
        CHECK(c.grid.L == 1.0e6);
        CHECK(c.grid.H == 1.0e4);
        CHECK(c.params.f == 1.0e-4);
        CHECK(c.params.s == -3.0e-6);
        CHECK(c.params.theta0 == 300.0);
        CHECK(c.params.cp == 1004.0);
        CHECK(c.params.cp - c.params.cv == doctest::Approx(287.0));
        CHECK(c.N2 == 2.5e-5);
        CHECK_FALSE(c.integrator.dt.has_value());
        CHECK(c.integrator.t_end == d.integrator.t_end);
        CHECK(c.loops.size() == 1);
        CHECK(config_to_json(c) == config_to_json(d));
    }

    SUBCASE("round trip") {
        ExperimentConfig c;
        c.kind = ModelKind::Cullen2008;
        c.grid.nx = 32;
        c.integrator.dt = 2.5;
        c.params.Pi0_lapse = -1e-5;
        c.loops.push_back({0.1, 0.2, 0.3, 0.4, 32});
        const ExperimentConfig back = parse_config_text(config_to_json(c));
        CHECK(config_to_json(back) == config_to_json(c));
    }

    SUBCASE("overrides apply after the file") {
        const ExperimentConfig c = parse_config_text(R"({"integrator": {"dt": 5}})", {"integrator.dt=10"});
        REQUIRE(c.integrator.dt.has_value());
        CHECK(*c.integrator.dt == 10.0);
        const ExperimentConfig k = parse_config_text("{}", {"kind=scm", "loops.0.n=32", "grid.nx=16"});
        CHECK(k.kind == ModelKind::SCM);
        CHECK(k.loops[0].n == 32);
        CHECK(k.grid.nx == 16);
    }

    SUBCASE("unknown keys name the key") {
        CHECK(error_of(R"({"modle": "eady"})").find("modle") != std::string::npos);
        CHECK(error_of(R"({"params": {"thetaO": 1}})").find("params.thetaO") != std::string::npos);
        CHECK(error_of("{}", {"integrator.dtt=1"}).find("integrator.dtt") != std::string::npos);
    }

    SUBCASE("type mismatches") {
        CHECK(error_of(R"({"grid": {"nx": 1.5}})").find("grid.nx") != std::string::npos);
        CHECK(error_of(R"({"params": {"f": "big"}})").find("params.f") != std::string::npos);
        CHECK(error_of(R"({"loops": {}})").find("loops") != std::string::npos);
    }

    SUBCASE("syntax and invariant errors") {
        CHECK_FALSE(error_of("{\n  \"grid\": {\n").empty());
        CHECK_FALSE(error_of(R"({"perturbation": {"mode": 0}})").empty());
        CHECK_FALSE(error_of(R"({"kind": "navier"})").empty());
        CHECK_FALSE(error_of("{}", {"novalue"}).empty());
        CHECK_THROWS_AS(parse_config("/nonexistent/cfg.json"), Error);
    }

    SUBCASE("provenance") {
        const auto dir = std::filesystem::temp_directory_path() / "slicelab_config_test";
        ExperimentConfig c;
        c.seed = 7;
        write_provenance(dir.string(), c, "slicelab run");
        std::ifstream in(dir / "provenance.json");
        const auto j = nlohmann::json::parse(in);
        CHECK(j["version"] == kVersion);
        CHECK(j["seed"] == 7);
        CHECK(j["config"]["grid"]["nx"] == 64);
        std::filesystem::remove_all(dir);
    }
}
