#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>

#include "flowlab/cli/scenario.hpp"

using namespace flowlab;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

std::filesystem::path repo_path(const char* env, const char* fallback) {
    if (const char* v = std::getenv(env)) return v;
    return fallback;
}

} // namespace

TEST_CASE("config defaults and validation") {
    const ScenarioConfig cfg = parse_config(R"({"scenario":"fixed_point"})");
    CHECK(cfg.s_max == 6.0);
    CHECK(cfg.n == 801);
    CHECK(cfg.dt == 1e-3);
    CHECK(cfg.horizon == 5.0);
    CHECK(cfg.stride == 100);
    CHECK(cfg.filter_degree == 1);

    // Fano positivity bound on the volume tilt
    CHECK_THROWS_AS(parse_config(R"({"scenario":"tanh_soliton_volume","c":1.5})"), ConfigError);
    try {
        parse_config(R"({"scenario":"tanh_soliton_volume","c":1.5})");
    } catch (const ConfigError& e) {
        CHECK(e.key == "c");
    }

    // unknown keys rejected, malformed text raises ParseError
    CHECK_THROWS_AS(parse_config(R"({"scenario":"fixed_point","bogus":1})"), ConfigError);
    CHECK_THROWS_AS(parse_config("{not json"), ParseError);
    CHECK_THROWS_AS(parse_config(R"({"scenario":"fixed_point","N":800})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"scenario":"no_such_thing"})"), ConfigError);
}

TEST_CASE("shipped conformal config matches the golden struct dump") {
    const auto scen_dir = repo_path("FLOWLAB_SCENARIOS", "scenarios");
    const auto golden_dir = repo_path("FLOWLAB_GOLDEN", "tests/golden");
    const ScenarioConfig cfg = parse_config(slurp(scen_dir / "conformal_rescale.json"));
    CHECK(cfg.dump() == slurp(golden_dir / "conformal_rescale.dump"));
}

TEST_CASE("scenario run emits deterministic, well-formed artifacts") {
    ScenarioConfig cfg;
    cfg.scenario = "conformal_rescale";
    apply_scenario_defaults(cfg);
    cfg.n = 201;
    cfg.dt = 5e-3;
    cfg.horizon = 0.5;
    cfg.stride = 20;
    cfg.plots = true;
    cfg.output_dir = "test_out_a";

    ScenarioArtifacts a, b;
    REQUIRE(run_scenario(cfg, &a, true) == 0);
    cfg.output_dir = "test_out_b";
    REQUIRE(run_scenario(cfg, &b, true) == 0);

    const std::string traj = slurp(a.trajectory_csv);
    CHECK(traj == slurp(b.trajectory_csv));
    CHECK(slurp(a.snapshot_csv) == slurp(b.snapshot_csv));
    CHECK(slurp(a.report_csv) == slurp(b.report_csv));

    // column layout of the trajectory file
    CHECK(traj.rfind("t,gdot_Linf,Jdot_Linf,krs_defect_L2,holomorphy_defect_L2,"
                     "prescattering_defect_L2,compat_defect,Jsq_defect,mass_omega\n",
                     0) == 0);
    // snapshot header and row count (one per node, plus header)
    const std::string snap = slurp(a.snapshot_csv);
    CHECK(snap.rfind("s,g_ss,g_stheta,g_thetatheta,J_00,J_01,J_10,J_11,omega_comp,f,Omega_dens\n",
                     0) == 0);
    CHECK(std::count(snap.begin(), snap.end(), '\n') == 201 + 1);

    // SVG is well-formed enough to parse as XML: one root element, balanced
    const std::string svg = slurp(a.plot_svg);
    CHECK(svg.rfind("<?xml", 0) == 0);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(std::count(svg.begin(), svg.end(), '<') ==
          std::count(svg.begin(), svg.end(), '>'));
}

TEST_CASE("stride equal to the full horizon keeps only the endpoints") {
    ScenarioConfig cfg;
    cfg.scenario = "fixed_point";
    apply_scenario_defaults(cfg);
    cfg.n = 101;
    cfg.dt = 1e-2;
    cfg.horizon = 0.5;
    cfg.stride = 50; // = T/dt
    cfg.output_dir = "test_out_c";
    ScenarioArtifacts art;
    REQUIRE(run_scenario(cfg, &art, true) == 0);
    const std::string traj = slurp(art.trajectory_csv);
    CHECK(std::count(traj.begin(), traj.end(), '\n') == 2 + 1); // header + t=0 + t=T
}

TEST_CASE("numerical failure maps to exit code 3 with partial artifacts") {
    ScenarioConfig cfg;
    cfg.scenario = "traceless_perturbation";
    apply_scenario_defaults(cfg);
    cfg.n = 201;
    cfg.dt = 1.0; // way past the stability ceiling
    cfg.horizon = 20.0;
    cfg.stride = 1;
    cfg.output_dir = "test_out_d";
    ScenarioArtifacts art;
    CHECK(run_scenario(cfg, &art, true) == 3);
    const std::string rep = slurp(art.report_csv);
    CHECK(rep.find("fail_time") != std::string::npos);
}
