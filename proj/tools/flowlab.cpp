// flowlab command line tool
//
//   flowlab run <config.json>   execute one scenario, emit CSV artifacts
//   flowlab verify              run the full acceptance battery
//   flowlab oracle lax          pointwise commutator-flow oracle battery
//
// Exit codes: 0 success, 1 verification failure, 2 configuration error,
// 3 numerical failure, 4 I/O failure. FLOWLAB_OUT overrides the output
// directory of `run` and `verify`.

#include <CLI11.hpp>
#include <fstream>

#include "flowlab/cli/verify.hpp"

using namespace flowlab;

namespace {

int cmd_run(const std::string& config_path) {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) {
        std::fprintf(stderr, "cannot open config file: %s\n", config_path.c_str());
        return 4;
    }
    const std::string text((std::istreambuf_iterator<char>(in)),
                           std::istreambuf_iterator<char>());
    ScenarioConfig cfg;
    try {
        cfg = parse_config(text);
    } catch (const ParseError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 2;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error [%s]: %s\n", e.key.c_str(), e.what());
        return 2;
    }
    try {
        ScenarioArtifacts art;
        const int code = run_scenario(cfg, &art);
        std::printf("run %s [%s]: exit %d\n", cfg.scenario.c_str(),
                    to_string(cfg.formulation), code);
        std::printf("  trajectory: %s\n", art.trajectory_csv.string().c_str());
        std::printf("  snapshot:   %s\n", art.snapshot_csv.string().c_str());
        std::printf("  report:     %s\n", art.report_csv.string().c_str());
        if (!art.plot_svg.empty())
            std::printf("  plot:       %s\n", art.plot_svg.string().c_str());
        return code;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error [%s]: %s\n", e.key.c_str(), e.what());
        return 2;
    } catch (const FlowError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    }
}

int cmd_verify() {
    VerifyOptions opt;
    if (const char* env = std::getenv("FLOWLAB_OUT")) opt.out_dir = env;
    const auto results = run_acceptance(opt);
    return print_and_summarize(results);
}

int cmd_oracle_lax() {
    const auto r1 = criterion_lax_preservation();
    const auto r2 = criterion_conjugation_order();
    std::printf("[lax] %s  %s\n      %s\n", r1.pass ? "PASS" : "FAIL", r1.name.c_str(),
                r1.detail.c_str());
    std::printf("[lax] %s  %s\n      %s\n", r2.pass ? "PASS" : "FAIL", r2.name.c_str(),
                r2.detail.c_str());
    return (r1.pass && r2.pass) ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"flowlab: soliton-type curvature flows on the symmetric 2-sphere"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run = app.add_subcommand("run", "run one scenario from a JSON config");
    run->add_option("config", config_path, "path to the scenario config")->required();

    auto* verify = app.add_subcommand("verify", "run the acceptance battery");

    auto* oracle = app.add_subcommand("oracle", "oracle batteries");
    auto* lax = oracle->add_subcommand("lax", "pointwise commutator-flow battery");
    oracle->require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    if (run->parsed()) return cmd_run(config_path);
    if (verify->parsed()) return cmd_verify();
    if (oracle->parsed() && lax->parsed()) return cmd_oracle_lax();
    return 2;
}
