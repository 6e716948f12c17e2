#pragma once
// Scenario execution: initial data library, flow dispatch, per-sample
// diagnostics and artifact emission.

#include <chrono>
#include <cstdlib>

#include "flowlab/cli/config.hpp"
#include "flowlab/diag/decay.hpp"
#include "flowlab/diag/defects.hpp"
#include "flowlab/flow/integrate.hpp"
#include "flowlab/io/svg.hpp"

namespace flowlab {

/// Initial state and volume form of a named scenario, band-projected onto
/// the run's filter degree. The traceless perturbation is rescaled so the
/// class integral of its form is exactly 4 pi.
struct ScenarioData {
    FlowState state;
    VolumeForm vol;
};

inline ScenarioData build_scenario(const Geometry& geo, const ScenarioConfig& cfg) {
    const Grid& gr = geo.grid;
    ScenarioData out;
    out.vol = geo.dv_round;
    TensorField g0 = geo.round;

    if (cfg.scenario == "fixed_point") {
        // round metric, round volume form
    } else if (cfg.scenario == "conformal_rescale") {
        for (int i = 0; i < gr.n; ++i) g0[i] = geo.round[i] * cfg.factor;
    } else if (cfg.scenario == "tanh_soliton_volume") {
        out.vol = tanh_volume(gr, cfg.c);
    } else if (cfg.scenario == "traceless_perturbation") {
        for (int i = 0; i < gr.n; ++i)
            g0[i] = geo.round[i] * std::exp(2.0 * cfg.epsilon * gr.t[i] * gr.t[i]);
        SmoothProjector proj(gr, cfg.filter_degree);
        TensorField dev(gr.n);
        for (int i = 0; i < gr.n; ++i) dev[i] = g0[i] - geo.round[i];
        dev = proj.sym_tensor(gr, dev);
        for (int i = 0; i < gr.n; ++i) g0[i] = geo.round[i] + dev[i];
        const double scale = kTotalMass / form_mass(gr, omega_of(gr, g0, geo.jstd));
        for (int i = 0; i < gr.n; ++i) g0[i] = g0[i] * scale;
    } else {
        throw ConfigError("scenario", "unknown scenario '" + cfg.scenario + "'");
    }
    out.state.g = g0;
    out.state.j = geo.jstd;
    out.state.omega = omega_of(gr, g0, geo.jstd);
    return out;
}

inline Trajectory run_formulation(const Geometry& geo, const ScenarioData& data,
                                  const ScenarioConfig& cfg) {
    FlowSpec spec;
    spec.vol = data.vol;
    spec.dt = cfg.dt;
    spec.horizon = cfg.horizon;
    spec.stride = cfg.stride;
    spec.filter_degree = cfg.filter_degree;
    switch (cfg.formulation) {
        case Formulation::SRF:
        case Formulation::SKRF_metric:
            return integrate_skrf_metric(geo, data.state, spec);
        case Formulation::SKRF_symplectic:
            return integrate_skrf_symplectic(geo, data.state, spec);
        case Formulation::BackwardKRF_gauged:
            return integrate_backward_krf(geo, data.state, spec);
        case Formulation::Baby_closed_form: {
            // evaluate the closed-form family at the sample times
            Trajectory tr;
            tr.formulation = Formulation::Baby_closed_form;
            const long nsteps = static_cast<long>(std::llround(cfg.horizon / cfg.dt));
            for (long k = 0; k <= nsteps; k += cfg.stride) {
                const double t = static_cast<double>(k) * cfg.dt;
                Sample s;
                s.t = t;
                s.g = baby_closed_form(geo, data.state.g, data.vol, data.state.j, t);
                s.j = data.state.j;
                s.omega = omega_of(geo.grid, s.g, s.j);
                s.f.assign(geo.grid.n, 0.0);
                for (int i = 0; i < geo.grid.n; ++i)
                    s.f[i] = std::log(s.omega.comp[i] / data.vol.dens[i]);
                s.gdot.assign(geo.grid.n, M2{});
                s.jdot.assign(geo.grid.n, M2{});
                tr.samples.push_back(std::move(s));
            }
            return tr;
        }
    }
    throw ConfigError("formulation", "unhandled formulation");
}

struct ScenarioArtifacts {
    std::filesystem::path trajectory_csv;
    std::filesystem::path snapshot_csv;
    std::filesystem::path report_csv;
    std::filesystem::path report_txt;
    std::filesystem::path plot_svg; ///< empty when plots are disabled
};

inline std::string run_tag(const ScenarioConfig& cfg) {
    char dt[32];
    std::snprintf(dt, sizeof(dt), "%g", cfg.dt);
    return cfg.scenario + "_" + std::to_string(cfg.n) + "_" + dt;
}

/// Trajectory CSV columns, fixed by the external interface.
inline CsvTable trajectory_table(const Geometry& geo, const Trajectory& tr,
                                 const VolumeForm& vol) {
    CsvTable tb;
    tb.header = {"t",
                 "gdot_Linf",
                 "Jdot_Linf",
                 "krs_defect_L2",
                 "holomorphy_defect_L2",
                 "prescattering_defect_L2",
                 "compat_defect",
                 "Jsq_defect",
                 "mass_omega"};
    for (const Sample& s : tr.samples) {
        const DefectReport rep = defect_suite(geo, s.g, s.j, vol);
        tb.rows.push_back({s.t, s.gdot_linf, s.jdot_linf, rep.krs_l2, rep.holomorphy_l2,
                           rep.prescattering_l2, rep.compat, rep.jsq, rep.mass_omega});
    }
    return tb;
}

/// Field snapshot in the documented column layout.
inline CsvTable snapshot_table(const Geometry& geo, const Sample& s, const VolumeForm& vol) {
    const Grid& gr = geo.grid;
    CsvTable tb;
    tb.header = {"s",    "g_ss", "g_stheta", "g_thetatheta", "J_00",      "J_01",
                 "J_10", "J_11", "omega_comp", "f",          "Omega_dens"};
    for (int i = 0; i < gr.n; ++i) {
        tb.rows.push_back({gr.s[i], s.g[i].a00, 0.5 * (s.g[i].a01 + s.g[i].a10), s.g[i].a11,
                           s.j[i].a00, s.j[i].a01, s.j[i].a10, s.j[i].a11, s.omega.comp[i],
                           s.f.empty() ? 0.0 : s.f[i], vol.dens[i]});
    }
    return tb;
}

/// Run a scenario and emit all artifacts. Returns the process exit code:
/// 0 success, 3 numerical failure (failing time recorded in the report),
/// 4 I/O failure. Configuration errors throw before this point (exit 2).
inline int run_scenario(const ScenarioConfig& cfg, ScenarioArtifacts* artifacts = nullptr,
                        bool quiet = false) {
    namespace fs = std::filesystem;
    const Geometry geo(Grid(cfg.s_max, cfg.n));
    const ScenarioData data = build_scenario(geo, cfg);
    const Trajectory tr = run_formulation(geo, data, cfg);

    fs::path dir = cfg.output_dir;
    if (const char* env = std::getenv("FLOWLAB_OUT")) dir = env;
    const std::string tag = run_tag(cfg);

    ScenarioArtifacts art;
    art.trajectory_csv = dir / (tag + "_traj.csv");
    art.snapshot_csv = dir / (tag + "_snapshot.csv");
    art.report_csv = dir / (tag + "_report.csv");
    art.report_txt = dir / (tag + "_report.txt");

    try {
        const CsvTable traj = trajectory_table(geo, tr, data.vol);
        write_csv(art.trajectory_csv, traj);
        write_csv(art.snapshot_csv, snapshot_table(geo, tr.samples.back(), data.vol));

        // report: final defects, decay fits, run status
        const TrajectoryFits fits = trajectory_fits(geo, tr);
        const DefectReport last = defect_suite(geo, tr.samples.back().g, tr.samples.back().j,
                                               data.vol);
        std::string txt = "run " + tag + " [" + to_string(cfg.formulation) + "]\n";
        std::string repcsv = "name,value,norm,N,dt\n";
        auto addrow = [&](const std::string& name, double value, const char* norm) {
            repcsv += name + "," + format_num(value) + "," + norm + "," +
                      std::to_string(cfg.n) + "," + format_num(cfg.dt) + "\n";
            txt += "  " + name + " = " + format_num(value) + " [" + norm + "]\n";
        };
        addrow("status", static_cast<double>(tr.status), "-");
        addrow("fail_time", tr.fail_time, "-");
        addrow("final_time", tr.samples.back().t, "-");
        addrow("krs_defect_final", last.krs_l2, "L2");
        addrow("holomorphy_defect_final", last.holomorphy_l2, "L2");
        addrow("prescattering_defect_final", last.prescattering_l2, "L2");
        addrow("compat_defect_final", last.compat, "Linf");
        addrow("Jsq_defect_final", last.jsq, "Linf");
        addrow("mass_omega_final", last.mass_omega, "quad");
        addrow("gdot_fit_rate", fits.gdot.rate, "Linf");
        addrow("gdot_fit_r2", fits.gdot.r_squared, "-");
        addrow("gdot_fit_no_decay", fits.gdot.no_decay ? 1.0 : 0.0, "-");
        addrow("jdot_fit_rate", fits.jdot.rate, "Linf");
        addrow("jdot_fit_r2", fits.jdot.r_squared, "-");
        addrow("jdot_fit_no_decay", fits.jdot.no_decay ? 1.0 : 0.0, "-");
        addrow("jdot_fit_at_zero", fits.jdot.at_zero ? 1.0 : 0.0, "-");
        addrow("pointwise_bound_ok", fits.pointwise_bound_ok ? 1.0 : 0.0, "-");
        addrow("jnorm_identity_defect", fits.jnorm_defect, "Linf");
        const JInfinityEstimate jinf = jinfinity_estimate(geo, tr);
        addrow("jinfinity_valid", jinf.valid ? 1.0 : 0.0, "-");
        if (jinf.valid) {
            addrow("jinfinity_change", jinf.change_from_last, "F");
            addrow("jinfinity_tail_bound", jinf.tail_bound, "F");
            addrow("jinfinity_jsq_defect", jinf.jsq_defect, "Linf");
        }
        write_file_atomic(art.report_csv, repcsv);
        write_file_atomic(art.report_txt, txt);

        if (cfg.plots) {
            art.plot_svg = dir / (tag + "_plot.svg");
            std::vector<SvgSeries> series(3);
            series[0].label = "gdot_Linf";
            series[1].label = "Jdot_Linf";
            series[2].label = "krs_defect_L2";
            for (size_t k = 0; k < tr.samples.size(); ++k) {
                series[0].t.push_back(tr.samples[k].t);
                series[0].v.push_back(traj.rows[k][1]);
                series[1].t.push_back(tr.samples[k].t);
                series[1].v.push_back(traj.rows[k][2]);
                series[2].t.push_back(tr.samples[k].t);
                series[2].v.push_back(traj.rows[k][3]);
            }
            write_file_atomic(art.plot_svg, render_log_plot(series));
        }
    } catch (const IoError& e) {
        if (!quiet) std::fprintf(stderr, "io error: %s\n", e.what());
        return 4;
    }
    if (artifacts) *artifacts = art;
    if (tr.status != RunStatus::Completed) {
        if (!quiet)
            std::fprintf(stderr, "numerical failure (%s) at t = %g; partial results written\n",
                         tr.status == RunStatus::PositivityLoss ? "positivity loss"
                                                                : "divergence",
                         tr.fail_time);
        return 3;
    }
    return 0;
}

} // namespace flowlab
