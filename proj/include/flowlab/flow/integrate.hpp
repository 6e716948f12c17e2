#pragma once
// Time integration of the volume-form-coupled flows on the reduced
// geometry, in three formulations:
//
//   metric:      dg/dt = Ric_g(Omega) - g,   2 dJ/dt = J A - A J,  A = g^{-1} dg/dt
//   symplectic:  dw/dt = Ric_J(Omega) - w,   dJ/dt = J dbar grad log(w^n/Omega)
//   backward:    dw/dt = Ric_J0(w^n) - w at fixed J0, coupled with the
//                potential equation 2 df/dt = -Lap f - |grad f|^2 + Scal - 2n
//
// All right-hand sides are evaluated with the well-balanced operators and
// projected onto the smooth band before stepping (see poly_filter.hpp: off
// the invariant families these systems are of backward-parabolic type and
// the unresolvable sub-band modes grow at rates ~cosh^2/h^2, so a
// consistent unfiltered discretization overflows from round-off at any
// step size). The J update is pointwise in the filtered generator, which
// keeps J^2 = -I and the compatibility transpose condition exact up to the
// Runge-Kutta remainder, as the preservation lemma promises.

#include "flowlab/core/poly_filter.hpp"
#include "flowlab/flow/state.hpp"

namespace flowlab {

/// dg/dt of the metric flow: Ric_g(Omega) - g (unfiltered operator value).
inline TensorField srf_rhs(const Geometry& geo, const TensorField& g, const VolumeForm& vol) {
    TensorField out = bakry_emery(geo, g, vol);
    for (int i = 0; i < geo.grid.n; ++i) out[i] -= g[i];
    return out;
}

namespace detail {

/// Tr_omega(X) for a 2-form given by matrix X: Tr(omega^{-1} X).
inline double trace_omega(const M2& omega_mat, const M2& x) {
    return (omega_mat.inverse() * x).trace();
}

/// The band projection is w-orthogonal, which does not pair exactly with
/// the mass functional of the induced form; a conformal carrier term
/// restores the raw mass rate so d/dt of the class integral stays what the
/// continuum says it is. The carrier is in-band, hence this vanishes
/// identically whenever the raw velocity already is.
inline void restore_mass_rate(const Geometry& geo, const TensorField& gdot_raw,
                              TensorField& gdot_filtered, const ComplexStructureField& j) {
    const Grid& gr = geo.grid;
    double m_raw = 0.0, m_fil = 0.0, m_car = 0.0;
    for (int i = 0; i < gr.n; ++i) {
        m_raw += gr.w[i] * 0.5 * ((gdot_raw[i] * j[i]).a10 - (gdot_raw[i] * j[i]).a01);
        m_fil += gr.w[i] * 0.5 * ((gdot_filtered[i] * j[i]).a10 - (gdot_filtered[i] * j[i]).a01);
        const M2 car = M2::identity() * gr.sech2[i];
        m_car += gr.w[i] * 0.5 * ((car * j[i]).a10 - (car * j[i]).a01);
    }
    if (std::abs(m_car) < 1e-12) return;
    const double c = (m_raw - m_fil) / m_car;
    for (int i = 0; i < gr.n; ++i)
        gdot_filtered[i] += M2::identity() * (c * gr.sech2[i]);
}

inline bool spd_everywhere(const Grid& g, const TensorField& metric) {
    for (int i = 0; i < g.n; ++i) {
        if (!metric[i].finite()) return false;
        if (!(metric[i].det() > 0.0) || !(metric[i].a00 > 0.0)) return false;
    }
    return true;
}

struct StageDerivative {
    TensorField gdot;
    ComplexStructureField jdot;
    TwoFormField wdot;
    ScalarField fdot;
};

} // namespace detail

// --- metric formulation ---------------------------------------------------

namespace detail {

inline StageDerivative metric_rhs(const Geometry& geo, const SmoothProjector& proj,
                                  const VolumeForm& vol, const TensorField& g,
                                  const ComplexStructureField& j) {
    const Grid& gr = geo.grid;
    StageDerivative d;
    const TensorField gdot_raw = srf_rhs(geo, g, vol);
    d.gdot = proj.sym_tensor(gr, gdot_raw);
    restore_mass_rate(geo, gdot_raw, d.gdot, j);
    d.jdot.resize(gr.n);
    d.fdot.resize(gr.n);
    for (int i = 0; i < gr.n; ++i) {
        const M2 a = g[i].inverse() * d.gdot[i];
        d.jdot[i] = commutator(j[i], a) * 0.5;
        const M2 omega_mat = g[i] * j[i];
        const M2 wdot_mat = d.gdot[i] * j[i] + g[i] * d.jdot[i];
        d.fdot[i] = 0.5 * trace_omega(omega_mat, wdot_mat);
    }
    return d;
}

} // namespace detail

// --- symplectic formulation -------------------------------------------------

namespace detail {

// The three formulations assemble their raw right-hand side through their
// own operator route (Bakry-Emery, curvature form, gauged curvature form),
// but the smooth-band projection is always applied to the induced metric
// velocity and the J velocity re-slaved through the commutator. With the
// projection placed identically, pairwise differences between formulations
// measure pure stencil and time-stepping error instead of the projection's
// interaction with the change of variables.

inline StageDerivative symplectic_rhs(const Geometry& geo, const SmoothProjector& proj,
                                      const VolumeForm& vol, const TwoFormField& w,
                                      const ComplexStructureField& j) {
    const Grid& gr = geo.grid;
    StageDerivative d;
    const TensorField g = metric_of(gr, w, j);
    const TwoFormField ric = ricci_form(geo, vol, g, j);

    // independent route: dw/dt = Ric_J(Omega) - w, dJ/dt = J dbar grad f
    ScalarField f(gr.n);
    for (int i = 0; i < gr.n; ++i) f[i] = std::log(w.comp[i] / vol.dens[i]);
    const ChristoffelField ch = christoffels(gr, g);
    const TensorField hess = hessian(gr, ch, f);

    TensorField gdot_raw(gr.n);
    for (int i = 0; i < gr.n; ++i) {
        const M2 wdot_raw = M2::two_form(ric.comp[i] - w.comp[i]);
        const M2 jdot_raw = j[i] * antilinear_part(g[i].inverse() * hess[i], j[i]);
        gdot_raw[i] = (wdot_raw * j[i] + M2::two_form(w.comp[i]) * jdot_raw) * -1.0;
    }
    TensorField gdot = proj.sym_tensor(gr, gdot_raw);
    restore_mass_rate(geo, gdot_raw, gdot, j);

    d.jdot.resize(gr.n);
    d.wdot.comp.resize(gr.n);
    d.fdot.resize(gr.n);
    for (int i = 0; i < gr.n; ++i) {
        const M2 a = g[i].inverse() * gdot[i];
        d.jdot[i] = commutator(j[i], a) * 0.5;
        const M2 wdot = gdot[i] * j[i] + g[i] * d.jdot[i];
        d.wdot.comp[i] = 0.5 * (wdot.a10 - wdot.a01);
        d.fdot[i] = d.wdot.comp[i] / w.comp[i];
    }
    return d;
}

} // namespace detail

// --- gauged backward formulation ---------------------------------------------

namespace detail {

inline StageDerivative backward_rhs(const Geometry& geo, const SmoothProjector& proj,
                                    const TwoFormField& w, const ScalarField& fhat) {
    const Grid& gr = geo.grid;
    StageDerivative d;
    const TensorField g = metric_of(gr, w, geo.jstd);
    VolumeForm wn;
    wn.dens = w.comp; // omega^n as a density relative to ds^dtheta
    const TwoFormField ric = ricci_form_std(geo, wn);
    TensorField gdot_raw(gr.n);
    for (int i = 0; i < gr.n; ++i)
        gdot_raw[i] = (M2::two_form(ric.comp[i] - w.comp[i]) * geo.jstd[i]) * -1.0;
    TensorField gdot = proj.sym_tensor(gr, gdot_raw);
    restore_mass_rate(geo, gdot_raw, gdot, geo.jstd);
    d.wdot.comp.resize(gr.n);
    for (int i = 0; i < gr.n; ++i) {
        const M2 wdot = gdot[i] * geo.jstd[i];
        d.wdot.comp[i] = 0.5 * (wdot.a10 - wdot.a01);
    }

    const ChristoffelField ch = christoffels(gr, g);
    TensorField ricci = ricci_raw(gr, ch);
    for (int i = 0; i < gr.n; ++i) ricci[i] -= geo.corr.ricci[i];
    const ScalarField scal = scal_of(gr, g, ricci);
    const TensorField hess = hessian(gr, ch, fhat);
    const ScalarField lap = laplacian(gr, g, hess);
    const ScalarField df = d1(gr, fhat);
    d.fdot.resize(gr.n);
    for (int i = 0; i < gr.n; ++i) {
        const double grad_sq = g[i].inverse().a00 * df[i] * df[i];
        d.fdot[i] = 0.5 * (-lap[i] - grad_sq + scal[i] - 2.0);
    }
    d.fdot = proj.scalar(d.fdot);
    return d;
}

} // namespace detail

// --- integrators ---------------------------------------------------------------

namespace detail {

template <typename State, typename Rhs, typename Axpy, typename Record, typename Guard>
Trajectory run_rk4(Formulation kind, const FlowSpec& spec, State y, Rhs rhs, Axpy axpy,
                   Record record, Guard guard) {
    Trajectory tr;
    tr.formulation = kind;
    const double dt = spec.dt;
    const long nsteps = static_cast<long>(std::llround(spec.horizon / dt));
    const int stride = std::max(1, spec.stride);

    record(tr, 0.0, y);
    for (long k = 0; k < nsteps; ++k) {
        const double t = static_cast<double>(k) * dt;
        try {
            const auto k1 = rhs(y);
            const auto k2 = rhs(axpy(y, k1, 0.5 * dt));
            const auto k3 = rhs(axpy(y, k2, 0.5 * dt));
            const auto k4 = rhs(axpy(y, k3, dt));
            State next = axpy(y, k1, dt / 6.0);
            next = axpy(next, k2, dt / 3.0);
            next = axpy(next, k3, dt / 3.0);
            next = axpy(next, k4, dt / 6.0);
            y = std::move(next);
        } catch (const InvalidMetric&) {
            tr.status = RunStatus::PositivityLoss;
            tr.fail_time = t;
            return tr;
        } catch (const NotFano&) {
            tr.status = RunStatus::PositivityLoss;
            tr.fail_time = t;
            return tr;
        }
        const double tn = static_cast<double>(k + 1) * dt;
        if (!guard(tr, tn, y)) {
            tr.fail_time = tn;
            record(tr, tn, y);
            return tr;
        }
        if ((k + 1) % stride == 0 || k + 1 == nsteps) record(tr, tn, y);
    }
    return tr;
}

} // namespace detail

/// RK4 on the coupled (g, J) system with the potential carried along.
inline Trajectory integrate_skrf_metric(const Geometry& geo, const FlowState& init,
                                        const FlowSpec& spec) {
    const Grid& gr = geo.grid;
    const SmoothProjector proj(gr, spec.filter_degree);

    struct Y {
        TensorField g;
        ComplexStructureField j;
        ScalarField f;
    };
    Y y0{init.g, init.j, ScalarField(gr.n)};
    for (int i = 0; i < gr.n; ++i)
        y0.f[i] = std::log((init.g[i] * init.j[i]).a10 / spec.vol.dens[i]);

    auto rhs = [&](const Y& y) {
        auto d = detail::metric_rhs(geo, proj, spec.vol, y.g, y.j);
        return d;
    };
    auto axpy = [&](const Y& y, const detail::StageDerivative& d, double c) {
        Y out = y;
        for (int i = 0; i < gr.n; ++i) {
            out.g[i] += d.gdot[i] * c;
            out.j[i] += d.jdot[i] * c;
            out.f[i] += d.fdot[i] * c;
        }
        return out;
    };
    auto record = [&](Trajectory& tr, double t, const Y& y) {
        Sample s;
        s.t = t;
        s.g = y.g;
        s.j = y.j;
        s.omega = omega_of(gr, y.g, y.j);
        s.f = y.f;
        const auto d = detail::metric_rhs(geo, proj, spec.vol, y.g, y.j);
        s.gdot = d.gdot;
        s.jdot = d.jdot;
        s.gdot_linf = linf_norm_sym2(gr, d.gdot, y.g);
        s.gdot_l2 = l2_norm_sym2(gr, d.gdot, y.g);
        double w = 0.0, acc = 0.0;
        for (int i = 0; i < gr.n; ++i) {
            const double nn = std::sqrt(std::abs(endo_norm_sq(d.jdot[i], y.g[i])));
            w = std::max(w, nn);
            acc += gr.w[i] * nn * nn * std::sqrt(y.g[i].det());
        }
        s.jdot_linf = w;
        s.jdot_l2 = std::sqrt(2.0 * kPi * acc);
        tr.samples.push_back(std::move(s));
    };
    auto guard = [&](Trajectory& tr, double, const Y& y) {
        if (!detail::spd_everywhere(gr, y.g)) {
            tr.status = RunStatus::PositivityLoss;
            return false;
        }
        const double dj = jsq_defect(gr, y.j);
        const double dc = compat_defect(gr, y.g, y.j);
        if (!std::isfinite(dj) || std::max(dj, dc) > spec.divergence_tol) {
            tr.status = RunStatus::Divergence;
            tr.note = "constraint defect above divergence tolerance";
            return false;
        }
        return true;
    };
    return detail::run_rk4(Formulation::SKRF_metric, spec, std::move(y0), rhs, axpy, record,
                           guard);
}

/// RK4 on (omega, J); the metric is reconstructed as -omega J each stage.
inline Trajectory integrate_skrf_symplectic(const Geometry& geo, const FlowState& init,
                                            const FlowSpec& spec) {
    const Grid& gr = geo.grid;
    const SmoothProjector proj(gr, spec.filter_degree);

    struct Y {
        TwoFormField w;
        ComplexStructureField j;
        ScalarField f;
    };
    Y y0{init.omega, init.j, ScalarField(gr.n)};
    for (int i = 0; i < gr.n; ++i)
        y0.f[i] = std::log(init.omega.comp[i] / spec.vol.dens[i]);

    auto rhs = [&](const Y& y) { return detail::symplectic_rhs(geo, proj, spec.vol, y.w, y.j); };
    auto axpy = [&](const Y& y, const detail::StageDerivative& d, double c) {
        Y out = y;
        for (int i = 0; i < gr.n; ++i) {
            out.w.comp[i] += d.wdot.comp[i] * c;
            out.j[i] += d.jdot[i] * c;
            out.f[i] += d.fdot[i] * c;
        }
        return out;
    };
    auto record = [&](Trajectory& tr, double t, const Y& y) {
        Sample s;
        s.t = t;
        s.g = metric_of(gr, y.w, y.j);
        s.j = y.j;
        s.omega = y.w;
        s.f = y.f;
        const auto d = detail::symplectic_rhs(geo, proj, spec.vol, y.w, y.j);
        TensorField gdot(gr.n);
        for (int i = 0; i < gr.n; ++i)
            gdot[i] = (M2::two_form(d.wdot.comp[i]) * y.j[i] + M2::two_form(y.w.comp[i]) * d.jdot[i]) * -1.0;
        s.gdot = gdot;
        s.jdot = d.jdot;
        s.gdot_linf = linf_norm_sym2(gr, gdot, s.g);
        s.gdot_l2 = l2_norm_sym2(gr, gdot, s.g);
        double w = 0.0, acc = 0.0;
        for (int i = 0; i < gr.n; ++i) {
            const double nn = std::sqrt(std::abs(endo_norm_sq(d.jdot[i], s.g[i])));
            w = std::max(w, nn);
            acc += gr.w[i] * nn * nn * std::sqrt(s.g[i].det());
        }
        s.jdot_linf = w;
        s.jdot_l2 = std::sqrt(2.0 * kPi * acc);
        tr.samples.push_back(std::move(s));
    };
    auto guard = [&](Trajectory& tr, double, const Y& y) {
        const TensorField g = metric_of(gr, y.w, y.j);
        if (!detail::spd_everywhere(gr, g)) {
            tr.status = RunStatus::PositivityLoss;
            return false;
        }
        const double dj = jsq_defect(gr, y.j);
        if (!std::isfinite(dj) || dj > spec.divergence_tol) {
            tr.status = RunStatus::Divergence;
            tr.note = "J^2 defect above divergence tolerance";
            return false;
        }
        return true;
    };
    return detail::run_rk4(Formulation::SKRF_symplectic, spec, std::move(y0), rhs, axpy,
                           record, guard);
}

/// RK4 on (omega_hat, f_hat) at frozen complex structure J0.
inline Trajectory integrate_backward_krf(const Geometry& geo, const FlowState& init,
                                         const FlowSpec& spec) {
    const Grid& gr = geo.grid;
    const SmoothProjector proj(gr, spec.filter_degree);

    struct Y {
        TwoFormField w;
        ScalarField f;
    };
    Y y0{init.omega, ScalarField(gr.n)};
    for (int i = 0; i < gr.n; ++i)
        y0.f[i] = std::log(init.omega.comp[i] / spec.vol.dens[i]);

    auto rhs = [&](const Y& y) { return detail::backward_rhs(geo, proj, y.w, y.f); };
    auto axpy = [&](const Y& y, const detail::StageDerivative& d, double c) {
        Y out = y;
        for (int i = 0; i < gr.n; ++i) {
            out.w.comp[i] += d.wdot.comp[i] * c;
            out.f[i] += d.fdot[i] * c;
        }
        return out;
    };
    auto record = [&](Trajectory& tr, double t, const Y& y) {
        Sample s;
        s.t = t;
        s.g = metric_of(gr, y.w, geo.jstd);
        s.j = geo.jstd;
        s.omega = y.w;
        s.f = y.f;
        const auto d = detail::backward_rhs(geo, proj, y.w, y.f);
        TensorField gdot(gr.n);
        for (int i = 0; i < gr.n; ++i)
            gdot[i] = (M2::two_form(d.wdot.comp[i]) * geo.jstd[i]) * -1.0;
        s.gdot = gdot;
        s.jdot.assign(gr.n, M2{});
        s.gdot_linf = linf_norm_sym2(gr, gdot, s.g);
        s.gdot_l2 = l2_norm_sym2(gr, gdot, s.g);
        tr.samples.push_back(std::move(s));
    };
    auto guard = [&](Trajectory& tr, double, const Y& y) {
        bool pos = true;
        for (int i = 0; i < gr.n; ++i)
            if (!(y.w.comp[i] > 0.0) || !std::isfinite(y.w.comp[i])) pos = false;
        if (!pos) {
            tr.status = RunStatus::PositivityLoss;
            return false;
        }
        return true;
    };
    return detail::run_rk4(Formulation::BackwardKRF_gauged, spec, std::move(y0), rhs, axpy,
                           record, guard);
}

/// Closed-form family g_t = -Ric_J(Omega) J + (g0 + Ric_J(Omega) J) e^{-t}.
inline TensorField baby_closed_form(const Geometry& geo, const TensorField& g0,
                                    const VolumeForm& vol, const ComplexStructureField& j,
                                    double t) {
    const TwoFormField ric = ricci_form(geo, vol, g0, j);
    TensorField out(geo.grid.n);
    const double decay = std::exp(-t);
    for (int i = 0; i < geo.grid.n; ++i) {
        const M2 target = (M2::two_form(ric.comp[i]) * j[i]) * -1.0;
        out[i] = target + (g0[i] - target) * decay;
    }
    return out;
}

/// Potential trajectory of a finished run, with the volume-constraint
/// cross-check exp(-f) omega = Omega; drift above tol raises ConsistencyError.
inline std::vector<ScalarField> potential_trajectory(const Geometry& geo, const Trajectory& tr,
                                                     const VolumeForm& vol, double tol = 1e-3) {
    std::vector<ScalarField> out;
    out.reserve(tr.samples.size());
    for (const Sample& s : tr.samples) {
        double worst = 0.0;
        for (int i = 0; i < geo.grid.n; ++i) {
            const double resid =
                std::exp(-s.f[i]) * s.omega.comp[i] / vol.dens[i] - 1.0;
            worst = std::max(worst, std::abs(resid));
        }
        if (worst > tol)
            throw ConsistencyError("potential_trajectory: exp(-f) omega != Omega, drift " +
                                   std::to_string(worst) + " at t = " + std::to_string(s.t));
        out.push_back(s.f);
    }
    return out;
}

} // namespace flowlab
