#pragma once
// Gauge diffeomorphism flow: in the symmetric reduction the map Phi_t is a
// monotone reparametrization of s per time, integrated as particles seeded
// at the nodes with velocity -1/2 (grad_g f)^s. Pullbacks of scalar,
// metric, form and complex-structure fields go through cubic interpolation
// and the chain rule with dPhi/ds.

#include <algorithm>

#include "flowlab/flow/state.hpp"

namespace flowlab {

/// 4-point Lagrange interpolation of a nodal field at an off-grid point;
/// clamped linear extension outside the grid.
inline double interp_cubic(const Grid& g, const ScalarField& f, double x) {
    const int n = g.n;
    if (x <= g.s.front())
        return f[0] + (f[1] - f[0]) / g.h * (x - g.s.front());
    if (x >= g.s.back())
        return f[n - 1] + (f[n - 1] - f[n - 2]) / g.h * (x - g.s.back());
    int i = static_cast<int>((x - g.s.front()) / g.h);
    i = std::clamp(i, 0, n - 2);
    int i0 = std::clamp(i - 1, 0, n - 4);
    const double x0 = g.s[i0], x1 = g.s[i0 + 1], x2 = g.s[i0 + 2], x3 = g.s[i0 + 3];
    const double f0 = f[i0], f1 = f[i0 + 1], f2 = f[i0 + 2], f3 = f[i0 + 3];
    const double l0 = (x - x1) * (x - x2) * (x - x3) / ((x0 - x1) * (x0 - x2) * (x0 - x3));
    const double l1 = (x - x0) * (x - x2) * (x - x3) / ((x1 - x0) * (x1 - x2) * (x1 - x3));
    const double l2 = (x - x0) * (x - x1) * (x - x3) / ((x2 - x0) * (x2 - x1) * (x2 - x3));
    const double l3 = (x - x0) * (x - x1) * (x - x2) / ((x3 - x0) * (x3 - x1) * (x3 - x2));
    return f0 * l0 + f1 * l1 + f2 * l2 + f3 * l3;
}

struct GaugeFlow {
    std::vector<double> times;
    std::vector<ScalarField> phi;     ///< particle position per node per sample
    std::vector<ScalarField> phi_inv; ///< numerical inverse map per sample
};

namespace detail {

/// s-component of -1/2 grad_g f at the nodes.
inline ScalarField gauge_velocity(const Grid& gr, const TensorField& g, const ScalarField& f) {
    const ScalarField df = d1(gr, f);
    ScalarField v(gr.n);
    for (int i = 0; i < gr.n; ++i) v[i] = -0.5 * g[i].inverse().a00 * df[i];
    return v;
}

/// Invert a monotone nodal map by bisection + Newton on the interpolant.
inline ScalarField invert_monotone(const Grid& gr, const ScalarField& phi) {
    ScalarField inv(gr.n);
    for (int i = 0; i < gr.n; ++i) {
        const double target = gr.s[i];
        double lo = gr.s.front(), hi = gr.s.back();
        if (target <= phi.front()) {
            inv[i] = gr.s.front();
            continue;
        }
        if (target >= phi.back()) {
            inv[i] = gr.s.back();
            continue;
        }
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (interp_cubic(gr, phi, mid) < target)
                lo = mid;
            else
                hi = mid;
        }
        inv[i] = 0.5 * (lo + hi);
    }
    return inv;
}

} // namespace detail

/// Integrate the particle map along a recorded trajectory. One RK4 step per
/// sample interval with the velocity field interpolated linearly in time.
inline GaugeFlow diffeo_gauge_flow(const Geometry& geo, const Trajectory& tr) {
    const Grid& gr = geo.grid;
    GaugeFlow out;
    if (tr.samples.empty()) return out;

    std::vector<ScalarField> vel(tr.samples.size());
    for (size_t k = 0; k < tr.samples.size(); ++k)
        vel[k] = detail::gauge_velocity(gr, tr.samples[k].g, tr.samples[k].f);

    ScalarField pos(gr.n);
    for (int i = 0; i < gr.n; ++i) pos[i] = gr.s[i];
    out.times.push_back(tr.samples[0].t);
    out.phi.push_back(pos);
    out.phi_inv.push_back(pos);

    for (size_t k = 0; k + 1 < tr.samples.size(); ++k) {
        const double t0 = tr.samples[k].t, t1 = tr.samples[k + 1].t;
        const double dt = t1 - t0;
        auto v_at = [&](double theta, double x) {
            const double a = interp_cubic(gr, vel[k], x);
            const double b = interp_cubic(gr, vel[k + 1], x);
            return (1.0 - theta) * a + theta * b;
        };
        ScalarField next(gr.n);
        for (int i = 0; i < gr.n; ++i) {
            const double x = pos[i];
            const double k1 = v_at(0.0, x);
            const double k2 = v_at(0.5, x + 0.5 * dt * k1);
            const double k3 = v_at(0.5, x + 0.5 * dt * k2);
            const double k4 = v_at(1.0, x + dt * k3);
            next[i] = x + dt / 6.0 * (k1 + 2.0 * (k2 + k3) + k4);
        }
        for (int i = 0; i + 1 < gr.n; ++i)
            if (!(next[i + 1] > next[i]))
                throw GaugeFoldError("diffeo_gauge_flow: map lost monotonicity", t1);
        pos = std::move(next);
        out.times.push_back(t1);
        out.phi.push_back(pos);
        out.phi_inv.push_back(detail::invert_monotone(gr, pos));
    }
    return out;
}

// --- pullbacks through a map given by nodal positions --------------------------

/// dPhi/ds at the nodes; the displacement is differentiated so the identity
/// part does not fight the tanh-variable stencils.
inline ScalarField map_derivative(const Grid& gr, const ScalarField& phi) {
    ScalarField disp(gr.n);
    for (int i = 0; i < gr.n; ++i) disp[i] = phi[i] - gr.s[i];
    ScalarField dd = d1(gr, disp);
    for (int i = 0; i < gr.n; ++i) dd[i] += 1.0;
    return dd;
}

inline ScalarField pullback_scalar(const Grid& gr, const ScalarField& phi, const ScalarField& u) {
    ScalarField out(gr.n);
    for (int i = 0; i < gr.n; ++i) out[i] = interp_cubic(gr, u, phi[i]);
    return out;
}

/// (Phi^* h)(x) = dPhi(x)^T h(Phi x) dPhi(x) with dPhi = diag(phi', 1).
inline TensorField pullback_sym2(const Grid& gr, const ScalarField& phi, const TensorField& h) {
    const ScalarField dphi = map_derivative(gr, phi);
    ScalarField h00(gr.n), h01(gr.n), h11(gr.n);
    for (int i = 0; i < gr.n; ++i) {
        h00[i] = h[i].a00;
        h01[i] = 0.5 * (h[i].a01 + h[i].a10);
        h11[i] = h[i].a11;
    }
    TensorField out(gr.n);
    for (int i = 0; i < gr.n; ++i) {
        const double p = dphi[i];
        const double a = interp_cubic(gr, h00, phi[i]) * p * p;
        const double b = interp_cubic(gr, h01, phi[i]) * p;
        const double q = interp_cubic(gr, h11, phi[i]);
        out[i] = {a, b, b, q};
    }
    return out;
}

/// Pullback of a 2-form component: (Phi^* w)(x) = w(Phi x) phi'(x).
inline TwoFormField pullback_form(const Grid& gr, const ScalarField& phi, const TwoFormField& w) {
    const ScalarField dphi = map_derivative(gr, phi);
    TwoFormField out;
    out.comp.resize(gr.n);
    for (int i = 0; i < gr.n; ++i)
        out.comp[i] = interp_cubic(gr, w.comp, phi[i]) * dphi[i];
    return out;
}

/// Pullback of an endomorphism: dPhi^{-1} J(Phi x) dPhi.
inline TensorField pullback_endo(const Grid& gr, const ScalarField& phi, const TensorField& j) {
    const ScalarField dphi = map_derivative(gr, phi);
    ScalarField j00(gr.n), j01(gr.n), j10(gr.n), j11(gr.n);
    for (int i = 0; i < gr.n; ++i) {
        j00[i] = j[i].a00;
        j01[i] = j[i].a01;
        j10[i] = j[i].a10;
        j11[i] = j[i].a11;
    }
    TensorField out(gr.n);
    for (int i = 0; i < gr.n; ++i) {
        const double p = dphi[i];
        out[i] = {interp_cubic(gr, j00, phi[i]), interp_cubic(gr, j01, phi[i]) / p,
                  interp_cubic(gr, j10, phi[i]) * p, interp_cubic(gr, j11, phi[i])};
    }
    return out;
}

} // namespace flowlab
