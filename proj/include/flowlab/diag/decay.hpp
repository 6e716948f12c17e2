#pragma once
// Exponential-rate estimation on trajectory observables and the tail
// extrapolation of the limit complex structure.

#include <cmath>
#include <vector>

#include "flowlab/flow/state.hpp"

namespace flowlab {

struct DecayFit {
    double amplitude = 0.0; ///< C in C exp(-rate t)
    double rate = 0.0;      ///< positive = decay
    double r_squared = 0.0;
    bool no_decay = false;  ///< signal not decaying (or identically ~0)
    bool at_zero = false;   ///< signal below floor everywhere; fit suppressed
};

/// Least-squares fit of log v against t over the tail half of the samples.
inline DecayFit decay_fit(const std::vector<double>& times, const std::vector<double>& values,
                          double floor = 1e-14) {
    DecayFit out;
    const size_t n = times.size();
    if (n < 4) {
        out.no_decay = true;
        return out;
    }
    const size_t start = n / 2;
    std::vector<double> ts, ys;
    for (size_t i = start; i < n; ++i) {
        if (values[i] > floor) {
            ts.push_back(times[i]);
            ys.push_back(std::log(values[i]));
        }
    }
    if (ts.size() < 3) {
        out.no_decay = true;
        out.at_zero = true;
        return out;
    }
    double st = 0, sy = 0, stt = 0, sty = 0;
    for (size_t i = 0; i < ts.size(); ++i) {
        st += ts[i];
        sy += ys[i];
        stt += ts[i] * ts[i];
        sty += ts[i] * ys[i];
    }
    const double m = static_cast<double>(ts.size());
    const double denom = m * stt - st * st;
    if (std::abs(denom) < 1e-30) {
        out.no_decay = true;
        return out;
    }
    const double slope = (m * sty - st * sy) / denom;
    const double icept = (sy - slope * st) / m;
    out.rate = -slope;
    out.amplitude = std::exp(icept);
    double ss_res = 0, ss_tot = 0;
    const double ybar = sy / m;
    for (size_t i = 0; i < ts.size(); ++i) {
        const double fit = icept + slope * ts[i];
        ss_res += (ys[i] - fit) * (ys[i] - fit);
        ss_tot += (ys[i] - ybar) * (ys[i] - ybar);
    }
    out.r_squared = (ss_tot > 0.0) ? 1.0 - ss_res / ss_tot : 1.0;
    out.no_decay = !(out.rate > 0.0);
    return out;
}

struct TrajectoryFits {
    DecayFit gdot;
    DecayFit jdot;
    bool pointwise_bound_ok = true; ///< |dJ/dt|_g <= 2n |(dg/dt)^sharp|_g at every sample
    double pointwise_margin = 0.0;  ///< worst ratio |dJ/dt| / (2n |gdot^sharp|)
    double jnorm_defect = 0.0;      ///< worst | |J|_g^2 - 2n | over samples
};

/// Fits of |dg/dt| and |dJ/dt| plus the pointwise commutator bound and the
/// norm identity |J|^2 = 2n, checked sample by sample.
inline TrajectoryFits trajectory_fits(const Geometry& geo, const Trajectory& tr) {
    const Grid& gr = geo.grid;
    TrajectoryFits out;
    std::vector<double> times, gdots, jdots;
    for (const Sample& s : tr.samples) {
        times.push_back(s.t);
        gdots.push_back(s.gdot_linf);
        jdots.push_back(s.jdot_linf);
        for (int i = 0; i < gr.n; ++i) {
            const double jn = std::sqrt(std::abs(endo_norm_sq(s.jdot[i], s.g[i])));
            const M2 sharp = s.g[i].inverse() * s.gdot[i];
            const double gn = std::sqrt(std::abs(endo_norm_sq(sharp, s.g[i])));
            if (jn > 2.0 * gn + 1e-12) {
                out.pointwise_bound_ok = false;
            }
            if (gn > 1e-13)
                out.pointwise_margin = std::max(out.pointwise_margin, jn / (2.0 * gn));
            const double jnorm = endo_norm_sq(s.j[i], s.g[i]);
            out.jnorm_defect = std::max(out.jnorm_defect, std::abs(jnorm - 2.0));
        }
    }
    out.gdot = decay_fit(times, gdots);
    out.jdot = decay_fit(times, jdots);
    return out;
}

struct JInfinityEstimate {
    ComplexStructureField j_inf;
    double tail_bound = 0.0;    ///< fitted C' exp(-rate T)
    double change_from_last = 0.0;
    double jsq_defect = 0.0;
    double compat_defect = 0.0;
    bool valid = false;         ///< false when the signal does not decay
};

/// Trapezoid time integration of dJ/dt over the samples plus an
/// exponential-tail extrapolation from the fitted rate. Refuses when the
/// |dJ/dt| signal is not decaying.
inline JInfinityEstimate jinfinity_estimate(const Geometry& geo, const Trajectory& tr) {
    const Grid& gr = geo.grid;
    JInfinityEstimate out;
    if (tr.samples.size() < 2) return out;

    std::vector<double> times, jdots;
    for (const Sample& s : tr.samples) {
        times.push_back(s.t);
        jdots.push_back(s.jdot_linf);
    }
    const DecayFit fit = decay_fit(times, jdots);
    const Sample& last = tr.samples.back();

    if (fit.at_zero) {
        // J never moved: the limit is the final (= initial) structure
        out.j_inf = last.j;
        out.valid = true;
    } else if (fit.no_decay) {
        out.valid = false;
        return out;
    } else {
        // J_inf = J_0 + int dJ/dt: trapezoid over samples, then the fitted
        // exponential tail continued from the final velocity
        TensorField acc = tr.samples.front().j;
        for (size_t k = 0; k + 1 < tr.samples.size(); ++k) {
            const double dt = tr.samples[k + 1].t - tr.samples[k].t;
            for (int i = 0; i < gr.n; ++i)
                acc[i] += (tr.samples[k].jdot[i] + tr.samples[k + 1].jdot[i]) * (0.5 * dt);
        }
        for (int i = 0; i < gr.n; ++i) acc[i] += last.jdot[i] * (1.0 / fit.rate);
        out.j_inf = std::move(acc);
        out.tail_bound = fit.amplitude * std::exp(-fit.rate * last.t) / fit.rate;
        out.valid = true;
    }
    double worst = 0.0;
    for (int i = 0; i < gr.n; ++i)
        worst = std::max(worst, (out.j_inf[i] - last.j[i]).frobenius());
    out.change_from_last = worst;
    out.jsq_defect = jsq_defect(gr, out.j_inf);
    out.compat_defect = compat_defect(gr, last.g, out.j_inf);
    return out;
}

} // namespace flowlab
