#pragma once
// Discretization substrate for the S^1-symmetric 2-sphere in the conformal
// coordinate s = log tan(x/2): uniform nodes on [-S_max, S_max], trapezoid
// quadrature with pole-tail compensation folded into the end weights, and
// the value-typed field containers every operator works on.
//
// Quadrature note: a 2-form with component c(s) ds^dtheta that extends
// smoothly over the poles carries mass 2 pi * int c ds over the full line;
// the truncated trapezoid sum misses int_{|s|>S_max} c. For pole-regular
// fields c ~ c(S_max) cosh^2(S_max) sech^2(s) out there, so adding
// (1 - tanh S_max) cosh^2(S_max) to each end weight restores the tail to
// round-off for the entire smooth class. Without it the round sphere's own
// area comes out short by ~1e-5 at S_max = 6 and every mass-conservation
// statement inherits that bias.

#include <cmath>
#include <cstddef>
#include <vector>

#include "flowlab/core/errors.hpp"
#include "flowlab/core/mat2.hpp"

namespace flowlab {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTotalMass = 4.0 * kPi; ///< mass of every normalized volume form on CP^1

struct Grid {
    double s_max = 6.0;
    int n = 801;
    double h = 0.0;
    std::vector<double> s;  ///< nodes, uniform
    std::vector<double> w;  ///< quadrature weights (trapezoid + pole tail at ends)
    std::vector<double> t;  ///< tanh(s_i), cached
    std::vector<double> sech2; ///< sech^2(s_i), cached
    // 3-point differentiation weights for d/dT on the tanh-image of the grid;
    // dw0 multiplies node i0[i], dw2 node i0[i]+2; the middle weight is
    // implied by exact annihilation of constants.
    std::vector<int> d_i0;
    std::vector<double> dw0, dw2;

    Grid() { init(6.0, 801); }
    Grid(double smax, int nodes) { init(smax, nodes); }

    void init(double smax, int nodes) {
        if (nodes < 5 || nodes % 2 == 0)
            throw ConfigError("N", "grid needs an odd node count >= 5");
        if (smax <= 0.0) throw ConfigError("S_max", "grid half-width must be positive");
        s_max = smax;
        n = nodes;
        h = 2.0 * s_max / static_cast<double>(n - 1);
        s.resize(n);
        w.assign(n, h);
        t.resize(n);
        sech2.resize(n);
        for (int i = 0; i < n; ++i) {
            s[i] = -s_max + h * static_cast<double>(i);
            t[i] = std::tanh(s[i]);
            const double c = std::cosh(s[i]);
            sech2[i] = 1.0 / (c * c);
        }
        s[(n - 1) / 2] = 0.0; // kill the rounding residue at the center node
        t[(n - 1) / 2] = 0.0;
        sech2[(n - 1) / 2] = 1.0;
        const double tail = (1.0 - std::tanh(s_max)) * std::cosh(s_max) * std::cosh(s_max);
        w.front() = 0.5 * h + tail;
        w.back() = 0.5 * h + tail;

        // d/dT stencils: centered triples inside, one-sided at the ends.
        // Derivatives in s then follow from the exact chain rule
        // d/ds = sech^2(s) d/dT, which keeps every truncation error
        // pole-suppressed for fields that are smooth across the poles.
        // T-differences near the poles cancel catastrophically, so they are
        // evaluated through tanh(a) - tanh(b) = sinh(a-b) sech(a) sech(b).
        std::vector<double> sech(n);
        for (int i = 0; i < n; ++i) sech[i] = 1.0 / std::cosh(s[i]);
        auto tdiff = [&](int i, int j) {
            return std::sinh(static_cast<double>(i - j) * h) * sech[i] * sech[j];
        };
        d_i0.resize(n);
        dw0.resize(n);
        dw2.resize(n);
        for (int i = 0; i < n; ++i) {
            const int i0 = (i == 0) ? 0 : (i == n - 1 ? n - 3 : i - 1);
            d_i0[i] = i0;
            const int a = i0, b = i0 + 1, c = i0 + 2;
            dw0[i] = (tdiff(i, b) + tdiff(i, c)) / (tdiff(a, b) * tdiff(a, c));
            dw2[i] = (tdiff(i, a) + tdiff(i, b)) / (tdiff(c, a) * tdiff(c, b));
        }
    }

    int center() const { return (n - 1) / 2; }
};

using ScalarField = std::vector<double>;
using TensorField = std::vector<M2>; ///< symmetric 2-tensors or endomorphisms, per node

/// Complex structure field; J^2 = -I nodewise within tol_alg.
using ComplexStructureField = TensorField;

/// 2-form field stored through its single component: form = comp ds^dtheta,
/// operator matrix = comp * [[0,-1],[1,0]].
struct TwoFormField {
    ScalarField comp;
};

/// Positive density relative to ds^dtheta, normalized so the quadrature
/// mass 2 pi sum w_i dens_i equals 4 pi.
struct VolumeForm {
    ScalarField dens;

    double mass(const Grid& g) const {
        double m = 0.0;
        for (int i = 0; i < g.n; ++i) m += g.w[i] * dens[i];
        return 2.0 * kPi * m;
    }

    void normalize(const Grid& g) {
        const double m = mass(g);
        if (!(m > 0.0)) throw NotFano("VolumeForm::normalize: non-positive mass");
        const double f = kTotalMass / m;
        for (double& d : dens) d *= f;
    }
};

inline double form_mass(const Grid& g, const TwoFormField& w) {
    double m = 0.0;
    for (int i = 0; i < g.n; ++i) m += g.w[i] * w.comp[i];
    return 2.0 * kPi * m;
}

// --- reference geometry ------------------------------------------------------

/// Round metric sech^2(s) I in the (d_s, d_theta) frame.
inline TensorField round_metric(const Grid& g) {
    TensorField out(g.n);
    for (int i = 0; i < g.n; ++i) out[i] = M2::identity() * g.sech2[i];
    return out;
}

inline ComplexStructureField standard_j(const Grid& g) {
    return ComplexStructureField(g.n, M2::j_std());
}

/// Volume form of the round metric, quadrature-normalized to mass 4 pi.
inline VolumeForm round_volume(const Grid& g) {
    VolumeForm v;
    v.dens = g.sech2;
    v.normalize(g);
    return v;
}

/// e^{-c tanh s} dV_round, normalized. Fano positivity needs |c| < 1.
inline VolumeForm tanh_volume(const Grid& g, double c) {
    VolumeForm v;
    v.dens.resize(g.n);
    for (int i = 0; i < g.n; ++i) v.dens[i] = std::exp(-c * g.t[i]) * g.sech2[i];
    v.normalize(g);
    return v;
}

// --- field helpers -----------------------------------------------------------

inline ScalarField sqrt_det(const Grid& g, const TensorField& metric) {
    ScalarField out(g.n);
    for (int i = 0; i < g.n; ++i) {
        const double d = metric[i].det();
        if (!(d > 0.0)) throw InvalidMetric("sqrt_det: non-positive determinant");
        out[i] = std::sqrt(d);
    }
    return out;
}

/// omega = g J as a component field (component = entry (1,0) of the product).
inline TwoFormField omega_of(const Grid& g, const TensorField& metric,
                             const ComplexStructureField& j) {
    TwoFormField w;
    w.comp.resize(g.n);
    for (int i = 0; i < g.n; ++i) {
        const M2 p = metric[i] * j[i];
        w.comp[i] = p.a10;
    }
    return w;
}

/// g = -omega J nodewise.
inline TensorField metric_of(const Grid& g, const TwoFormField& w,
                             const ComplexStructureField& j) {
    TensorField out(g.n);
    for (int i = 0; i < g.n; ++i) out[i] = (M2::two_form(w.comp[i]) * j[i]) * -1.0;
    return out;
}

/// Worst nodewise compatibility defect ||gJ + (gJ)^T||_F.
inline double compat_defect(const Grid& g, const TensorField& metric,
                            const ComplexStructureField& j) {
    double worst = 0.0;
    for (int i = 0; i < g.n; ++i) {
        const M2 w = metric[i] * j[i];
        worst = std::max(worst, (w + w.transposed()).frobenius());
    }
    return worst;
}

/// Worst nodewise ||J^2 + I||_F.
inline double jsq_defect(const Grid& g, const ComplexStructureField& j) {
    double worst = 0.0;
    for (int i = 0; i < g.n; ++i)
        worst = std::max(worst, (j[i] * j[i] + M2::identity()).frobenius());
    return worst;
}

// Weighted L2 norms over the surface; all use the evolving metric's volume
// density and the grid quadrature, with the 2 pi angular factor.

inline double l2_norm_scalar(const Grid& g, const ScalarField& f, const TensorField& metric) {
    double acc = 0.0;
    for (int i = 0; i < g.n; ++i)
        acc += g.w[i] * f[i] * f[i] * std::sqrt(metric[i].det());
    return std::sqrt(2.0 * kPi * acc);
}

inline double l2_norm_sym2(const Grid& g, const TensorField& v, const TensorField& metric) {
    double acc = 0.0;
    for (int i = 0; i < g.n; ++i)
        acc += g.w[i] * sym2_norm_sq(v[i], metric[i]) * std::sqrt(metric[i].det());
    return std::sqrt(2.0 * kPi * acc);
}

inline double l2_norm_endo(const Grid& g, const TensorField& e, const TensorField& metric) {
    double acc = 0.0;
    for (int i = 0; i < g.n; ++i)
        acc += g.w[i] * endo_norm_sq(e[i], metric[i]) * std::sqrt(metric[i].det());
    return std::sqrt(2.0 * kPi * acc);
}

inline double linf_norm_sym2(const Grid& g, const TensorField& v, const TensorField& metric) {
    double worst = 0.0;
    for (int i = 0; i < g.n; ++i)
        worst = std::max(worst, std::sqrt(std::abs(sym2_norm_sq(v[i], metric[i]))));
    return worst;
}

} // namespace flowlab
