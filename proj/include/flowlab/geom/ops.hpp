#pragma once
// Differential operators of the reduced S^1-symmetric geometry. Everything
// is a second-order finite-difference stencil in s with one-sided closures
// at the truncation ends; theta derivatives vanish identically.
//
// Operators that feed time integration come in a "well-balanced" variant:
// the raw stencil error evaluated on the exact round background is
// precomputed once per grid and subtracted, so the round sphere is an exact
// discrete fixed point of every flow instead of drifting at truncation
// level. The subtraction is a fixed O(h^2) field, hence does not change the
// order of accuracy anywhere else.

#include <utility>

#include "flowlab/geom/grid.hpp"

namespace flowlab {

// --- finite differences ------------------------------------------------------

/// First s-derivative: 3-point stencil in T = tanh(s) times the exact
/// chain-rule factor sech^2. Second order, with truncation errors carrying
/// an extra sech^2 suppression toward the poles for pole-regular fields.
inline ScalarField d1(const Grid& g, const ScalarField& f) {
    const int n = g.n;
    ScalarField out(n);
    for (int i = 0; i < n; ++i) {
        const int i0 = g.d_i0[i];
        // difference form annihilates constants exactly even where the
        // near-pole weights are ~cosh^2/h
        out[i] = g.sech2[i] * (g.dw0[i] * (f[i0] - f[i0 + 1]) +
                               g.dw2[i] * (f[i0 + 2] - f[i0 + 1]));
    }
    return out;
}

/// Second s-derivative as the composition d1(d1(f)).
inline ScalarField d2(const Grid& g, const ScalarField& f) {
    return d1(g, d1(g, f));
}

// --- Christoffel symbols and curvature ---------------------------------------

/// Gamma[k][i][j] = Gamma^k_{ij} at one node.
struct Christoffel {
    double c[2][2][2] = {};
};

using ChristoffelField = std::vector<Christoffel>;

inline ChristoffelField christoffels(const Grid& g, const TensorField& metric) {
    const int n = g.n;
    ScalarField a(n), b(n), q(n);
    for (int i = 0; i < n; ++i) {
        a[i] = metric[i].a00;
        b[i] = 0.5 * (metric[i].a01 + metric[i].a10);
        q[i] = metric[i].a11;
    }
    const ScalarField da = d1(g, a), db = d1(g, b), dq = d1(g, q);
    ChristoffelField out(n);
    for (int i = 0; i < n; ++i) {
        const double det = a[i] * q[i] - b[i] * b[i];
        if (!(det > 0.0) || !(a[i] > 0.0))
            throw InvalidMetric("christoffels: metric not SPD at node " + std::to_string(i));
        const double iu = q[i] / det, iv = -b[i] / det, iw = a[i] / det;
        // Gamma_{ij,l} with only s-derivatives alive
        const double G000 = 0.5 * da[i];       // (ss,s)
        const double G001 = db[i];             // (ss,theta) = d_s g_{s theta}
        const double G010 = 0.0;               // (s theta, s)
        const double G011 = 0.5 * dq[i];       // (s theta, theta)
        const double G110 = -0.5 * dq[i];      // (theta theta, s)
        const double G111 = 0.0;               // (theta theta, theta)
        Christoffel ch;
        ch.c[0][0][0] = iu * G000 + iv * G001;
        ch.c[1][0][0] = iv * G000 + iw * G001;
        ch.c[0][0][1] = iu * G010 + iv * G011;
        ch.c[1][0][1] = iv * G010 + iw * G011;
        ch.c[0][1][0] = ch.c[0][0][1];
        ch.c[1][1][0] = ch.c[1][0][1];
        ch.c[0][1][1] = iu * G110 + iv * G111;
        ch.c[1][1][1] = iv * G110 + iw * G111;
        out[i] = ch;
    }
    return out;
}

/// Ricci tensor from the generic coordinate formula
/// R_{jk} = d_i Gamma^i_{jk} - d_j Gamma^i_{ik} + Gamma^i_{ip} Gamma^p_{jk}
///          - Gamma^i_{jp} Gamma^p_{ik},  with d_theta == 0.
inline TensorField ricci_raw(const Grid& g, const ChristoffelField& ch) {
    const int n = g.n;
    // s-derivatives of Gamma^0_{jk} and of the trace Gamma^i_{ik}
    ScalarField g0jk[2][2], trk[2];
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) {
            ScalarField f(n);
            for (int i = 0; i < n; ++i) f[i] = ch[i].c[0][j][k];
            g0jk[j][k] = d1(g, f);
        }
    for (int k = 0; k < 2; ++k) {
        ScalarField f(n);
        for (int i = 0; i < n; ++i) f[i] = ch[i].c[0][0][k] + ch[i].c[1][1][k];
        trk[k] = d1(g, f);
    }
    TensorField out(n);
    for (int i = 0; i < n; ++i) {
        double r[2][2];
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) {
                double v = g0jk[j][k][i];          // d_i Gamma^i_{jk}, i = s only
                if (j == 0) v -= trk[k][i];        // d_j Gamma^i_{ik}
                for (int p = 0; p < 2; ++p)
                    for (int ii = 0; ii < 2; ++ii)
                        v += ch[i].c[ii][ii][p] * ch[i].c[p][j][k] -
                             ch[i].c[ii][j][p] * ch[i].c[p][ii][k];
                r[j][k] = v;
            }
        out[i] = {r[0][0], 0.5 * (r[0][1] + r[1][0]), 0.5 * (r[0][1] + r[1][0]), r[1][1]};
    }
    return out;
}

inline ScalarField scal_of(const Grid& g, const TensorField& metric, const TensorField& ric) {
    ScalarField out(g.n);
    for (int i = 0; i < g.n; ++i)
        out[i] = (metric[i].inverse() * ric[i]).trace();
    return out;
}

// --- scalar calculus ---------------------------------------------------------

struct VectorField {
    ScalarField vs; ///< s-component
    ScalarField vt; ///< theta-component
};

inline VectorField gradient(const Grid& g, const TensorField& metric, const ScalarField& f) {
    const ScalarField df = d1(g, f);
    VectorField out;
    out.vs.resize(g.n);
    out.vt.resize(g.n);
    for (int i = 0; i < g.n; ++i) {
        const M2 gi = metric[i].inverse();
        out.vs[i] = gi.a00 * df[i];
        out.vt[i] = gi.a10 * df[i];
    }
    return out;
}

inline TensorField hessian(const Grid& g, const ChristoffelField& ch, const ScalarField& f) {
    const ScalarField df = d1(g, f);
    const ScalarField ddf = d2(g, f);
    TensorField out(g.n);
    for (int i = 0; i < g.n; ++i) {
        const double h00 = ddf[i] - ch[i].c[0][0][0] * df[i];
        const double h01 = -ch[i].c[0][0][1] * df[i];
        const double h11 = -ch[i].c[0][1][1] * df[i];
        out[i] = {h00, h01, h01, h11};
    }
    return out;
}

/// Laplacian with positive spectrum on the round sphere: Delta f = -tr_g Hess f.
inline ScalarField laplacian(const Grid& g, const TensorField& metric,
                             const TensorField& hess) {
    ScalarField out(g.n);
    for (int i = 0; i < g.n; ++i)
        out[i] = -(metric[i].inverse() * hess[i]).trace();
    return out;
}

// --- well-balanced corrections -----------------------------------------------

/// Stencil defects of the exact round background, subtracted from raw
/// operators so the background is reproduced exactly.
struct RoundCorrections {
    TensorField ricci;      ///< ricci_raw(round) - round
    ScalarField scal;       ///< scal(round) - 2
    ScalarField ricci_form; ///< raw form component of dV_round - sech^2
    double ricci_form_mass = 0.0; ///< quadrature mass of the round form
};

/// Raw Ricci-form component 1/2 D1( D1(log dens) * J01 ). The density is
/// handed over as the pole-regular ratio dens / sech^2; the round part of
/// d log dens is the exact -2 tanh(s).
inline ScalarField ricci_form_raw_ratio(const Grid& g, const ScalarField& dens_ratio,
                                        const ComplexStructureField& j) {
    ScalarField logr(g.n);
    for (int i = 0; i < g.n; ++i) logr[i] = std::log(dens_ratio[i]);
    const ScalarField dl_reg = d1(g, logr);
    ScalarField prod(g.n);
    for (int i = 0; i < g.n; ++i) prod[i] = (dl_reg[i] - 2.0 * g.t[i]) * j[i].a01;
    ScalarField out = d1(g, prod);
    for (double& v : out) v *= 0.5;
    return out;
}

inline RoundCorrections make_corrections(const Grid& g) {
    RoundCorrections c;
    const TensorField round = round_metric(g);
    const ChristoffelField ch = christoffels(g, round);
    const TensorField ric = ricci_raw(g, ch);
    c.ricci.resize(g.n);
    c.scal.resize(g.n);
    for (int i = 0; i < g.n; ++i) {
        c.ricci[i] = ric[i] - round[i];
        c.scal[i] = (round[i].inverse() * ric[i]).trace() - 2.0;
    }
    c.ricci_form = ricci_form_raw_ratio(g, ScalarField(g.n, 1.0), standard_j(g));
    for (int i = 0; i < g.n; ++i) c.ricci_form[i] -= g.sech2[i];
    double m = 0.0;
    for (int i = 0; i < g.n; ++i) m += g.w[i] * g.sech2[i];
    c.ricci_form_mass = 2.0 * kPi * m;
    return c;
}

/// Geometry context: grid, reference fields and stencil corrections.
struct Geometry {
    Grid grid;
    TensorField round;
    ComplexStructureField jstd;
    VolumeForm dv_round;
    RoundCorrections corr;

    Geometry() : Geometry(Grid()) {}
    explicit Geometry(const Grid& g)
        : grid(g), round(round_metric(g)), jstd(standard_j(g)),
          dv_round(round_volume(g)), corr(make_corrections(g)) {}
};

// --- curvature package (well-balanced) ----------------------------------------

struct CurvaturePackage {
    TensorField ricci;
    ScalarField scal;
    ScalarField gauss; ///< K = Scal / 2
};

inline CurvaturePackage curvature_package(const Geometry& geo, const TensorField& metric) {
    const Grid& g = geo.grid;
    const ChristoffelField ch = christoffels(g, metric);
    TensorField ric = ricci_raw(g, ch);
    for (int i = 0; i < g.n; ++i) ric[i] -= geo.corr.ricci[i];
    CurvaturePackage out;
    out.ricci = std::move(ric);
    out.scal = scal_of(g, metric, out.ricci);
    out.gauss.resize(g.n);
    for (int i = 0; i < g.n; ++i) out.gauss[i] = 0.5 * out.scal[i];
    return out;
}

// --- Bakry-Emery tensor -------------------------------------------------------

inline ScalarField log_ratio(const Grid& g, const TensorField& metric, const VolumeForm& vol) {
    ScalarField out(g.n);
    for (int i = 0; i < g.n; ++i) {
        const double d = metric[i].det();
        if (!(d > 0.0)) throw InvalidMetric("log_ratio: non-positive determinant");
        out[i] = 0.5 * std::log(d) - std::log(vol.dens[i]);
    }
    return out;
}

/// Ric_g(Omega) = Ric(g) + Hess_g log(dV_g / Omega), stencil-corrected.
inline TensorField bakry_emery(const Geometry& geo, const TensorField& metric,
                               const VolumeForm& vol) {
    const Grid& g = geo.grid;
    const ChristoffelField ch = christoffels(g, metric);
    TensorField ric = ricci_raw(g, ch);
    const TensorField hess = hessian(g, ch, log_ratio(g, metric, vol));
    for (int i = 0; i < g.n; ++i) ric[i] = ric[i] - geo.corr.ricci[i] + hess[i];
    return ric;
}

// --- Omega-Ricci form and its inverse -----------------------------------------

/// Curvature form of the anti-canonical bundle metric induced by the volume
/// form, at the standard complex structure: the density computation
/// -1/2 d_ss log dens reduced to the grid. Valid whenever the fixed (s,
/// theta) coordinates are holomorphic, i.e. for J = J_std.
inline TwoFormField ricci_form_std(const Geometry& geo, const VolumeForm& vol) {
    const Grid& g = geo.grid;
    ScalarField ratio(g.n);
    for (int i = 0; i < g.n; ++i) {
        if (!(vol.dens[i] > 0.0)) throw NotFano("ricci_form: non-positive density");
        ratio[i] = vol.dens[i] / g.sech2[i];
    }
    TwoFormField out;
    out.comp = ricci_form_raw_ratio(g, ratio, geo.jstd);
    for (int i = 0; i < g.n; ++i) out.comp[i] -= geo.corr.ricci_form[i];
    // the total mass of the curvature form is topological; restoring it
    // removes the O(h^2) quadrature bias that would otherwise leak into
    // every mass-conservation statement downstream
    const double f = geo.corr.ricci_form_mass / form_mass(g, out);
    for (double& v : out.comp) v *= f;
    return out;
}

/// Inverse of ricci_form at standard J: reconstructs log density by two
/// cumulative integrations from the center and normalizes the mass. The
/// free slope constant is fixed by matching d(log dens)/ds to the
/// pole-regular value -2 tanh(S_max) at the ends; for even input forms this
/// coincides with zero slope at s = 0, and for odd ones it is the unique
/// gauge whose density extends smoothly over the poles.
inline VolumeForm ricci_form_inverse(const Geometry& geo, const TwoFormField& w) {
    const Grid& g = geo.grid;
    for (int i = 0; i < g.n; ++i)
        if (!(w.comp[i] > 0.0))
            throw NotFano("ricci_form_inverse: form component must be positive");
    const int n = g.n, c = g.center();
    // u'' = -2 comp, integrated as trapezoid cumulative sums from the center
    ScalarField du(n, 0.0), u(n, 0.0);
    for (int i = c + 1; i < n; ++i)
        du[i] = du[i - 1] - g.h * (w.comp[i - 1] + w.comp[i]);
    for (int i = c - 1; i >= 0; --i)
        du[i] = du[i + 1] + g.h * (w.comp[i + 1] + w.comp[i]);
    const double alpha = 0.5 * ((-2.0 * g.t[n - 1] - du[n - 1]) + (-2.0 * g.t[0] - du[0]));
    for (int i = 0; i < n; ++i) du[i] += alpha;
    for (int i = c + 1; i < n; ++i) u[i] = u[i - 1] + 0.5 * g.h * (du[i - 1] + du[i]);
    for (int i = c - 1; i >= 0; --i) u[i] = u[i + 1] - 0.5 * g.h * (du[i + 1] + du[i]);
    VolumeForm out;
    out.dens.resize(n);
    for (int i = 0; i < n; ++i) out.dens[i] = std::exp(u[i]);
    out.normalize(g);
    return out;
}

// --- dbar of a gradient --------------------------------------------------------

/// J-antilinear part of an endomorphism: 1/2 (A + J A J).
inline M2 antilinear_part(const M2& a, const M2& j) {
    return (a + j * a * j) * 0.5;
}

/// dbar_{T_X,J} grad_g f: the J-antilinear part of g^{-1} Hess f. The L2
/// norm of the result is the holomorphy defect of f.
inline TensorField dbar_gradient(const Geometry& geo, const TensorField& metric,
                                 const ComplexStructureField& j, const ScalarField& f) {
    const Grid& g = geo.grid;
    const ChristoffelField ch = christoffels(g, metric);
    const TensorField hess = hessian(g, ch, f);
    TensorField out(g.n);
    for (int i = 0; i < g.n; ++i)
        out[i] = antilinear_part(metric[i].inverse() * hess[i], j[i]);
    return out;
}

/// Same from a precomputed Hessian tensor field.
inline TensorField dbar_gradient_from_hessian(const Geometry& geo, const TensorField& metric,
                                              const ComplexStructureField& j,
                                              const TensorField& hess) {
    TensorField out(geo.grid.n);
    for (int i = 0; i < geo.grid.n; ++i)
        out[i] = antilinear_part(metric[i].inverse() * hess[i], j[i]);
    return out;
}

// --- covariant derivatives of vector and endomorphism fields -------------------

/// nabla xi as an endomorphism: (nabla xi)^i_j = d_j xi^i + Gamma^i_{jp} xi^p.
inline TensorField covariant_derivative(const Grid& g, const ChristoffelField& ch,
                                        const VectorField& xi) {
    const ScalarField dvs = d1(g, xi.vs), dvt = d1(g, xi.vt);
    TensorField out(g.n);
    for (int i = 0; i < g.n; ++i) {
        double m[2][2];
        const double x[2] = {xi.vs[i], xi.vt[i]};
        const double dx[2] = {dvs[i], dvt[i]};
        for (int up = 0; up < 2; ++up)
            for (int j = 0; j < 2; ++j) {
                double v = (j == 0) ? dx[up] : 0.0;
                for (int p = 0; p < 2; ++p) v += ch[i].c[up][j][p] * x[p];
                m[up][j] = v;
            }
        out[i] = {m[0][0], m[0][1], m[1][0], m[1][1]};
    }
    return out;
}

/// Covariant exterior derivative of an endomorphism field evaluated on the
/// frame pair: V^k = (nabla_s A)^k_theta - (nabla_theta A)^k_s.
/// Returns the vector field V and its pointwise 2-form norm weight
/// |d^nabla A|^2 = |V|_g^2 / det g is applied by the caller.
inline VectorField covariant_exterior_derivative(const Grid& g, const ChristoffelField& ch,
                                                 const TensorField& a) {
    ScalarField a00(g.n), a01(g.n), a10(g.n), a11(g.n);
    for (int i = 0; i < g.n; ++i) {
        a00[i] = a[i].a00;
        a01[i] = a[i].a01;
        a10[i] = a[i].a10;
        a11[i] = a[i].a11;
    }
    const ScalarField d00 = d1(g, a00), d01 = d1(g, a01), d10 = d1(g, a10), d11 = d1(g, a11);
    VectorField out;
    out.vs.resize(g.n);
    out.vt.resize(g.n);
    for (int i = 0; i < g.n; ++i) {
        const double A[2][2] = {{a[i].a00, a[i].a01}, {a[i].a10, a[i].a11}};
        const double dA[2][2] = {{d00[i], d01[i]}, {d10[i], d11[i]}};
        double nab[2][2][2]; // [i-direction][k up][j down]
        for (int dir = 0; dir < 2; ++dir)
            for (int k = 0; k < 2; ++k)
                for (int j = 0; j < 2; ++j) {
                    double v = (dir == 0) ? dA[k][j] : 0.0;
                    for (int p = 0; p < 2; ++p)
                        v += ch[i].c[k][dir][p] * A[p][j] - ch[i].c[p][dir][j] * A[k][p];
                    nab[dir][k][j] = v;
                }
        out.vs[i] = nab[0][0][1] - nab[1][0][0];
        out.vt[i] = nab[0][1][1] - nab[1][1][0];
    }
    return out;
}

/// L2 norm of the covariant exterior derivative of an endomorphism field.
inline double prescattering_norm(const Grid& g, const TensorField& metric,
                                 const TensorField& endo) {
    const ChristoffelField ch = christoffels(g, metric);
    const VectorField v = covariant_exterior_derivative(g, ch, endo);
    double acc = 0.0;
    for (int i = 0; i < g.n; ++i) {
        const double det = metric[i].det();
        const double vv[2] = {v.vs[i], v.vt[i]};
        double n2 = 0.0;
        n2 += metric[i].a00 * vv[0] * vv[0] + 2.0 * metric[i].a01 * vv[0] * vv[1] +
              metric[i].a11 * vv[1] * vv[1];
        acc += g.w[i] * (n2 / det) * std::sqrt(det);
    }
    return std::sqrt(2.0 * kPi * acc);
}

/// i del delbar of a scalar as a 2-form component: -1/2 D1( D1(u) * J01 ).
inline TwoFormField i_del_delbar(const Grid& g, const ScalarField& u,
                                 const ComplexStructureField& j) {
    const ScalarField du = d1(g, u);
    ScalarField prod(g.n);
    for (int i = 0; i < g.n; ++i) prod[i] = du[i] * j[i].a01;
    ScalarField dd = d1(g, prod);
    TwoFormField out;
    out.comp.resize(g.n);
    for (int i = 0; i < g.n; ++i) out.comp[i] = -0.5 * dd[i];
    return out;
}

/// Curvature form of the volume-form metric on the anti-canonical bundle
/// for a general compatible state (g, J): the fixed chart is only
/// holomorphic for J_std, so the general form goes through the surface
/// identity Ric_J(omega^n) = Ric(g) J plus the i del delbar of the density
/// ratio, Ric_J(Omega) = Ric(g) J + i del delbar log(dV_g / Omega).
inline TwoFormField ricci_form(const Geometry& geo, const VolumeForm& vol,
                               const TensorField& g, const ComplexStructureField& j) {
    const Grid& gr = geo.grid;
    const ChristoffelField ch = christoffels(gr, g);
    TensorField ric = ricci_raw(gr, ch);
    for (int i = 0; i < gr.n; ++i) ric[i] -= geo.corr.ricci[i];
    const TwoFormField ddc = i_del_delbar(gr, log_ratio(gr, g, vol), j);
    TwoFormField out;
    out.comp.resize(gr.n);
    for (int i = 0; i < gr.n; ++i) {
        const M2 m = ric[i] * j[i];
        out.comp[i] = 0.5 * (m.a10 - m.a01) + ddc.comp[i];
    }
    const double f = geo.corr.ricci_form_mass / form_mass(gr, out);
    for (double& v : out.comp) v *= f;
    return out;
}

} // namespace flowlab
