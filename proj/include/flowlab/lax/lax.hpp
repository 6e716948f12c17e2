#pragma once
// Commutator ODE for complex structures, 2 dJ/dt = J A - A J with A the
// sharp of the metric velocity. For constant A the exact solution is the
// conjugation exp(-tA/2) J0 exp(tA/2); for arbitrary paths a fixed-step
// classical Runge-Kutta integrator tracks the drift of the algebraic
// constraints J^2 = -I and (J)^T_g = -J, which the flow preserves exactly
// in the continuum.

#include <functional>
#include <utility>
#include <vector>

#include "flowlab/tensor/ops.hpp"

namespace flowlab {

/// Right-hand side 1/2 (J A - A J).
inline Mat lax_rhs(const Mat& j, const Mat& a) {
    return commutator(j, a) * 0.5;
}

/// Exact solution for a constant generator: exp(-tA/2) J0 exp(tA/2).
inline Mat conjugation_solution(const Mat& j0, const Mat& a, double t) {
    const Mat em = expm(a * (-0.5 * t));
    const Mat ep = expm(a * (0.5 * t));
    return em * j0 * ep;
}

/// Time-dependent generator path together with the metric path used for
/// transpose checks.
struct LaxPath {
    std::function<Mat(double)> a;       ///< t -> gdot sharp
    std::function<Mat(double)> g;       ///< t -> metric
    double horizon = 10.0;
    double step = 1e-3;
};

struct LaxSample {
    double t;
    Mat j;
    double sq_defect;   ///< ||J^2 + I||_F
    double anti_defect; ///< ||(J)^T_g + J||_F
};

/// Both preservation defects of a (J, g) pair.
inline std::pair<double, double> preservation_defects(const Mat& j, const Mat& g) {
    require_spd(g, "preservation_defects");
    return {complex_structure_defect(j), g_antisymmetry_defect(j, g)};
}

struct LaxOptions {
    int sample_stride = 100;       ///< record every k-th step (plus endpoints)
    double divergence_tol = 1e-4;  ///< defect level treated as blow-up
    bool stabilize = false;        ///< optional J <- J (-J^2)^{-1/2} per step
};

/// RK4 trajectory of the commutator ODE. Throws DivergenceError with the
/// first bad time once a preservation defect passes the divergence
/// tolerance.
inline std::vector<LaxSample> integrate_lax(const Mat& j0, const LaxPath& path,
                                            const LaxOptions& opt = {}) {
    {
        const Mat g0 = path.g(0.0);
        const double d0 = std::max(complex_structure_defect(j0),
                                   g_antisymmetry_defect(j0, g0));
        if (d0 > kTolAlg * 10.0 * (1.0 + j0.frobenius()))
            throw CompatibilityError("integrate_lax: initial data violates constraints", d0);
    }
    const double h = path.step;
    const long nsteps = static_cast<long>(std::llround(path.horizon / h));
    std::vector<LaxSample> out;
    out.reserve(static_cast<size_t>(nsteps / std::max(1, opt.sample_stride)) + 2);

    Mat j = j0;
    auto record = [&](long k) {
        const double t = static_cast<double>(k) * h;
        const Mat g = path.g(t);
        const double sq = complex_structure_defect(j);
        const double an = g_antisymmetry_defect(j, g);
        out.push_back({t, j, sq, an});
        if (!j.is_finite() || sq > opt.divergence_tol || an > opt.divergence_tol)
            throw DivergenceError("integrate_lax: constraint defect blew up", t);
    };
    record(0);
    for (long k = 0; k < nsteps; ++k) {
        const double t = static_cast<double>(k) * h;
        const Mat a1 = path.a(t);
        const Mat a2 = path.a(t + 0.5 * h);
        const Mat a4 = path.a(t + h);
        const Mat k1 = lax_rhs(j, a1);
        const Mat k2 = lax_rhs(j + k1 * (0.5 * h), a2);
        const Mat k3 = lax_rhs(j + k2 * (0.5 * h), a2);
        const Mat k4 = lax_rhs(j + k3 * h, a4);
        j += (k1 + (k2 + k3) * 2.0 + k4) * (h / 6.0);
        if (opt.stabilize) {
            Mat jsq = j * j;
            jsq *= -1.0;
            j = j * inv_sqrt_spd(jsq);
        }
        if ((k + 1) % std::max(1, opt.sample_stride) == 0 || k + 1 == nsteps) record(k + 1);
    }
    return out;
}

/// Path with a constant generator A: the metric it transports is
/// g(t) = g0 exp(tA), for which A is g-self-adjoint at every time.
inline LaxPath constant_path(const Mat& a, double horizon, double step) {
    LaxPath p;
    p.a = [a](double) { return a; };
    p.g = [a](double t) { return expm(a * t); };
    p.horizon = horizon;
    p.step = step;
    return p;
}

struct RandomLaxCase {
    LaxPath path;
    Mat j0; ///< compatible with path.g(0)
};

/// Smooth random path built from a frame family B(t) = I + B0 + B1 sin(w1 t)
/// + B2 cos(w2 t): the metric is g = B^T B and the generator is the sharp of
/// its analytic velocity, A = g^{-1} (Bdot^T B + B^T Bdot). A(t) is
/// g(t)-self-adjoint by construction, as the preservation lemma requires;
/// the bundled initial structure is B(0)^{-1} J_std B(0).
inline RandomLaxCase random_smooth_path(SplitMix64& rng, int dim, double horizon, double step,
                                        double scale = 0.9) {
    // per-entry amplitude keeps || B - I ||_inf below 1 for every t
    const double amp = scale / (3.0 * static_cast<double>(dim));
    Mat b0(dim), b1(dim), b2(dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            b0(i, j) = rng.uniform(-amp, amp);
            b1(i, j) = rng.uniform(-amp, amp);
            b2(i, j) = rng.uniform(-amp, amp);
        }
    const double w1 = rng.uniform(5.0, 9.0);
    const double w2 = rng.uniform(5.0, 9.0);
    auto frame = [b0, b1, b2, w1, w2, dim](double t) {
        return Mat::identity(dim) + b0 + b1 * std::sin(w1 * t) + b2 * std::cos(w2 * t);
    };
    auto frame_dot = [b1, b2, w1, w2](double t) {
        return b1 * (w1 * std::cos(w1 * t)) - b2 * (w2 * std::sin(w2 * t));
    };
    LaxPath p;
    p.a = [frame, frame_dot](double t) {
        const Mat b = frame(t);
        const Mat bd = frame_dot(t);
        const Mat g = b.transposed() * b;
        const Mat gd = bd.transposed() * b + b.transposed() * bd;
        return g.inverse() * gd;
    };
    p.g = [frame](double t) {
        const Mat b = frame(t);
        return b.transposed() * b;
    };
    p.horizon = horizon;
    p.step = step;
    const Mat b0m = frame(0.0);
    return {p, b0m.inverse() * j_standard(dim) * b0m};
}

} // namespace flowlab
