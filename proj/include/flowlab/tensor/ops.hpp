#pragma once
// Pointwise linear algebra on a 2n-dimensional tangent space: musical
// isomorphisms, the omega = g J dictionary, type decomposition relative to
// an almost complex structure, and g-norms of endomorphisms.
//
// Conventions: g, J, omega are plain matrices in a fixed frame. The
// symplectic form is the matrix product omega = g J and the metric is
// recovered as g = -omega J. The g-transpose of an endomorphism A is
// (A)^T_g = g^{-1} A^T g.

#include "flowlab/core/errors.hpp"
#include "flowlab/core/mat.hpp"
#include "flowlab/core/rng.hpp"

namespace flowlab {

constexpr double kTolAlg = 1e-10;

inline Mat g_transpose(const Mat& a, const Mat& g) {
    return g.inverse() * a.transposed() * g;
}

inline void require_spd(const Mat& g, const char* who) {
    if (!is_spd(g)) throw InvalidMetric(std::string(who) + ": metric is not SPD");
}

/// Defect of J as a complex structure: ||J^2 + I||_F.
inline double complex_structure_defect(const Mat& j) {
    return (j * j + Mat::identity(j.dim())).frobenius();
}

/// Defect of g-antisymmetry: ||(J)^T_g + J||_F.
inline double g_antisymmetry_defect(const Mat& j, const Mat& g) {
    return (g_transpose(j, g) + j).frobenius();
}

/// Raise the first slot of a symmetric 2-tensor: v |-> g^{-1} v.
inline Mat musical_sharp(const Mat& g, const Mat& v) {
    require_spd(g, "musical_sharp");
    return g.inverse() * v;
}

/// omega = g J. Requires the pair to be compatible within tol_alg.
inline Mat omega_from(const Mat& g, const Mat& j, double tol = kTolAlg) {
    const Mat w = g * j;
    const double anti = (w + w.transposed()).frobenius();
    const double gt = g_antisymmetry_defect(j, g);
    const double defect = std::max(anti, gt);
    if (defect > tol * (1.0 + g.frobenius()))
        throw CompatibilityError("omega_from: (g, J) incompatible", defect);
    return w;
}

/// g = -omega J, the inverse of omega_from.
inline Mat g_from(const Mat& omega, const Mat& j) {
    Mat g = omega * j;
    g *= -1.0;
    return g;
}

struct TypeSplit {
    Mat j_linear;     ///< commutes with J
    Mat j_antilinear; ///< anticommutes with J
};

/// Split an endomorphism into its J-linear and J-antilinear parts,
/// A = 1/2 (A - J A J) + 1/2 (A + J A J).
inline TypeSplit type_split(const Mat& a, const Mat& j) {
    const Mat jaj = j * a * j;
    return {(a - jaj) * 0.5, (a + jaj) * 0.5};
}

/// Riemannian norm sqrt(Tr[A (A)^T_g]); for any compatible J this squares
/// to 2n on the nose.
inline double g_norm(const Mat& a, const Mat& g) {
    require_spd(g, "g_norm");
    return std::sqrt((a * g_transpose(a, g)).trace());
}

// --- random test data -------------------------------------------------------

/// Random symmetric matrix with entries in [-scale, scale].
inline Mat random_symmetric(SplitMix64& rng, int dim, double scale = 1.0) {
    Mat m(dim);
    for (int i = 0; i < dim; ++i)
        for (int j = i; j < dim; ++j) {
            const double v = rng.uniform(-scale, scale);
            m(i, j) = v;
            m(j, i) = v;
        }
    return m;
}

/// Random SPD matrix A^T A + eps I.
inline Mat random_spd(SplitMix64& rng, int dim, double scale = 1.0) {
    Mat a(dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) a(i, j) = rng.uniform(-scale, scale);
    Mat g = a.transposed() * a;
    for (int i = 0; i < dim; ++i) g(i, i) += 0.3;
    return g;
}

/// Block-diagonal standard complex structure on R^{2n}.
inline Mat j_standard(int dim) {
    Mat j(dim);
    for (int b = 0; b + 1 < dim; b += 2) {
        j(b, b + 1) = -1.0;
        j(b + 1, b) = 1.0;
    }
    return j;
}

/// Random compatible pair: g = A^T A and J = A^{-1} J0 A, so that gJ is
/// antisymmetric and J^2 = -I by construction. A is kept well conditioned
/// so the conjugation stays accurate to ~1e-13.
inline void random_compatible_pair(SplitMix64& rng, int dim, Mat& g, Mat& j) {
    Mat a(dim);
    while (true) {
        for (int i = 0; i < dim; ++i)
            for (int jj = 0; jj < dim; ++jj) a(i, jj) = 0.35 * rng.uniform(-1.0, 1.0);
        for (int i = 0; i < dim; ++i) a(i, i) += 1.0;
        const Mat ata = a.transposed() * a;
        std::array<double, kMaxDim> ev{};
        Mat q(dim);
        eig_sym(ata, ev, q);
        if (ev[0] > 0.15 && ev[dim - 1] < 12.0) break;
    }
    g = a.transposed() * a;
    j = a.inverse() * j_standard(dim) * a;
}

} // namespace flowlab
