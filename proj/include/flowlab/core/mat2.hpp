#pragma once
// Plain 2x2 matrix for the reduced geometry on the 2-sphere. The grid layer
// touches millions of these per run, so it is a POD with fully inline
// arithmetic instead of the general tangent-space matrix.

#include <cmath>

namespace flowlab {

struct M2 {
    double a00 = 0.0, a01 = 0.0, a10 = 0.0, a11 = 0.0;

    static M2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static M2 diag(double x, double y) { return {x, 0.0, 0.0, y}; }
    /// Standard complex structure [[0,-1],[1,0]].
    static M2 j_std() { return {0.0, -1.0, 1.0, 0.0}; }
    /// Antisymmetric matrix c * [[0,-1],[1,0]] representing the 2-form c ds^dtheta.
    static M2 two_form(double c) { return {0.0, -c, c, 0.0}; }

    M2 operator+(const M2& o) const { return {a00 + o.a00, a01 + o.a01, a10 + o.a10, a11 + o.a11}; }
    M2 operator-(const M2& o) const { return {a00 - o.a00, a01 - o.a01, a10 - o.a10, a11 - o.a11}; }
    M2 operator*(double c) const { return {a00 * c, a01 * c, a10 * c, a11 * c}; }
    friend M2 operator*(double c, const M2& m) { return m * c; }
    M2 operator*(const M2& o) const {
        return {a00 * o.a00 + a01 * o.a10, a00 * o.a01 + a01 * o.a11,
                a10 * o.a00 + a11 * o.a10, a10 * o.a01 + a11 * o.a11};
    }
    M2& operator+=(const M2& o) { *this = *this + o; return *this; }
    M2& operator-=(const M2& o) { *this = *this - o; return *this; }

    M2 transposed() const { return {a00, a10, a01, a11}; }
    double trace() const { return a00 + a11; }
    double det() const { return a00 * a11 - a01 * a10; }

    M2 inverse() const {
        const double d = det();
        return {a11 / d, -a01 / d, -a10 / d, a00 / d};
    }

    double frobenius() const {
        return std::sqrt(a00 * a00 + a01 * a01 + a10 * a10 + a11 * a11);
    }
    double max_abs() const {
        return std::max(std::max(std::abs(a00), std::abs(a01)),
                        std::max(std::abs(a10), std::abs(a11)));
    }
    bool finite() const {
        return std::isfinite(a00) && std::isfinite(a01) && std::isfinite(a10) && std::isfinite(a11);
    }

    /// Smallest eigenvalue of the symmetrized matrix.
    double min_eig_sym() const {
        const double b = 0.5 * (a01 + a10);
        const double tr = a00 + a11;
        const double disc = std::sqrt(0.25 * (a00 - a11) * (a00 - a11) + b * b);
        return 0.5 * tr - disc;
    }

    bool spd(double sym_tol = 1e-10) const {
        if (!finite()) return false;
        if (std::abs(a01 - a10) > sym_tol * (1.0 + frobenius())) return false;
        return min_eig_sym() > 0.0;
    }
};

inline M2 commutator(const M2& a, const M2& b) { return a * b - b * a; }

/// g-transpose of an endomorphism: g^{-1} A^T g.
inline M2 g_transpose(const M2& a, const M2& g) { return g.inverse() * a.transposed() * g; }

/// Riemannian norm sqrt(Tr[A (A)^T_g]) of an endomorphism field value.
inline double endo_norm_sq(const M2& a, const M2& g) {
    return (a * g_transpose(a, g)).trace();
}

/// Norm of a symmetric 2-tensor: |v|_g^2 = Tr[(g^{-1} v)^2].
inline double sym2_norm_sq(const M2& v, const M2& g) {
    const M2 vg = g.inverse() * v;
    return (vg * vg).trace();
}

} // namespace flowlab
