#pragma once
// Dense square matrices on the tangent space of a real 2n-dimensional
// manifold, n <= 4. Sizes are tiny, so storage is a fixed array and the
// hot loops stay branch-free after inlining.

#include <array>
#include <cmath>
#include <cstdint>

#include "flowlab/core/errors.hpp"

namespace flowlab {

constexpr int kMaxDim = 8;

class Mat {
public:
    Mat() : dim_(2) { a_.fill(0.0); }
    explicit Mat(int dim) : dim_(dim) {
        if (dim < 1 || dim > kMaxDim) throw FlowError("Mat: dimension out of range");
        a_.fill(0.0);
    }

    static Mat zero(int dim) { return Mat(dim); }
    static Mat identity(int dim) {
        Mat m(dim);
        for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
        return m;
    }

    int dim() const { return dim_; }

    double& operator()(int i, int j) { return a_[static_cast<size_t>(i) * kMaxDim + j]; }
    double operator()(int i, int j) const { return a_[static_cast<size_t>(i) * kMaxDim + j]; }

    Mat& operator+=(const Mat& o) {
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j) (*this)(i, j) += o(i, j);
        return *this;
    }
    Mat& operator-=(const Mat& o) {
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j) (*this)(i, j) -= o(i, j);
        return *this;
    }
    Mat& operator*=(double c) {
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j) (*this)(i, j) *= c;
        return *this;
    }

    friend Mat operator+(Mat a, const Mat& b) { return a += b; }
    friend Mat operator-(Mat a, const Mat& b) { return a -= b; }
    friend Mat operator*(Mat a, double c) { return a *= c; }
    friend Mat operator*(double c, Mat a) { return a *= c; }

    friend Mat operator*(const Mat& a, const Mat& b) {
        Mat r(a.dim_);
        for (int i = 0; i < a.dim_; ++i)
            for (int k = 0; k < a.dim_; ++k) {
                const double aik = a(i, k);
                if (aik == 0.0) continue;
                for (int j = 0; j < a.dim_; ++j) r(i, j) += aik * b(k, j);
            }
        return r;
    }

    Mat transposed() const {
        Mat r(dim_);
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j) r(j, i) = (*this)(i, j);
        return r;
    }

    double trace() const {
        double t = 0.0;
        for (int i = 0; i < dim_; ++i) t += (*this)(i, i);
        return t;
    }

    double frobenius() const {
        double s = 0.0;
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j) s += (*this)(i, j) * (*this)(i, j);
        return std::sqrt(s);
    }

    double max_abs() const {
        double m = 0.0;
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j) m = std::max(m, std::abs((*this)(i, j)));
        return m;
    }

    bool is_finite() const {
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j)
                if (!std::isfinite((*this)(i, j))) return false;
        return true;
    }

    double sym_defect() const {
        double s = 0.0;
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j) {
                const double d = (*this)(i, j) - (*this)(j, i);
                s += d * d;
            }
        return std::sqrt(s);
    }

    /// Inverse by partial-pivot Gauss-Jordan; fine at these sizes.
    Mat inverse() const {
        const int n = dim_;
        double w[kMaxDim][2 * kMaxDim];
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                w[i][j] = (*this)(i, j);
                w[i][n + j] = (i == j) ? 1.0 : 0.0;
            }
        }
        for (int col = 0; col < n; ++col) {
            int piv = col;
            for (int r = col + 1; r < n; ++r)
                if (std::abs(w[r][col]) > std::abs(w[piv][col])) piv = r;
            if (w[piv][col] == 0.0) throw FlowError("Mat::inverse: singular matrix");
            if (piv != col)
                for (int j = 0; j < 2 * n; ++j) std::swap(w[piv][j], w[col][j]);
            const double inv_p = 1.0 / w[col][col];
            for (int j = 0; j < 2 * n; ++j) w[col][j] *= inv_p;
            for (int r = 0; r < n; ++r) {
                if (r == col) continue;
                const double f = w[r][col];
                if (f == 0.0) continue;
                for (int j = 0; j < 2 * n; ++j) w[r][j] -= f * w[col][j];
            }
        }
        Mat out(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) out(i, j) = w[i][n + j];
        return out;
    }

private:
    int dim_;
    std::array<double, kMaxDim * kMaxDim> a_;
};

inline Mat commutator(const Mat& a, const Mat& b) { return a * b - b * a; }

/// Cyclic Jacobi eigensolver for symmetric matrices. Returns eigenvalues in
/// `eval` (ascending) and orthonormal eigenvectors as columns of `evec`.
inline void eig_sym(const Mat& m, std::array<double, kMaxDim>& eval, Mat& evec) {
    const int n = m.dim();
    Mat a = m;
    evec = Mat::identity(n);
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off < 1e-30) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) < 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = evec(k, p), vkq = evec(k, q);
                    evec(k, p) = c * vkp - s * vkq;
                    evec(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    // selection sort of eigenpairs
    for (int i = 0; i < n; ++i) eval[i] = a(i, i);
    for (int i = 0; i < n; ++i) {
        int lo = i;
        for (int j = i + 1; j < n; ++j)
            if (eval[j] < eval[lo]) lo = j;
        if (lo != i) {
            std::swap(eval[i], eval[lo]);
            for (int k = 0; k < n; ++k) {
                const double tmp = evec(k, i);
                evec(k, i) = evec(k, lo);
                evec(k, lo) = tmp;
            }
        }
    }
}

inline double min_eigenvalue_sym(const Mat& m) {
    std::array<double, kMaxDim> ev{};
    Mat v(m.dim());
    eig_sym(m, ev, v);
    return ev[0];
}

inline bool is_spd(const Mat& m, double sym_tol = 1e-10) {
    if (!m.is_finite()) return false;
    if (m.sym_defect() > sym_tol * (1.0 + m.frobenius())) return false;
    return min_eigenvalue_sym(m) > 0.0;
}

/// Matrix exponential by scaling and squaring with the [6/6] Pade approximant.
/// Accurate to ~1e-14 at these sizes; used as an oracle, not in hot loops.
inline Mat expm(const Mat& m) {
    const int n = m.dim();
    double norm = 0.0;
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = 0; j < n; ++j) row += std::abs(m(i, j));
        norm = std::max(norm, row);
    }
    int squarings = 0;
    double scale = 1.0;
    while (norm * scale > 0.5) {
        scale *= 0.5;
        ++squarings;
    }
    Mat a = m * scale;
    // Pade [6/6] coefficients c_k = (12-k)! 6! / (12! k! (6-k)!)
    static const double c[7] = {1.0, 0.5, 5.0 / 44.0, 1.0 / 66.0,
                                1.0 / 792.0, 1.0 / 15840.0, 1.0 / 665280.0};
    Mat a2 = a * a;
    Mat u = Mat::identity(n) * c[1] + a2 * c[3] + a2 * a2 * c[5];
    u = a * u;
    Mat v = Mat::identity(n) * c[0] + a2 * c[2] + a2 * a2 * c[4] + a2 * (a2 * a2) * c[6];
    Mat num = v + u;
    Mat den = v - u;
    Mat r = den.inverse() * num;
    for (int k = 0; k < squarings; ++k) r = r * r;
    return r;
}

/// Inverse square root of a symmetric positive definite matrix via eigenvalues.
inline Mat inv_sqrt_spd(const Mat& m) {
    std::array<double, kMaxDim> ev{};
    Mat q(m.dim());
    eig_sym(m, ev, q);
    Mat d(m.dim());
    for (int i = 0; i < m.dim(); ++i) {
        if (ev[i] <= 0.0) throw InvalidMetric("inv_sqrt_spd: matrix not positive definite");
        d(i, i) = 1.0 / std::sqrt(ev[i]);
    }
    return q * d * q.transposed();
}

} // namespace flowlab
