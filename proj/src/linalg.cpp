#include "ernst/linalg.hpp"

#include <string>

namespace ernst {

RealMatrix real_part(const ComplexMatrix& m)
{
    RealMatrix r(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = m(i, j).real();
    return r;
}

RealMatrix imag_part(const ComplexMatrix& m)
{
    RealMatrix r(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = m(i, j).imag();
    return r;
}

ComplexMatrix to_complex(const RealMatrix& m)
{
    ComplexMatrix r(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = m(i, j);
    return r;
}

CVector multiply(const ComplexMatrix& a, const CVector& x)
{
    if (a.cols() != x.size()) throw Error(ErrorCode::InvalidArgument, "matrix-vector shape mismatch");
    CVector y(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) y[i] += a(i, j) * x[j];
    return y;
}

RVector multiply(const RealMatrix& a, const RVector& x)
{
    if (a.cols() != x.size()) throw Error(ErrorCode::InvalidArgument, "matrix-vector shape mismatch");
    RVector y(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) y[i] += a(i, j) * x[j];
    return y;
}

RealMatrix cholesky_spd(const RealMatrix& m)
{
    if (!m.square()) throw Error(ErrorCode::InvalidArgument, "cholesky of non-square matrix");
    const std::size_t n = m.rows();
    const double scale = std::max(max_abs(m), 1e-300);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (std::abs(m(i, j) - m(j, i)) > 1e-12 * scale)
                throw Error(ErrorCode::InvalidArgument, "cholesky of non-symmetric matrix");

    RealMatrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = m(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (!(d > 0.0))
            throw Error(ErrorCode::NotPositiveDefinite,
                        "pivot " + std::to_string(j) + " is " + std::to_string(d));
        l(j, j) = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = m(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / l(j, j);
        }
    }
    return l;
}

RVector cholesky_solve(const RealMatrix& lower, const RVector& b)
{
    const std::size_t n = lower.rows();
    RVector y(b);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < i; ++k) y[i] -= lower(i, k) * y[k];
        y[i] /= lower(i, i);
    }
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t k = i + 1; k < n; ++k) y[i] -= lower(k, i) * y[k];
        y[i] /= lower(i, i);
    }
    return y;
}

ComplexMatrix solve_linear(const ComplexMatrix& a, const ComplexMatrix& b)
{
    if (!a.square() || a.rows() != b.rows())
        throw Error(ErrorCode::InvalidArgument, "solve_linear shape mismatch");
    const std::size_t n = a.rows();
    const std::size_t k = b.cols();
    ComplexMatrix lu = a;
    ComplexMatrix x = b;
    const double tiny = 1e-14 * max_abs(a);

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(lu(r, col)) > std::abs(lu(piv, col))) piv = r;
        if (std::abs(lu(piv, col)) <= tiny || std::abs(lu(piv, col)) == 0.0)
            throw Error(ErrorCode::SingularMatrix, "pivot " + std::to_string(col) + " vanishes");
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(lu(col, j), lu(piv, j));
            for (std::size_t j = 0; j < k; ++j) std::swap(x(col, j), x(piv, j));
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const cplx f = lu(r, col) / lu(col, col);
            if (f == cplx{}) continue;
            for (std::size_t j = col; j < n; ++j) lu(r, j) -= f * lu(col, j);
            for (std::size_t j = 0; j < k; ++j) x(r, j) -= f * x(col, j);
        }
    }
    for (std::size_t j = 0; j < k; ++j)
        for (std::size_t r = n; r-- > 0;) {
            cplx s = x(r, j);
            for (std::size_t c = r + 1; c < n; ++c) s -= lu(r, c) * x(c, j);
            x(r, j) = s / lu(r, r);
        }
    return x;
}

ComplexMatrix inverse(const ComplexMatrix& a)
{
    return solve_linear(a, ComplexMatrix::identity(a.rows()));
}

double min_eigenvalue_spd(const RealMatrix& m)
{
    // Cyclic Jacobi; g is tiny so this converges in a handful of sweeps.
    const std::size_t n = m.rows();
    RealMatrix a = m;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
        if (off < 1e-30 * std::max(1.0, max_abs(a))) break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                if (a(p, q) == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
    }
    double lo = a(0, 0);
    for (std::size_t i = 1; i < n; ++i) lo = std::min(lo, a(i, i));
    return lo;
}

}  // namespace ernst
