#pragma once

// Dense linear algebra for the small (g <= ~8) matrices that appear in
// period and theta computations.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "ernst/error.hpp"

namespace ernst {

using cplx = std::complex<double>;
using RVector = std::vector<double>;
using CVector = std::vector<cplx>;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr cplx I{0.0, 1.0};

template <typename T>
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, T fill = T{})
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::initializer_list<std::initializer_list<T>> init)
    {
        rows_ = init.size();
        cols_ = rows_ ? init.begin()->size() : 0;
        data_.reserve(rows_ * cols_);
        for (const auto& row : init) {
            if (row.size() != cols_)
                throw Error(ErrorCode::InvalidArgument, "ragged matrix initializer");
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    static Matrix identity(std::size_t n)
    {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows_ == cols_; }

    T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const std::vector<T>& data() const noexcept { return data_; }

    Matrix transpose() const
    {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    friend Matrix operator*(const Matrix& a, const Matrix& b)
    {
        if (a.cols_ != b.rows_) throw Error(ErrorCode::InvalidArgument, "matrix product shape mismatch");
        Matrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const T aik = a(i, k);
                for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
            }
        return c;
    }

    friend Matrix operator+(Matrix a, const Matrix& b)
    {
        a.check_same(b);
        for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] += b.data_[i];
        return a;
    }

    friend Matrix operator-(Matrix a, const Matrix& b)
    {
        a.check_same(b);
        for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] -= b.data_[i];
        return a;
    }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    void check_same(const Matrix& b) const
    {
        if (rows_ != b.rows_ || cols_ != b.cols_)
            throw Error(ErrorCode::InvalidArgument, "matrix shape mismatch");
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

using RealMatrix = Matrix<double>;
using ComplexMatrix = Matrix<cplx>;

template <typename T>
double max_abs(const Matrix<T>& m)
{
    double r = 0.0;
    for (const auto& v : m.data()) r = std::max(r, std::abs(v));
    return r;
}

template <typename T>
double max_abs(const std::vector<T>& v)
{
    double r = 0.0;
    for (const auto& x : v) r = std::max(r, std::abs(x));
    return r;
}

RealMatrix real_part(const ComplexMatrix& m);
RealMatrix imag_part(const ComplexMatrix& m);
ComplexMatrix to_complex(const RealMatrix& m);

CVector multiply(const ComplexMatrix& a, const CVector& x);
RVector multiply(const RealMatrix& a, const RVector& x);

/// Lower-triangular L with L L^T = m. Throws NotPositiveDefinite on a
/// non-positive pivot and InvalidArgument if m is not symmetric to 1e-12.
RealMatrix cholesky_spd(const RealMatrix& m);

/// Solves L L^T x = b given the factor from cholesky_spd.
RVector cholesky_solve(const RealMatrix& lower, const RVector& b);

/// Partial-pivoted Gaussian elimination for A X = B.
/// Throws SingularMatrix when a pivot falls below 1e-14 * max|A|.
ComplexMatrix solve_linear(const ComplexMatrix& a, const ComplexMatrix& b);

ComplexMatrix inverse(const ComplexMatrix& a);

double min_eigenvalue_spd(const RealMatrix& m);

// |a - b| <= atol + rtol * max(|a|, |b|)
template <typename T>
bool close(T a, T b, double atol = 1e-12, double rtol = 1e-10)
{
    return std::abs(a - b) <= atol + rtol * std::max(std::abs(a), std::abs(b));
}

}  // namespace ernst
