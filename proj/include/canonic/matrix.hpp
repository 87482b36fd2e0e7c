#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "canonic/field_traits.hpp"

namespace canonic {

struct SingularMatrixError : std::runtime_error {
    double pivot_magnitude;
    explicit SingularMatrixError(double mag)
        : std::runtime_error("singular matrix (pivot magnitude " + std::to_string(mag) + ")"),
          pivot_magnitude(mag) {}
};

/// Dense row-major matrix over an abstract field. Immutable use is intended:
/// operations return fresh matrices.
template <class F>
class Matrix {
public:
    Matrix() : rows_(0), cols_(0) {}
    Matrix(std::size_t rows, std::size_t cols, F fill)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n, const F& like) {
        Matrix m(n, n, field_traits<F>::zero(like));
        for (std::size_t i = 0; i < n; ++i) m(i, i) = field_traits<F>::one(like);
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    F& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const F& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_) throw std::invalid_argument("matrix product shape mismatch");
        F z = field_traits<F>::zero(a.data_.empty() ? b.data_[0] : a.data_[0]);
        Matrix c(a.rows_, b.cols_, z);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                F aik = a(i, k);
                for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
            }
        return c;
    }

    double max_weight() const {
        double m = 0;
        for (const F& x : data_) m = std::max(m, field_traits<F>::pivot_weight(x));
        return m;
    }

private:
    std::size_t rows_, cols_;
    std::vector<F> data_;
};

/// Determinant. Exact fields use fraction-free (Bareiss) elimination,
/// the approximate field uses partially pivoted LU.
template <class F>
F det(Matrix<F> m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("det: matrix not square");
    const std::size_t n = m.rows();
    if (n == 0) throw std::invalid_argument("det: empty matrix");
    F one = field_traits<F>::one(m(0, 0));
    F zero = field_traits<F>::zero(m(0, 0));
    bool neg = false;

    if constexpr (field_traits<F>::exact) {
        F prev = one;
        for (std::size_t k = 0; k + 1 < n; ++k) {
            if (field_traits<F>::is_zero(m(k, k))) {
                std::size_t piv = k;
                while (piv < n && field_traits<F>::is_zero(m(piv, k))) ++piv;
                if (piv == n) return zero;
                for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(piv, j));
                neg = !neg;
            }
            for (std::size_t i = k + 1; i < n; ++i) {
                for (std::size_t j = k + 1; j < n; ++j)
                    m(i, j) = (m(k, k) * m(i, j) - m(i, k) * m(k, j)) / prev;
                m(i, k) = zero;
            }
            prev = m(k, k);
        }
        F d = m(n - 1, n - 1);
        return neg ? -d : d;
    } else {
        F d = one;
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t piv = k;
            double best = field_traits<F>::pivot_weight(m(k, k));
            for (std::size_t i = k + 1; i < n; ++i) {
                double w = field_traits<F>::pivot_weight(m(i, k));
                if (w > best) { best = w; piv = i; }
            }
            if (best == 0.0) return zero;
            if (piv != k) {
                for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(piv, j));
                neg = !neg;
            }
            d *= m(k, k);
            for (std::size_t i = k + 1; i < n; ++i) {
                F f = m(i, k) / m(k, k);
                for (std::size_t j = k + 1; j < n; ++j) m(i, j) -= f * m(k, j);
            }
        }
        return neg ? -d : d;
    }
}

template <class F>
struct RankNullspace {
    std::size_t rank;
    std::vector<std::vector<F>> nullspace;  // each of length cols
};

/// Rank and nullspace by rank-revealing elimination with full column
/// scanning. For the approximate field a pivot counts when its magnitude
/// exceeds tol times the largest entry of the input matrix (fixed rule).
/// tol is ignored for exact fields.
template <class F>
RankNullspace<F> rank_nullspace(Matrix<F> m, double tol = 0.0) {
    const std::size_t rows = m.rows(), cols = m.cols();
    if (rows == 0 || cols == 0) throw std::invalid_argument("rank_nullspace: empty matrix");
    F one = field_traits<F>::one(m(0, 0));
    F zero = field_traits<F>::zero(m(0, 0));
    const double scale = field_traits<F>::exact ? 0.0 : tol * m.max_weight();

    std::vector<std::size_t> pivot_col;  // pivot column of each pivot row
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t piv = r;
        double best = field_traits<F>::pivot_weight(m(r, c));
        for (std::size_t i = r + 1; i < rows; ++i) {
            double w = field_traits<F>::pivot_weight(m(i, c));
            if (w > best) { best = w; piv = i; }
        }
        if (best <= scale || best == 0.0) continue;
        if (piv != r)
            for (std::size_t j = 0; j < cols; ++j) std::swap(m(r, j), m(piv, j));
        F p = m(r, c);
        for (std::size_t j = c; j < cols; ++j) m(r, j) /= p;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r) continue;
            F f = m(i, c);
            if (field_traits<F>::is_zero(f, 0.0)) continue;
            for (std::size_t j = c; j < cols; ++j) m(i, j) -= f * m(r, j);
        }
        pivot_col.push_back(c);
        ++r;
    }

    RankNullspace<F> out;
    out.rank = r;
    std::vector<bool> is_pivot(cols, false);
    for (std::size_t c : pivot_col) is_pivot[c] = true;
    for (std::size_t c = 0; c < cols; ++c) {
        if (is_pivot[c]) continue;
        std::vector<F> v(cols, zero);
        v[c] = one;
        for (std::size_t i = 0; i < r; ++i) v[pivot_col[i]] = -m(i, c);
        out.nullspace.push_back(std::move(v));
    }
    return out;
}

/// Inverse via Gauss-Jordan. Throws SingularMatrixError with the failing
/// pivot magnitude (approximate field: pivot below tol * max entry).
template <class F>
Matrix<F> inverse(Matrix<F> m, double tol = 0.0) {
    if (m.rows() != m.cols()) throw std::invalid_argument("inverse: matrix not square");
    const std::size_t n = m.rows();
    if (n == 0) throw std::invalid_argument("inverse: empty matrix");
    Matrix<F> inv = Matrix<F>::identity(n, m(0, 0));
    const double scale = field_traits<F>::exact ? 0.0 : tol * m.max_weight();

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double best = field_traits<F>::pivot_weight(m(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            double w = field_traits<F>::pivot_weight(m(i, k));
            if (w > best) { best = w; piv = i; }
        }
        if (best <= scale || best == 0.0) throw SingularMatrixError(best);
        if (piv != k)
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(m(k, j), m(piv, j));
                std::swap(inv(k, j), inv(piv, j));
            }
        F p = m(k, k);
        for (std::size_t j = 0; j < n; ++j) {
            m(k, j) /= p;
            inv(k, j) /= p;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == k) continue;
            F f = m(i, k);
            if (field_traits<F>::is_zero(f, 0.0)) continue;
            for (std::size_t j = 0; j < n; ++j) {
                m(i, j) -= f * m(k, j);
                inv(i, j) -= f * inv(k, j);
            }
        }
    }
    return inv;
}

}  // namespace canonic
