#pragma once

// Dense linear algebra at working precision (full pivoting) and exact
// rational solves (fraction-free Bareiss elimination over the integers).

#include "tfsolve/complex.hpp"
#include "tfsolve/precision.hpp"

#include <numeric>
#include <string>
#include <utility>
#include <vector>

namespace tfsolve {

template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, const T& fill = T(0)) : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  T& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  void swap_rows(std::size_t i, std::size_t k) {
    if (i == k) return;
    for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(i, j), (*this)(k, j));
  }
  void swap_cols(std::size_t j, std::size_t k) {
    if (j == k) return;
    for (std::size_t i = 0; i < rows_; ++i) std::swap((*this)(i, j), (*this)(i, k));
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> a_;
};

template <class T>
std::vector<T> multiply(const Matrix<T>& m, const std::vector<T>& x) {
  if (m.cols() != x.size()) throw DimensionError("matrix-vector dimension mismatch");
  std::vector<T> r(m.rows(), T(0));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) r[i] += m(i, j) * x[j];
  return r;
}

namespace detail {

inline Real max_abs(const Matrix<Real>& m) {
  Real best = 0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) best = std::max(best, Real(abs(m(i, j))));
  return best;
}

inline void divide_exact(BigInt& target, const BigInt& divisor) {
  mpz_divexact(target.backend().data(), target.backend().data(), divisor.backend().data());
}

/// Clears denominators row by row: returns integer rows and the per-row
/// scale factors that were applied.
inline Matrix<BigInt> integer_rows(const Matrix<Rational>& m, std::vector<BigInt>& scales) {
  Matrix<BigInt> out(m.rows(), m.cols());
  scales.assign(m.rows(), BigInt(1));
  for (std::size_t i = 0; i < m.rows(); ++i) {
    BigInt l = 1;
    for (std::size_t j = 0; j < m.cols(); ++j) l = boost::multiprecision::lcm(l, denominator(m(i, j)));
    scales[i] = l;
    for (std::size_t j = 0; j < m.cols(); ++j) {
      BigInt v = numerator(m(i, j)) * l;
      divide_exact(v, denominator(m(i, j)));
      out(i, j) = std::move(v);
    }
  }
  return out;
}

/// In-place Bareiss elimination on the first `n` columns. Returns the
/// permutation sign, or 0 when a column has no nonzero pivot.
inline int bareiss(Matrix<BigInt>& m, std::size_t n) {
  int sign = 1;
  BigInt prev = 1;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    while (p < m.rows() && m(p, k) == 0) ++p;
    if (p == m.rows()) return 0;
    if (p != k) {
      m.swap_rows(p, k);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < m.rows(); ++i) {
      for (std::size_t j = k + 1; j < m.cols(); ++j) {
        BigInt v = m(k, k) * m(i, j) - m(i, k) * m(k, j);
        divide_exact(v, prev);
        m(i, j) = std::move(v);
      }
      m(i, k) = 0;
    }
    prev = m(k, k);
  }
  return sign;
}

}  // namespace detail

namespace detail {

inline Real lift_to(const Real& x, const PrecisionContext& ctx) { return ctx.lift(x); }
inline ComplexReal lift_to(const ComplexReal& z, const PrecisionContext& ctx) {
  return {ctx.lift(z.re), ctx.lift(z.im)};
}

template <class T>
T full_pivot_determinant(const Matrix<T>& matrix, const PrecisionContext& ctx) {
  if (!matrix.square()) throw DimensionError("determinant of a non-square matrix");
  PrecisionScope scope(ctx);
  const std::size_t n = matrix.rows();
  Matrix<T> a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = lift_to(matrix(i, j), ctx);
  T det(Real(1));
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pi = k, pj = k;
    Real best = -1;
    for (std::size_t i = k; i < n; ++i)
      for (std::size_t j = k; j < n; ++j) {
        Real v = abs(a(i, j));
        if (v > best) {
          best = v;
          pi = i;
          pj = j;
        }
      }
    if (best == 0) return T(Real(0));
    if (pi != k) {
      a.swap_rows(pi, k);
      det = -det;
    }
    if (pj != k) {
      a.swap_cols(pj, k);
      det = -det;
    }
    const T piv = a(k, k);
    det *= piv;
    for (std::size_t i = k + 1; i < n; ++i) {
      T f = a(i, k) / piv;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
    }
  }
  return det;
}

}  // namespace detail

/// Determinant by full-pivoting Gaussian elimination at the context's
/// working precision.
inline Real determinant(const Matrix<Real>& matrix, const PrecisionContext& ctx) {
  return detail::full_pivot_determinant(matrix, ctx);
}

inline ComplexReal determinant(const Matrix<ComplexReal>& matrix, const PrecisionContext& ctx) {
  return detail::full_pivot_determinant(matrix, ctx);
}

/// Exact determinant of a rational matrix.
inline Rational determinant(const Matrix<Rational>& matrix) {
  if (!matrix.square()) throw DimensionError("determinant of a non-square matrix");
  const std::size_t n = matrix.rows();
  if (n == 0) return Rational(1);
  std::vector<BigInt> scales;
  Matrix<BigInt> m = detail::integer_rows(matrix, scales);
  int sign = detail::bareiss(m, n);
  if (sign == 0) return Rational(0);
  BigInt scale = 1;
  for (const auto& s : scales) scale *= s;
  return Rational(m(n - 1, n - 1) * sign, scale);
}

/// Solves A x = b with full pivoting at working precision. Throws
/// SingularMatrixError when a pivot falls below 10^-(working-5) relative
/// to the largest entry.
inline std::vector<Real> solve_linear(const Matrix<Real>& matrix, const std::vector<Real>& rhs,
                                      const PrecisionContext& ctx) {
  if (!matrix.square()) throw DimensionError("solve_linear needs a square matrix");
  if (rhs.size() != matrix.rows()) throw DimensionError("rhs length does not match the matrix");
  PrecisionScope scope(ctx);
  const std::size_t n = matrix.rows();
  Matrix<Real> a(n, n);
  std::vector<Real> b(n);
  for (std::size_t i = 0; i < n; ++i) {
    b[i] = ctx.lift(rhs[i]);
    for (std::size_t j = 0; j < n; ++j) a(i, j) = ctx.lift(matrix(i, j));
  }
  std::vector<std::size_t> col(n);
  std::iota(col.begin(), col.end(), 0);
  const Real threshold = detail::max_abs(a) * ctx.pow10(-static_cast<int>(ctx.working_digits()) + 5);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pi = k, pj = k;
    Real best = -1;
    for (std::size_t i = k; i < n; ++i)
      for (std::size_t j = k; j < n; ++j) {
        Real v = abs(a(i, j));
        if (v > best) {
          best = v;
          pi = i;
          pj = j;
        }
      }
    if (best <= threshold)
      throw SingularMatrixError("matrix is singular to working precision at elimination step " +
                                std::to_string(k));
    a.swap_rows(pi, k);
    std::swap(b[pi], b[k]);
    a.swap_cols(pj, k);
    std::swap(col[pj], col[k]);
    for (std::size_t i = k + 1; i < n; ++i) {
      Real f = a(i, k) / a(k, k);
      if (f == 0) continue;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
      b[i] -= f * b[k];
    }
  }
  std::vector<Real> y(n);
  for (std::size_t k = n; k-- > 0;) {
    Real s = b[k];
    for (std::size_t j = k + 1; j < n; ++j) s -= a(k, j) * y[j];
    y[k] = s / a(k, k);
  }
  std::vector<Real> x(n);
  for (std::size_t k = 0; k < n; ++k) x[col[k]] = y[k];
  return x;
}

/// Exact solve of a rational system; throws SingularMatrixError when the
/// matrix is singular.
inline std::vector<Rational> solve_linear(const Matrix<Rational>& matrix, const std::vector<Rational>& rhs) {
  if (!matrix.square()) throw DimensionError("solve_linear needs a square matrix");
  if (rhs.size() != matrix.rows()) throw DimensionError("rhs length does not match the matrix");
  const std::size_t n = matrix.rows();
  Matrix<Rational> aug(n, n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = matrix(i, j);
    aug(i, n) = rhs[i];
  }
  std::vector<BigInt> scales;
  Matrix<BigInt> m = detail::integer_rows(aug, scales);
  if (detail::bareiss(m, n) == 0) throw SingularMatrixError("rational system is singular");
  std::vector<Rational> x(n);
  for (std::size_t k = n; k-- > 0;) {
    Rational s(m(k, n));
    for (std::size_t j = k + 1; j < n; ++j) s -= Rational(m(k, j)) * x[j];
    x[k] = s / Rational(m(k, k));
  }
  return x;
}

}  // namespace tfsolve
