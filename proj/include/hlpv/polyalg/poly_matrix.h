#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "hlpv/polyalg/polynomial.h"

namespace hlpv::polyalg {

/// Dense matrix of polynomials sharing one VarEnv arity. The symmetric flag
/// records that entry(i,j) and entry(j,i) are coefficient-identical; it is
/// set by constructors that guarantee it (He, symmetric decision matrices)
/// and propagated where the operation preserves it.
template <typename Coeff>
class BasicPolyMatrix {
 public:
  using Poly = BasicPolynomial<Coeff>;

  BasicPolyMatrix() = default;
  BasicPolyMatrix(int rows, int cols, int arity)
      : rows_(rows), cols_(cols), arity_(arity),
        entries_(static_cast<size_t>(rows) * cols, Poly(arity)) {
    if (rows <= 0 || cols <= 0) {
      throw std::invalid_argument("matrix dimensions must be positive");
    }
  }

  static BasicPolyMatrix Identity(int n, int arity, const Coeff& scale) {
    BasicPolyMatrix m(n, n, arity);
    for (int i = 0; i < n; ++i) m(i, i) = Poly::Constant(arity, scale);
    m.symmetric_ = true;
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int arity() const { return arity_; }
  bool symmetric() const { return symmetric_; }
  void set_symmetric(bool flag) { symmetric_ = flag; }

  Poly& operator()(int i, int j) { return entries_.at(Index(i, j)); }
  const Poly& operator()(int i, int j) const {
    return entries_.at(Index(i, j));
  }

  int degree() const {
    int d = 0;
    for (const auto& p : entries_) d = std::max(d, p.degree());
    return d;
  }

  /// Coefficient-exact symmetry test, independent of the flag.
  bool IsSymmetric() const {
    if (rows_ != cols_) return false;
    for (int i = 0; i < rows_; ++i) {
      for (int j = i + 1; j < cols_; ++j) {
        if (!((*this)(i, j) == (*this)(j, i))) return false;
      }
    }
    return true;
  }

  template <typename F>
  auto Transform(F&& f) const {
    using Out = std::decay_t<decltype(f(std::declval<const Coeff&>()))>;
    BasicPolyMatrix<Out> out(rows_, cols_, arity_);
    for (size_t k = 0; k < entries_.size(); ++k) {
      out.entries_[k] = entries_[k].Transform(f);
    }
    out.symmetric_ = symmetric_;
    return out;
  }

  BasicPolyMatrix& operator+=(const BasicPolyMatrix& other) {
    CheckSameShape(other);
    for (size_t k = 0; k < entries_.size(); ++k) entries_[k] += other.entries_[k];
    symmetric_ = symmetric_ && other.symmetric_;
    return *this;
  }
  BasicPolyMatrix& operator-=(const BasicPolyMatrix& other) {
    CheckSameShape(other);
    for (size_t k = 0; k < entries_.size(); ++k) entries_[k] -= other.entries_[k];
    symmetric_ = symmetric_ && other.symmetric_;
    return *this;
  }
  friend BasicPolyMatrix operator+(BasicPolyMatrix a, const BasicPolyMatrix& b) {
    return a += b;
  }
  friend BasicPolyMatrix operator-(BasicPolyMatrix a, const BasicPolyMatrix& b) {
    return a -= b;
  }
  friend BasicPolyMatrix operator-(BasicPolyMatrix a) { return a.Scaled(-1.0); }

  BasicPolyMatrix Scaled(double s) const {
    BasicPolyMatrix out(*this);
    for (auto& p : out.entries_) p *= s;
    return out;
  }

  BasicPolyMatrix Transpose() const {
    BasicPolyMatrix out(cols_, rows_, arity_);
    for (int i = 0; i < rows_; ++i) {
      for (int j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
    }
    out.symmetric_ = symmetric_;
    return out;
  }

  /// He[M] = M + Mᵀ; requires a square matrix and is always symmetric.
  BasicPolyMatrix He() const {
    if (rows_ != cols_) throw std::invalid_argument("He requires a square matrix");
    BasicPolyMatrix out = *this + Transpose();
    out.symmetric_ = true;
    return out;
  }

  BasicPolyMatrix Substitute(int var, const Polynomial& q) const {
    BasicPolyMatrix out(*this);
    for (auto& p : out.entries_) p = polyalg::Substitute(p, var, q);
    return out;
  }

  BasicPolyMatrix Diff(int var) const {
    BasicPolyMatrix out(*this);
    for (auto& p : out.entries_) p = polyalg::Diff(p, var);
    return out;
  }

  /// Sub-block copy [r0, r0+nr) × [c0, c0+nc).
  BasicPolyMatrix Block(int r0, int c0, int nr, int nc) const {
    BasicPolyMatrix out(nr, nc, arity_);
    for (int i = 0; i < nr; ++i) {
      for (int j = 0; j < nc; ++j) out(i, j) = (*this)(r0 + i, c0 + j);
    }
    return out;
  }
  void SetBlock(int r0, int c0, const BasicPolyMatrix& b) {
    for (int i = 0; i < b.rows(); ++i) {
      for (int j = 0; j < b.cols(); ++j) (*this)(r0 + i, c0 + j) = b(i, j);
    }
  }

  template <typename>
  friend class BasicPolyMatrix;

 private:
  size_t Index(int i, int j) const {
    if (i < 0 || i >= rows_ || j < 0 || j >= cols_) {
      throw std::out_of_range("poly matrix index out of range");
    }
    return static_cast<size_t>(i) * cols_ + j;
  }
  void CheckSameShape(const BasicPolyMatrix& o) const {
    if (o.rows_ != rows_ || o.cols_ != cols_) {
      throw std::invalid_argument("matrix dimension mismatch");
    }
    if (o.arity_ != arity_) throw std::invalid_argument("arity mismatch");
  }

  int rows_{0};
  int cols_{0};
  int arity_{0};
  bool symmetric_{false};
  std::vector<Poly> entries_;
};

using PolyMatrix = BasicPolyMatrix<double>;

/// Exact matrix product with mixed coefficient types.
template <typename A, typename B>
auto Multiply(const BasicPolyMatrix<A>& a, const BasicPolyMatrix<B>& b) {
  using Out = std::decay_t<decltype(std::declval<A>() * std::declval<B>())>;
  if (a.cols() != b.rows()) throw std::invalid_argument("matrix dimension mismatch");
  if (a.arity() != b.arity()) throw std::invalid_argument("arity mismatch");
  BasicPolyMatrix<Out> out(a.rows(), b.cols(), a.arity());
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < b.cols(); ++j) {
      for (int k = 0; k < a.cols(); ++k) {
        if (a(i, k).IsZero() || b(k, j).IsZero()) continue;
        out(i, j) += Multiply(a(i, k), b(k, j));
      }
    }
  }
  return out;
}

/// Scalar polynomial times matrix.
template <typename A, typename B>
auto Multiply(const BasicPolynomial<A>& s, const BasicPolyMatrix<B>& m) {
  using Out = std::decay_t<decltype(std::declval<A>() * std::declval<B>())>;
  BasicPolyMatrix<Out> out(m.rows(), m.cols(), m.arity());
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) out(i, j) = Multiply(s, m(i, j));
  }
  out.set_symmetric(m.symmetric());
  return out;
}

Eigen::MatrixXd Evaluate(const PolyMatrix& m, std::span<const double> point);

/// Numeric constant matrix lifted to a PolyMatrix.
PolyMatrix FromConstant(const Eigen::MatrixXd& value, int arity);

}  // namespace hlpv::polyalg
