#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hlpv/polyalg/poly_matrix.h"

namespace hlpv::soscomp {

/// c₀ + Σ cₖ·uₖ over decision unknowns uₖ, terms sorted by unknown id with
/// no zero coefficients.
class AffineExpr {
 public:
  AffineExpr() = default;
  AffineExpr(double constant) : constant_(constant) {}  // NOLINT implicit
  static AffineExpr Unknown(int id, double coeff = 1.0);

  double constant() const { return constant_; }
  const std::vector<std::pair<int, double>>& terms() const { return terms_; }
  bool IsConstant() const { return terms_.empty(); }
  bool IsZero() const { return terms_.empty() && constant_ == 0.0; }

  /// Value with unknown k set to values[k].
  double Evaluate(std::span<const double> values) const;

  AffineExpr& operator+=(const AffineExpr& o);
  AffineExpr& operator-=(const AffineExpr& o);
  AffineExpr& operator*=(double s);

  friend AffineExpr operator+(AffineExpr a, const AffineExpr& b) { return a += b; }
  friend AffineExpr operator-(AffineExpr a, const AffineExpr& b) { return a -= b; }
  friend AffineExpr operator-(AffineExpr a) { return a *= -1.0; }
  friend AffineExpr operator*(AffineExpr a, double s) { return a *= s; }
  friend AffineExpr operator*(double s, AffineExpr a) { return a *= s; }
  /// Allowed only when one side is constant; throws std::domain_error when
  /// both depend on unknowns.
  friend AffineExpr operator*(const AffineExpr& a, const AffineExpr& b);

  friend bool operator==(const AffineExpr&, const AffineExpr&) = default;

 private:
  double constant_{0.0};
  std::vector<std::pair<int, double>> terms_;
};

inline bool IsZeroCoeff(const AffineExpr& e) { return e.IsZero(); }

std::string ToString(const AffineExpr& e);

using AffinePoly = polyalg::BasicPolynomial<AffineExpr>;
using AffinePolyMatrix = polyalg::BasicPolyMatrix<AffineExpr>;

/// Numeric matrix lifted to affine coefficients.
AffinePolyMatrix Lift(const polyalg::PolyMatrix& m);

/// Substitutes unknown values into every coefficient.
polyalg::PolyMatrix EvaluateUnknowns(const AffinePolyMatrix& m,
                                     std::span<const double> values);

}  // namespace hlpv::soscomp
