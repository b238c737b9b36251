#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace hlpv::polyalg {

/// Exponent vector over a VarEnv. Arity is fixed by the owning environment.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(int arity) : exps_(arity, 0) {}
  explicit Monomial(std::vector<int> exps);

  /// x_var^power in an environment of the given arity.
  static Monomial Var(int arity, int var, int power = 1);

  int arity() const { return static_cast<int>(exps_.size()); }
  int degree() const { return degree_; }
  int operator[](int var) const { return exps_[var]; }
  std::span<const int> exponents() const { return exps_; }

  /// Sets one exponent and keeps the cached degree consistent.
  void Set(int var, int power);

  Monomial operator*(const Monomial& other) const;

  friend bool operator==(const Monomial& a, const Monomial& b) {
    return a.exps_ == b.exps_;
  }

 private:
  std::vector<int> exps_;
  int degree_{0};
};

/// Graded order: lower total degree first; within a degree, larger exponent
/// on the earlier variable first. For (t, p) this yields 1, t, p, t², tp, p².
struct GradedLexLess {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

/// All monomials of total degree ≤ `degree` in `vars`, in GradedLexLess
/// order. Size is C(|vars| + degree, degree).
std::vector<Monomial> MonomialBasis(int arity, std::span<const int> vars,
                                    int degree);

/// Binomial coefficient, exact for the small arguments used here.
std::int64_t Binomial(int n, int k);

}  // namespace hlpv::polyalg
