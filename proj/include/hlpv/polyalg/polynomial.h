#pragma once

#include <cmath>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hlpv/polyalg/monomial.h"

namespace hlpv::polyalg {

inline bool IsZeroCoeff(double c) { return c == 0.0; }

/// Sparse multivariate polynomial with coefficients of type `Coeff`.
///
/// `Coeff` is `double` for numeric polynomials; the SOS compiler instantiates
/// it with an affine form in decision unknowns. A coefficient type must
/// provide +, -, unary -, multiplication by double, and an ADL-visible
/// `IsZeroCoeff`. Terms are kept in GradedLexLess order and exact zeros are
/// never stored.
template <typename Coeff>
class BasicPolynomial {
 public:
  using TermMap = std::map<Monomial, Coeff, GradedLexLess>;

  BasicPolynomial() = default;
  explicit BasicPolynomial(int arity) : arity_(arity) {}

  static BasicPolynomial Constant(int arity, const Coeff& c) {
    BasicPolynomial p(arity);
    p.AddTerm(Monomial(arity), c);
    return p;
  }
  static BasicPolynomial Term(const Monomial& m, const Coeff& c) {
    BasicPolynomial p(m.arity());
    p.AddTerm(m, c);
    return p;
  }

  int arity() const { return arity_; }
  const TermMap& terms() const { return terms_; }
  bool IsZero() const { return terms_.empty(); }
  int num_terms() const { return static_cast<int>(terms_.size()); }

  /// Maximum total degree; 0 for the zero polynomial.
  int degree() const {
    return terms_.empty() ? 0 : terms_.rbegin()->first.degree();
  }
  int DegreeIn(int var) const {
    int d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m[var]);
    return d;
  }

  Coeff coefficient(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Coeff{} : it->second;
  }

  void AddTerm(const Monomial& m, const Coeff& c) {
    if (m.arity() != arity_) {
      throw std::invalid_argument("monomial arity does not match polynomial");
    }
    if (IsZeroCoeff(c)) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second = it->second + c;
      if (IsZeroCoeff(it->second)) terms_.erase(it);
    }
  }

  BasicPolynomial& operator+=(const BasicPolynomial& other) {
    CheckArity(other);
    for (const auto& [m, c] : other.terms_) AddTerm(m, c);
    return *this;
  }
  BasicPolynomial& operator-=(const BasicPolynomial& other) {
    CheckArity(other);
    for (const auto& [m, c] : other.terms_) AddTerm(m, -c);
    return *this;
  }
  BasicPolynomial& operator*=(double s) {
    if (s == 0.0) {
      terms_.clear();
      return *this;
    }
    for (auto it = terms_.begin(); it != terms_.end();) {
      it->second = it->second * s;
      it = IsZeroCoeff(it->second) ? terms_.erase(it) : std::next(it);
    }
    return *this;
  }

  friend BasicPolynomial operator+(BasicPolynomial a,
                                   const BasicPolynomial& b) {
    return a += b;
  }
  friend BasicPolynomial operator-(BasicPolynomial a,
                                   const BasicPolynomial& b) {
    return a -= b;
  }
  friend BasicPolynomial operator-(BasicPolynomial a) { return a *= -1.0; }
  friend BasicPolynomial operator*(BasicPolynomial a, double s) {
    return a *= s;
  }
  friend BasicPolynomial operator*(double s, BasicPolynomial a) {
    return a *= s;
  }

  /// Applies `f` to every coefficient, dropping results that are zero.
  template <typename F>
  auto Transform(F&& f) const {
    using Out = std::decay_t<decltype(f(std::declval<const Coeff&>()))>;
    BasicPolynomial<Out> out(arity_);
    for (const auto& [m, c] : terms_) out.AddTerm(m, f(c));
    return out;
  }

  friend bool operator==(const BasicPolynomial& a, const BasicPolynomial& b) {
    return a.arity_ == b.arity_ && a.terms_ == b.terms_;
  }

 private:
  void CheckArity(const BasicPolynomial& other) const {
    if (other.arity_ != arity_) {
      throw std::invalid_argument("polynomial arity mismatch");
    }
  }

  int arity_{0};
  TermMap terms_;
};

using Polynomial = BasicPolynomial<double>;

/// Exact product. The coefficient product type decides what is legal, e.g.
/// numeric × affine is fine while affine × affine throws downstream.
template <typename A, typename B>
auto Multiply(const BasicPolynomial<A>& p, const BasicPolynomial<B>& q) {
  using Out = std::decay_t<decltype(std::declval<A>() * std::declval<B>())>;
  if (p.arity() != q.arity()) {
    throw std::invalid_argument("polynomial arity mismatch");
  }
  BasicPolynomial<Out> out(p.arity());
  for (const auto& [mp, cp] : p.terms()) {
    for (const auto& [mq, cq] : q.terms()) out.AddTerm(mp * mq, cp * cq);
  }
  return out;
}

inline Polynomial operator*(const Polynomial& p, const Polynomial& q) {
  return Multiply(p, q);
}

/// Formal partial derivative with respect to variable index `var`.
template <typename Coeff>
BasicPolynomial<Coeff> Diff(const BasicPolynomial<Coeff>& p, int var) {
  BasicPolynomial<Coeff> out(p.arity());
  for (const auto& [m, c] : p.terms()) {
    const int e = m[var];
    if (e == 0) continue;
    Monomial lowered = m;
    lowered.Set(var, e - 1);
    out.AddTerm(lowered, c * static_cast<double>(e));
  }
  return out;
}

/// Replaces variable `var` by the numeric polynomial `q` and expands.
template <typename Coeff>
BasicPolynomial<Coeff> Substitute(const BasicPolynomial<Coeff>& p, int var,
                                  const Polynomial& q) {
  if (q.arity() != p.arity()) {
    throw std::invalid_argument("substitution arity mismatch");
  }
  std::vector<Polynomial> powers{Polynomial::Constant(p.arity(), 1.0)};
  BasicPolynomial<Coeff> out(p.arity());
  for (const auto& [m, c] : p.terms()) {
    const int e = m[var];
    while (static_cast<int>(powers.size()) <= e) {
      powers.push_back(powers.back() * q);
    }
    Monomial rest = m;
    rest.Set(var, 0);
    for (const auto& [mq, cq] : powers[e].terms()) {
      out.AddTerm(rest * mq, c * cq);
    }
  }
  return out;
}

/// Evaluates p at `point` (indexed by variable). NaN marks an unassigned
/// variable; touching one throws std::invalid_argument.
double Evaluate(const Polynomial& p, std::span<const double> point);

/// Renders p with the given variable names, e.g. "-2 - p1" or "0.5*t - t^2".
/// Coefficients use the shortest round-trip decimal form.
std::string Render(const Polynomial& p, std::span<const std::string> names);

}  // namespace hlpv::polyalg
