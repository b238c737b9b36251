#include "hlpv/polyalg/monomial.h"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace hlpv::polyalg {

Monomial::Monomial(std::vector<int> exps) : exps_(std::move(exps)) {
  for (int e : exps_) {
    if (e < 0) throw std::invalid_argument("negative exponent");
  }
  degree_ = std::accumulate(exps_.begin(), exps_.end(), 0);
}

Monomial Monomial::Var(int arity, int var, int power) {
  Monomial m(arity);
  m.Set(var, power);
  return m;
}

void Monomial::Set(int var, int power) {
  if (power < 0) throw std::invalid_argument("negative exponent");
  degree_ += power - exps_.at(var);
  exps_[var] = power;
}

Monomial Monomial::operator*(const Monomial& other) const {
  if (arity() != other.arity()) {
    throw std::invalid_argument("monomial arity mismatch");
  }
  Monomial out(*this);
  for (int i = 0; i < arity(); ++i) out.exps_[i] += other.exps_[i];
  out.degree_ = degree_ + other.degree_;
  return out;
}

bool GradedLexLess::operator()(const Monomial& a, const Monomial& b) const {
  if (a.degree() != b.degree()) return a.degree() < b.degree();
  const auto ea = a.exponents();
  const auto eb = b.exponents();
  for (size_t i = 0; i < ea.size(); ++i) {
    if (ea[i] != eb[i]) return ea[i] > eb[i];
  }
  return false;
}

namespace {

// Enumerates exponent assignments of exactly `remaining` total degree over
// vars[pos..], earlier variables taking the larger share first.
void Enumerate(std::span<const int> vars, size_t pos, int remaining,
               Monomial* current, std::vector<Monomial>* out) {
  if (pos + 1 == vars.size()) {
    current->Set(vars[pos], remaining);
    out->push_back(*current);
    current->Set(vars[pos], 0);
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    current->Set(vars[pos], e);
    Enumerate(vars, pos + 1, remaining - e, current, out);
  }
  current->Set(vars[pos], 0);
}

}  // namespace

std::vector<Monomial> MonomialBasis(int arity, std::span<const int> vars,
                                    int degree) {
  if (degree < 0) throw std::invalid_argument("negative basis degree");
  std::vector<int> sorted(vars.begin(), vars.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("duplicate variable in basis request");
  }
  std::vector<Monomial> out;
  out.emplace_back(arity);
  if (sorted.empty()) return out;
  Monomial current(arity);
  for (int d = 1; d <= degree; ++d) {
    Enumerate(sorted, 0, d, &current, &out);
  }
  return out;
}

std::int64_t Binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace hlpv::polyalg
