#include "hlpv/lpvcert/lpv_system.h"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace hlpv::lpvcert {

using polyalg::Monomial;

namespace {

bool OnlyUses(const Polynomial& p, const std::vector<int>& allowed) {
  for (const auto& [m, c] : p.terms()) {
    for (int v = 0; v < m.arity(); ++v) {
      if (m[v] != 0 && std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
        return false;
      }
    }
  }
  return true;
}

void CheckMatrix(const PolyMatrix& m, int rows, int cols, int arity,
                 const std::vector<int>& allowed, const char* name) {
  if (m.rows() != rows || m.cols() != cols) {
    throw std::invalid_argument(std::string(name) + " has wrong dimensions");
  }
  if (m.arity() != arity) throw std::invalid_argument(std::string(name) + " arity mismatch");
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      if (!OnlyUses(m(i, j), allowed)) {
        throw std::invalid_argument(std::string(name) + " may only depend on p1..pN");
      }
    }
  }
}

}  // namespace

PolyMatrix ParseMatrix(const polyalg::VarEnv& env,
                       const std::vector<std::vector<std::string>>& rows,
                       const polyalg::ConstantTable& constants) {
  if (rows.empty() || rows[0].empty()) throw std::invalid_argument("empty matrix");
  const int r = static_cast<int>(rows.size());
  const int c = static_cast<int>(rows[0].size());
  PolyMatrix out(r, c, env.size());
  for (int i = 0; i < r; ++i) {
    if (static_cast<int>(rows[i].size()) != c) throw std::invalid_argument("ragged matrix");
    for (int j = 0; j < c; ++j) out(i, j) = polyalg::ParsePolynomial(rows[i][j], env, constants);
  }
  return out;
}

LpvSystem MakeSystem(int n, int m, int num_params) {
  LpvSystem s;
  s.env = polyalg::VarEnv::Standard(num_params, true);
  s.n = n;
  s.m = m;
  s.num_params = num_params;
  return s;
}

int LpvSystem::t_var() const { return env.Get("t").index; }
int LpvSystem::s_var() const { return env.Get("s").index; }

std::vector<int> LpvSystem::p_vars() const {
  std::vector<int> out;
  for (int i = 1; i <= num_params; ++i) out.push_back(env.Get("p" + std::to_string(i)).index);
  return out;
}

std::vector<int> LpvSystem::q_vars() const {
  std::vector<int> out;
  for (int i = 1; i <= num_params; ++i) out.push_back(env.Get("q" + std::to_string(i)).index);
  return out;
}

void LpvSystem::Validate() const {
  if (n < 1) throw std::invalid_argument("state dimension must be >= 1");
  if (m < 0 || num_params < 0) throw std::invalid_argument("negative dimension");
  const int ar = env.size();
  const auto pv = p_vars();
  CheckMatrix(A, n, n, ar, pv, "A");
  CheckMatrix(J, n, n, ar, pv, "J");
  if (m > 0) CheckMatrix(B, n, m, ar, pv, "B");
  if (static_cast<int>(box_lo.size()) != num_params ||
      static_cast<int>(box_hi.size()) != num_params) {
    throw std::invalid_argument("parameter box must have one interval per parameter");
  }
  for (int i = 0; i < num_params; ++i) {
    if (!(box_lo[i] <= box_hi[i])) throw std::invalid_argument("empty parameter interval");
  }
  for (const auto& p : g) {
    if (p.degree() == 0) throw std::invalid_argument("domain generator g must be nonconstant");
    if (!OnlyUses(p, pv)) throw std::invalid_argument("g may only depend on p1..pN");
  }
  for (const auto& p : h) {
    if (p.degree() == 0) throw std::invalid_argument("domain equality h must be nonconstant");
    if (!OnlyUses(p, pv)) throw std::invalid_argument("h may only depend on p1..pN");
  }
  for (const auto& v : vertices) {
    if (static_cast<int>(v.size()) != num_params) {
      throw std::invalid_argument("derivative vertex has wrong length");
    }
    for (const auto& c : v) {
      if (!OnlyUses(c, pv)) throw std::invalid_argument("derivative vertex may only depend on p");
    }
  }
}

std::vector<Polynomial> LpvSystem::Inequalities() const {
  std::vector<Polynomial> out;
  const int ar = env.size();
  if (box_generators) {
    const auto pv = p_vars();
    for (int i = 0; i < num_params; ++i) {
      if (box_lo[i] == box_hi[i]) continue;
      const Polynomial x = Polynomial::Term(Monomial::Var(ar, pv[i]), 1.0);
      const Polynomial lo = x - Polynomial::Constant(ar, box_lo[i]);
      const Polynomial hi = Polynomial::Constant(ar, box_hi[i]) - x;
      out.push_back(lo * hi);
    }
  }
  out.insert(out.end(), g.begin(), g.end());
  return out;
}

bool LpvSystem::JIsIdentity() const {
  return J.IsSymmetric() && [&] {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const Polynomial expect =
            i == j ? Polynomial::Constant(env.size(), 1.0) : Polynomial(env.size());
        if (!(J(i, j) == expect)) return false;
      }
    }
    return true;
  }();
}

std::vector<double> EnvPoint(const LpvSystem& sys, double tau, std::span<const double> theta,
                             std::span<const double> eta, double sigma) {
  std::vector<double> pt(sys.env.size(), 0.0);
  pt[sys.t_var()] = tau;
  pt[sys.s_var()] = sigma;
  const auto pv = sys.p_vars();
  const auto qv = sys.q_vars();
  for (size_t i = 0; i < pv.size() && i < theta.size(); ++i) pt[pv[i]] = theta[i];
  for (size_t i = 0; i < qv.size() && i < eta.size(); ++i) pt[qv[i]] = eta[i];
  return pt;
}

std::vector<std::vector<Polynomial>> BoxVertices(int arity, const std::vector<double>& lo,
                                                 const std::vector<double>& hi) {
  const int n = static_cast<int>(lo.size());
  std::vector<std::vector<Polynomial>> out;
  for (int mask = 0; mask < (1 << n); ++mask) {
    std::vector<Polynomial> v;
    for (int i = 0; i < n; ++i) {
      const bool upper = (mask >> (n - 1 - i)) & 1;
      v.push_back(Polynomial::Constant(arity, upper ? hi[i] : lo[i]));
    }
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  }
  return out;
}

}  // namespace hlpv::lpvcert
