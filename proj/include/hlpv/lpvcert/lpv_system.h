#pragma once

#include <span>
#include <string>
#include <vector>

#include "hlpv/polyalg/parse.h"
#include "hlpv/polyalg/poly_matrix.h"
#include "hlpv/polyalg/var_env.h"

namespace hlpv::lpvcert {

using polyalg::Polynomial;
using polyalg::PolyMatrix;

/// ẋ = A(ρ)x + B(ρ)u between jumps, x⁺ = J(ρ)x at jumps, ρ ∈ 𝒫, ρ̇ ∈ 𝒟.
///
/// All polynomials live in `env`, which is VarEnv::Standard(N, true):
/// t, p1..pN, q1..qN, s. System data may only use p1..pN.
struct LpvSystem {
  polyalg::VarEnv env;
  int n{0};
  int m{0};
  int num_params{0};
  PolyMatrix A;
  /// n×m, unset when m = 0.
  PolyMatrix B;
  PolyMatrix J;
  /// Bounding box of 𝒫, used for grids. When `box_generators` is set the
  /// box also contributes (θᵢ − lo)(hi − θᵢ) ≥ 0 to the domain description.
  std::vector<double> box_lo;
  std::vector<double> box_hi;
  bool box_generators{true};
  std::vector<Polynomial> g;
  std::vector<Polynomial> h;
  /// Vertices of 𝒟; each has num_params components, polynomial in p.
  std::vector<std::vector<Polynomial>> vertices;

  /// Throws std::invalid_argument when an invariant is violated.
  void Validate() const;

  /// g together with the box generators, in p1..pN.
  std::vector<Polynomial> Inequalities() const;

  /// Indices of t, p1..pN, q1..qN and s in env.
  int t_var() const;
  std::vector<int> p_vars() const;
  std::vector<int> q_vars() const;
  int s_var() const;

  bool JIsIdentity() const;
  bool HasInput() const { return m > 0; }
};

/// Point in env order with t = tau, p = theta, q = eta (zero when empty)
/// and s = sigma.
std::vector<double> EnvPoint(const LpvSystem& sys, double tau, std::span<const double> theta,
                             std::span<const double> eta = {}, double sigma = 0.0);

/// Row-major matrix of expressions parsed in `env`. Throws
/// std::invalid_argument on ragged or empty input and polyalg::ParseError on
/// a bad entry.
PolyMatrix ParseMatrix(const polyalg::VarEnv& env,
                       const std::vector<std::vector<std::string>>& rows,
                       const polyalg::ConstantTable& constants = {});

/// Empty system skeleton with env = Standard(num_params, true).
LpvSystem MakeSystem(int n, int m, int num_params);

/// The 2^N constant vertices of the box [lo₁,hi₁]×…×[lo_N,hi_N], first
/// coordinate varying slowest.
std::vector<std::vector<Polynomial>> BoxVertices(int arity, const std::vector<double>& lo,
                                                 const std::vector<double>& hi);

/// p ↦ q renaming (θ to η) for every parameter.
template <typename T>
T ToCopy(const LpvSystem& sys, const T& value) {
  const auto pv = sys.p_vars();
  const auto qv = sys.q_vars();
  T out = value;
  for (size_t i = 0; i < pv.size(); ++i) {
    const Polynomial q = Polynomial::Term(polyalg::Monomial::Var(value.arity(), qv[i]), 1.0);
    if constexpr (requires { out.Substitute(pv[i], q); }) {
      out = out.Substitute(pv[i], q);
    } else {
      out = polyalg::Substitute(out, pv[i], q);
    }
  }
  return out;
}

}  // namespace hlpv::lpvcert
