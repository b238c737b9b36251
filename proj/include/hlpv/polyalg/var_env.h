#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hlpv::polyalg {

/// Role of a polynomial variable. Downstream builders use the kind to decide
/// which semialgebraic domain a variable lives on.
enum class VarKind {
  kClock,          ///< timer-like variable (τ, σ), names `t`, `s`
  kParameter,      ///< scheduling parameter θ_i, names `p1..pN`
  kCopyParameter,  ///< second copy η_i used by jump conditions, `q1..qN`
};

struct VarId {
  int index{0};
  VarKind kind{VarKind::kClock};

  friend bool operator==(const VarId&, const VarId&) = default;
};

/// Ordered set of named variables shared by every polynomial of a problem.
/// Exponent vectors are indexed by position in the environment.
class VarEnv {
 public:
  VarEnv() = default;

  /// Environment `t, p1..pN, q1..qN` followed by `s` when `with_sigma`.
  static VarEnv Standard(int num_params, bool with_sigma = false);

  /// Appends a variable. Throws std::invalid_argument on a duplicate name.
  VarId Add(std::string name, VarKind kind);

  int size() const { return static_cast<int>(names_.size()); }
  const std::string& name(int index) const { return names_.at(index); }
  VarKind kind(int index) const { return kinds_.at(index); }
  VarId id(int index) const { return {index, kinds_.at(index)}; }
  std::optional<VarId> Find(std::string_view name) const;
  /// Like Find but throws std::out_of_range.
  VarId Get(std::string_view name) const;

  /// Indices of all variables of a kind, in declaration order.
  std::vector<int> OfKind(VarKind kind) const;

  friend bool operator==(const VarEnv&, const VarEnv&) = default;

 private:
  std::vector<std::string> names_;
  std::vector<VarKind> kinds_;
};

}  // namespace hlpv::polyalg
