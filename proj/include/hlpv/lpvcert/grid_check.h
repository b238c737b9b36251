#pragma once

#include <string>
#include <vector>

#include "hlpv/lpvcert/certify.h"

namespace hlpv::lpvcert {

struct GridSpec {
  /// Points per continuous axis (τ and each θᵢ).
  int points{50};
  /// Points on [T_min, T_max].
  int sigma_points{20};
  double tol{1e-6};
  /// Cap on (θ, η) pairs for jump conditions; both axes are thinned evenly
  /// when the full product is larger.
  int max_pairs{40000};
};

/// Largest eigenvalue of one matrix inequality LHS ⪯ 0 over the grid.
struct ConditionReport {
  std::string name;
  double max_eig{0.0};
  std::string worst_point;
  long evaluations{0};
  bool pass{false};
};

struct GridReport {
  std::vector<ConditionReport> conditions;
  /// Smallest eigenvalue of S (analysis) or R (synthesis).
  double min_eig{0.0};
  std::string min_eig_point;
  /// ε − tol: the SOS program enforces S − εI ⪰ 0 on the domain.
  double min_eig_threshold{0.0};
  bool pass{false};
};

/// Points of 𝒫 on a tensor grid over the box, filtered by g ≥ 0 and, when
/// equalities are present, projected onto h = 0 and thinned to half the
/// grid spacing.
std::vector<std::vector<double>> ParameterGrid(const LpvSystem& sys, int points);

/// Re-evaluates the certificate's conditions, without ε, on the grid. For
/// synthesis certificates the closed loop with S = R⁻¹ is checked as well.
/// Throws std::invalid_argument for an empty grid specification.
GridReport CheckCertificate(const LpvSystem& sys, const Certificate& cert,
                            const GridSpec& spec = {});

}  // namespace hlpv::lpvcert
