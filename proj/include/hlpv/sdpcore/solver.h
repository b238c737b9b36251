#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "hlpv/sdpcore/sdp_problem.h"

namespace hlpv::sdpcore {

struct SolverOptions {
  /// Relative primal/dual infeasibility and duality-gap tolerance.
  double tol{1e-8};
  int max_iter{200};
  /// Feasibility mode: |λ*| below this reports kMarginal.
  double margin_threshold{1e-7};
  /// Feasibility mode: tr(X_j) ≤ trace_cap·dim_j for every block keeps the
  /// margin problem bounded.
  double trace_cap{1e3};
  /// Fraction of the distance to the cone boundary taken per step.
  double step_fraction{0.95};
  /// Feasibility mode: stop as soon as the sign of λ* is decided.
  bool early_stop{true};
  bool verbose{false};
};

/// Parses `key=value` lines (blank lines and `#` comments ignored) on top of
/// defaults. Unknown keys and malformed values throw std::invalid_argument.
SolverOptions ParseSolverOptions(std::string_view text,
                                 SolverOptions base = {});
std::string FormatSolverOptions(const SolverOptions& opts);

enum class Status {
  kFeasible,          ///< minimisation: converged optimum
  kInfeasible,
  kMarginal,
  kNumericalFailure,
};
std::string_view StatusName(Status s);

struct IterationInfo {
  int iter{0};
  double primal_objective{0.0};
  double dual_objective{0.0};
  double primal_infeasibility{0.0};
  double dual_infeasibility{0.0};
  double gap{0.0};
  double mu{0.0};
  double step_primal{0.0};
  double step_dual{0.0};
};

struct SdpSolution {
  Status status{Status::kNumericalFailure};
  /// λ* in feasibility mode (NaN for minimisation).
  double margin{0.0};
  double primal_objective{0.0};
  double dual_objective{0.0};
  /// Block values in the caller's problem (unshifted in feasibility mode).
  std::vector<Eigen::MatrixXd> x;
  Eigen::VectorXd x_free;
  /// Dual multipliers, one per row of the caller's problem.
  Eigen::VectorXd y;
  /// Dual slack blocks of the solved (for feasibility: margin) problem.
  std::vector<Eigen::MatrixXd> z;
  double primal_residual{0.0};
  double dual_residual{0.0};
  double gap{0.0};
  int iterations{0};
  std::vector<IterationInfo> trace;
  std::string message;
};

/// Dense primal-dual interior-point method with Nesterov–Todd scaling and
/// Mehrotra predictor-corrector steps.
///
/// Feasibility problems are solved in margin form: every block is written as
/// X_j = X̂_j + λI with X̂_j ⪰ 0, λ is maximised, and tr(X_j) is capped as
/// described in SolverOptions. The sign of λ* decides the status.
///
/// Rows are scaled to unit infinity norm. Presolve drops free columns that
/// are linearly dependent, removes consistent redundant rows, and reports
/// inconsistent ones as infeasible.
SdpSolution Solve(const SdpProblem& problem, const SolverOptions& opts = {});

/// The margin form of a feasibility problem. Blocks and rows of `p` come
/// first; then one 1×1 slack block and one trace-cap row per block, and the
/// free variable λ last. The objective is min −λ.
SdpProblem MarginProblem(const SdpProblem& p, double trace_cap);

struct ResidualReport {
  /// ‖A(X) + Fx − b‖₂ / (1 + ‖b‖₂)
  double primal{0.0};
  /// ‖C − Aᵀ(y) − Z‖_F + ‖c_f − Fᵀy‖₂, relative to 1 + ‖C‖_F + ‖c_f‖₂
  double dual{0.0};
  /// |p − d| / (1 + |p| + |d|)
  double gap{0.0};
  std::vector<double> min_eig;
};

/// Residuals of `s` against `p`. Dual quantities are taken against the
/// margin form for feasibility problems.
ResidualReport CheckSolution(const SdpProblem& p, const SdpSolution& s,
                             const SolverOptions& opts = {});

}  // namespace hlpv::sdpcore
