#pragma once

#include <cstdint>
#include <limits>
#include <vector>

namespace hlpv::hybridsim {

/// Jump instants 0 < t₁ < t₂ < … < horizon. `next` is the first generated
/// instant at or beyond the horizon (NaN for explicit sequences), so the
/// time to the next jump is known at every sample.
struct JumpSequence {
  std::vector<double> times;
  double horizon{0.0};
  double next{std::numeric_limits<double>::quiet_NaN()};

  /// Number of jumps at or before t.
  int IntervalAt(double t) const;
};

/// Gaps drawn uniformly from [dwell, dwell·(1 + spread)].
JumpSequence MinDwellJumps(double dwell, double horizon, std::uint64_t seed,
                           double spread = 1.0);
/// Gaps drawn uniformly from [tmin, tmax].
JumpSequence RangeDwellJumps(double tmin, double tmax, double horizon, std::uint64_t seed);
/// Validates strictly increasing instants in (0, horizon).
JumpSequence ExplicitJumps(std::vector<double> times, double horizon);

/// ρ(t) on jump interval k (between the k-th and (k+1)-th jump). Values
/// at a jump instant are taken from the interval before it.
class ParamTrajectory {
 public:
  enum class Kind { kConstant, kSinusoid, kPhaseJump, kTable };

  /// ρ ≡ value.
  static ParamTrajectory Constant(std::vector<double> value);
  /// ρᵢ = loᵢ + (hiᵢ − loᵢ)(1 + sin(2νt/(hiᵢ − loᵢ) + φ))/2, so |ρ̇ᵢ| ≤ ν.
  static ParamTrajectory Sinusoid(std::vector<double> lo, std::vector<double> hi, double nu,
                                  double phase);
  /// Sinusoid whose phase is redrawn uniformly in [0, 2π] on every jump
  /// interval, independently per component; with lo = 0, hi = 1 this is
  /// ρ(t) = (1 + sin(2ν(t_k + τ) + φ_k))/2.
  static ParamTrajectory PhaseJump(std::vector<double> lo, std::vector<double> hi, double nu,
                                   std::uint64_t seed, int intervals);
  /// Piecewise-linear interpolation of (time, value) rows, held constant
  /// outside the table.
  static ParamTrajectory Table(std::vector<double> times, std::vector<std::vector<double>> values);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  std::vector<double> Value(double t, int interval) const;

 private:
  Kind kind_{Kind::kConstant};
  int dim_{0};
  std::vector<double> lo_, hi_, constant_;
  double nu_{0.0};
  /// phases_[k][i]: phase of component i on interval k (last row reused).
  std::vector<std::vector<double>> phases_;
  std::vector<double> table_t_;
  std::vector<std::vector<double>> table_v_;
};

}  // namespace hlpv::hybridsim
