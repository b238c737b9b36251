#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "hlpv/lpvcert/lpv_system.h"
#include "hlpv/soscomp/sos_program.h"

namespace hlpv::lpvcert {

enum class Mode { kMinDwell, kQuadratic, kRobust, kRangeDwell, kSynthCt, kSynthSd };

/// "min-dwell", "quadratic", "robust", "range-dwell", "synth-ct", "synth-sd".
std::string_view ModeName(Mode mode);
std::optional<Mode> ParseMode(std::string_view name);

bool IsSynthesis(Mode mode);
/// True for modes whose conditions range over the derivative vertices.
bool UsesVertices(Mode mode);

struct ProgramOptions {
  Mode mode{Mode::kMinDwell};
  /// Total degree of S, R and U in their variables. Quadratic mode ignores
  /// it for P (constant) and uses it as the multiplier degree instead.
  int degree{2};
  double epsilon{0.01};
  /// T̄ for min-dwell and synth-ct.
  double dwell{0.0};
  /// [T_min, T_max] for range-dwell and synth-sd.
  double tmin{0.0};
  double tmax{0.0};
  /// Degree of every SOS multiplier; negative selects the largest degree
  /// that does not raise the degree of the constraint.
  int multiplier_degree{-1};
  /// Drops ε from the flow conditions, as stated in the SOS program of the
  /// minimum dwell-time theorem. By default ε is applied uniformly.
  bool box1_verbatim{false};
};

struct BuiltProgram {
  soscomp::SosProgram program{0};
  ProgramOptions options;
  /// S for analysis modes, R for synthesis modes.
  soscomp::DecisionMatrix lyapunov;
  /// U for synthesis modes.
  std::optional<soscomp::DecisionMatrix> gain;
};

/// Dispatches to the analysis or synthesis builder. Throws
/// std::invalid_argument on a malformed system or option set.
BuiltProgram BuildProgram(const LpvSystem& sys, const ProgramOptions& opts);

/// Modes min-dwell, quadratic, robust, range-dwell.
BuiltProgram BuildAnalysisProgram(const LpvSystem& sys, const ProgramOptions& opts);

/// Modes synth-ct and synth-sd.
BuiltProgram BuildSynthesisProgram(const LpvSystem& sys, const ProgramOptions& opts);

/// Augmented data for sampled-data synthesis on z = (x, u):
/// Ã = [[A, B], [0, 0]], J̃ = [[J, 0], [0, 0]], B̃ = [0; I].
struct AugmentedSystem {
  PolyMatrix A;
  PolyMatrix J;
  PolyMatrix B;
};
AugmentedSystem Augment(const LpvSystem& sys);

/// Σᵢ μᵢ ∂S/∂θᵢ.
template <typename Coeff>
polyalg::BasicPolyMatrix<Coeff> DirectionalDiff(const polyalg::BasicPolyMatrix<Coeff>& s,
                                                const std::vector<int>& vars,
                                                const std::vector<Polynomial>& mu) {
  polyalg::BasicPolyMatrix<Coeff> out(s.rows(), s.cols(), s.arity());
  for (size_t i = 0; i < vars.size(); ++i) {
    if (mu[i].IsZero()) continue;
    out += polyalg::Multiply(mu[i], s.Diff(vars[i]));
  }
  out.set_symmetric(s.symmetric());
  return out;
}

}  // namespace hlpv::lpvcert
