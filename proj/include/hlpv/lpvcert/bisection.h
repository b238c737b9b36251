#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hlpv/lpvcert/certify.h"

namespace hlpv::lpvcert {

struct Probe {
  double dwell{0.0};
  sdpcore::Status status{sdpcore::Status::kNumericalFailure};
  double margin{0.0};
  double seconds{0.0};
};

struct BisectionResult {
  bool found{false};
  /// Smallest feasible probe.
  double dwell{0.0};
  std::optional<Certificate> certificate;
  /// Every probe in evaluation order.
  std::vector<Probe> probes;
  std::vector<std::string> warnings;
  std::string message;
};

/// Smallest feasible T̄ in [lo, hi] for min-dwell or synth-ct, bisected to
/// width ≤ tol. Only a feasible status counts as success. `opts.dwell` is
/// ignored.
BisectionResult BisectDwellTime(const LpvSystem& sys, const ProgramOptions& opts, double lo,
                                double hi, double tol,
                                const sdpcore::SolverOptions& solver = {});

/// Warnings for feasible probes lying below non-feasible ones.
std::vector<std::string> MonotonicityWarnings(const std::vector<Probe>& probes);

}  // namespace hlpv::lpvcert
