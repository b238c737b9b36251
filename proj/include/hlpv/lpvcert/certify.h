#pragma once

#include <optional>
#include <string>

#include "hlpv/lpvcert/builders.h"
#include "hlpv/sdpcore/solver.h"

namespace hlpv::lpvcert {

/// Solved certificate. Analysis modes fill S; synthesis modes fill R and U.
struct Certificate {
  Mode mode{Mode::kMinDwell};
  int degree{0};
  double epsilon{0.0};
  double dwell{0.0};
  double tmin{0.0};
  double tmax{0.0};
  bool box1_verbatim{false};
  /// Dimension of S or R: n, or n + m for synth-sd.
  int size{0};
  PolyMatrix S;
  PolyMatrix R;
  PolyMatrix U;
};

/// Size of the compiled SDP.
struct ProgramStats {
  int rows{0};
  int blocks{0};
  int max_block{0};
  int free_vars{0};
  /// Scalar primal unknowns: free variables plus upper triangles of blocks.
  long primal_vars{0};
};

struct CertifyResult {
  sdpcore::Status status{sdpcore::Status::kNumericalFailure};
  double margin{0.0};
  std::optional<Certificate> certificate;
  ProgramStats stats;
  int iterations{0};
  double primal_residual{0.0};
  double dual_residual{0.0};
  double seconds{0.0};
  std::string message;
};

ProgramStats Stats(const sdpcore::SdpProblem& p);

/// Builds, compiles and solves the mode's program. The certificate is set
/// only when the status is feasible.
CertifyResult Certify(const LpvSystem& sys, const ProgramOptions& opts,
                      const sdpcore::SolverOptions& solver = {});

/// Constant candidate S(τ,θ) = P promoted to a min-dwell certificate with
/// the given dwell time.
Certificate AsMinDwell(const Certificate& quadratic, double dwell);

}  // namespace hlpv::lpvcert
