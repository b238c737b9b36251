#pragma once

#include <vector>

#include "hlpv/hybridsim/simulator.h"
#include "hlpv/lpvcert/certify.h"

namespace hlpv::hybridsim {

struct LyapunovReport {
  /// V at every sample; NaN where the timer is unknown.
  std::vector<double> v;
  /// max (V̇ + ε‖x‖²) over flow samples, V̇ by difference quotients between
  /// consecutive samples. ε is the certificate's for analysis certificates
  /// with ε in the flow conditions, else 0.
  double flow_violation{0.0};
  /// max V(x⁺) − V(x) over jumps.
  double jump_violation{0.0};
  int jumps_checked{0};
};

/// Evaluates V = xᵀS x along the trajectory (z = (x, u) for sampled-data
/// certificates). The timer is τ = time since the last jump for min-dwell
/// and synth-ct, and time until the next jump for range-dwell and synth-sd,
/// clamped to the certified range. Throws std::invalid_argument when the
/// certificate does not match the trajectory.
LyapunovReport EvalLyapunov(const lpvcert::LpvSystem& sys, const lpvcert::Certificate& cert,
                            const HybridTrajectory& tr);

}  // namespace hlpv::hybridsim
