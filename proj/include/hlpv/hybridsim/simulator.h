#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hlpv/hybridsim/trajectories.h"
#include "hlpv/lpvcert/gain.h"
#include "hlpv/lpvcert/lpv_system.h"

namespace hlpv::hybridsim {

struct SimOptions {
  double step{1e-3};
  /// Constant offset added to the controller's timer; models a
  /// desynchronized controller clock and carries no certified claim.
  double timer_offset{0.0};
};

/// Sampled hybrid arc. Each jump stores two consecutive samples with the
/// same time: x(t_k) and x(t_k⁺); `jumps` holds the index of the first.
struct HybridTrajectory {
  int n{0};
  /// Input dimension for sampled-data loops, else 0.
  int m{0};
  std::vector<double> t;
  std::vector<Eigen::VectorXd> x;
  std::vector<Eigen::VectorXd> u;
  std::vector<std::vector<double>> rho;
  /// Time since the last jump (or since 0).
  std::vector<double> since;
  /// Time until the next jump; NaN when unknown.
  std::vector<double> until;
  std::vector<int> jumps;
  bool diverged{false};
};

/// Fixed-step RK4 between jumps, with the last sub-step shortened to land on
/// each jump instant. Without a gain the open loop ẋ = A(ρ)x is integrated;
/// a continuous gain closes ẋ = (A + BK(τ,ρ))x; a sampled-data gain holds u
/// between jumps and updates u⁺ = K₁x + K₂u at each jump. `u0` is the held
/// input at t = 0 for sampled-data loops. Throws std::invalid_argument on
/// inconsistent inputs.
HybridTrajectory Simulate(const lpvcert::LpvSystem& sys, const lpvcert::ControllerGain* gain,
                          const ParamTrajectory& rho, const JumpSequence& jumps,
                          const Eigen::VectorXd& x0, const Eigen::VectorXd& u0,
                          const SimOptions& opts = {});

/// CSV with columns time, x1..xn, [u1..um], rho1..rhoN, V, jump. V is left
/// empty when `v` is empty; jump is 1 on post-jump samples.
std::string ToCsv(const HybridTrajectory& tr, const std::vector<double>& v = {});

}  // namespace hlpv::hybridsim
