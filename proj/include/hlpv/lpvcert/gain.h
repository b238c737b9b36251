#pragma once

#include <span>

#include <Eigen/Dense>

#include "hlpv/lpvcert/certify.h"

namespace hlpv::lpvcert {

enum class GainKind { kContinuous, kSampledData };

/// K̃(θ) = [K₁(θ) K₂(θ)] with K₁: m×n acting on x and K₂: m×m on u.
struct SampledGain {
  Eigen::MatrixXd K1;
  Eigen::MatrixXd K2;
};

/// Gain kept as the (U, R) pair and evaluated pointwise, never inverted
/// symbolically.
class ControllerGain {
 public:
  /// Throws std::invalid_argument for analysis certificates.
  ControllerGain(const LpvSystem& sys, const Certificate& cert);

  GainKind kind() const { return kind_; }
  int n() const { return n_; }
  int m() const { return m_; }

  /// Continuous: K(min(τ,T̄), θ) = U R⁻¹ (m×n). Sampled-data: K̃(θ) =
  /// U(θ) R(0,θ)⁻¹ (m×(n+m)), τ ignored. Throws std::domain_error naming
  /// the point when R is not positive definite there.
  Eigen::MatrixXd Evaluate(double tau, std::span<const double> theta) const;

  /// Sampled-data only.
  SampledGain Split(std::span<const double> theta) const;

  const PolyMatrix& U() const { return u_; }
  const PolyMatrix& R() const { return r_; }

 private:
  LpvSystem sys_;
  GainKind kind_{GainKind::kContinuous};
  int n_{0};
  int m_{0};
  double dwell_{0.0};
  PolyMatrix u_;
  PolyMatrix r_;
};

}  // namespace hlpv::lpvcert
