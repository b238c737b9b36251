#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hlpv/lpvcert/certify.h"

namespace hlpv::lpvcert {

/// Numeric V(x,τ,θ) = xᵀS(τ,θ)x of a certificate. Synthesis certificates
/// use S = R⁻¹. The timer is clamped to [0, T̄] for min-dwell and synth-ct
/// and to [0, T_max] for range-dwell and synth-sd; quadratic and robust
/// certificates ignore it.
class LyapunovField {
 public:
  LyapunovField(const LpvSystem& sys, const Certificate& cert);

  int size() const { return size_; }
  double ClampTimer(double tau) const;

  Eigen::MatrixXd S(double tau, std::span<const double> theta) const;
  /// ∂S/∂τ, zero where the timer is clamped.
  Eigen::MatrixXd DTau(double tau, std::span<const double> theta) const;
  /// ∂S/∂θᵢ.
  Eigen::MatrixXd DTheta(int i, double tau, std::span<const double> theta) const;
  /// Σᵢ μᵢ ∂S/∂θᵢ.
  Eigen::MatrixXd DTheta(std::span<const double> mu, double tau,
                         std::span<const double> theta) const;

  double Value(std::span<const double> x, double tau, std::span<const double> theta) const;

  /// The polynomial matrix underlying S: S itself, or R for synthesis.
  const PolyMatrix& base() const { return base_; }
  bool inverted() const { return inverted_; }

 private:
  Eigen::MatrixXd Base(const PolyMatrix& m, double tau, std::span<const double> theta) const;

  LpvSystem sys_;
  int size_{0};
  double tau_max_{0.0};
  bool timed_{true};
  bool inverted_{false};
  PolyMatrix base_;
  PolyMatrix dtau_;
  std::vector<PolyMatrix> dtheta_;
};

/// Symmetric part (M + Mᵀ)/2 and its extreme eigenvalues.
double MaxEig(const Eigen::MatrixXd& m);
double MinEig(const Eigen::MatrixXd& m);

}  // namespace hlpv::lpvcert
