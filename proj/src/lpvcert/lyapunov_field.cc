#include "hlpv/lpvcert/lyapunov_field.h"

#include <algorithm>
#include <stdexcept>

namespace hlpv::lpvcert {

namespace {

Eigen::VectorXd Eigs(const Eigen::MatrixXd& m) {
  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sym, Eigen::EigenvaluesOnly)
      .eigenvalues();
}

}  // namespace

double MaxEig(const Eigen::MatrixXd& m) { return Eigs(m).maxCoeff(); }
double MinEig(const Eigen::MatrixXd& m) { return Eigs(m).minCoeff(); }

LyapunovField::LyapunovField(const LpvSystem& sys, const Certificate& cert) : sys_(sys) {
  inverted_ = IsSynthesis(cert.mode);
  base_ = inverted_ ? cert.R : cert.S;
  if (base_.rows() == 0) throw std::invalid_argument("certificate has no Lyapunov matrix");
  size_ = base_.rows();
  switch (cert.mode) {
    case Mode::kMinDwell:
    case Mode::kSynthCt:
      tau_max_ = cert.dwell;
      break;
    case Mode::kRangeDwell:
    case Mode::kSynthSd:
      tau_max_ = cert.tmax;
      break;
    case Mode::kQuadratic:
    case Mode::kRobust:
      timed_ = false;
      break;
  }
  dtau_ = base_.Diff(sys.t_var());
  for (int v : sys.p_vars()) dtheta_.push_back(base_.Diff(v));
}

double LyapunovField::ClampTimer(double tau) const {
  return timed_ ? std::clamp(tau, 0.0, tau_max_) : 0.0;
}

Eigen::MatrixXd LyapunovField::Base(const PolyMatrix& m, double tau,
                                    std::span<const double> theta) const {
  const auto pt = EnvPoint(sys_, ClampTimer(tau), theta);
  return polyalg::Evaluate(m, pt);
}

Eigen::MatrixXd LyapunovField::S(double tau, std::span<const double> theta) const {
  const Eigen::MatrixXd b = Base(base_, tau, theta);
  if (!inverted_) return b;
  Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (b + b.transpose()));
  if (llt.info() != Eigen::Success) throw std::domain_error("R is not positive definite");
  return llt.solve(Eigen::MatrixXd::Identity(size_, size_));
}

Eigen::MatrixXd LyapunovField::DTau(double tau, std::span<const double> theta) const {
  if (!timed_ || tau < 0.0 || tau > tau_max_) return Eigen::MatrixXd::Zero(size_, size_);
  const Eigen::MatrixXd d = Base(dtau_, tau, theta);
  if (!inverted_) return d;
  const Eigen::MatrixXd s = S(tau, theta);
  return -s * d * s;
}

Eigen::MatrixXd LyapunovField::DTheta(int i, double tau, std::span<const double> theta) const {
  const Eigen::MatrixXd d = Base(dtheta_.at(i), tau, theta);
  if (!inverted_) return d;
  const Eigen::MatrixXd s = S(tau, theta);
  return -s * d * s;
}

Eigen::MatrixXd LyapunovField::DTheta(std::span<const double> mu, double tau,
                                      std::span<const double> theta) const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(size_, size_);
  for (size_t i = 0; i < dtheta_.size() && i < mu.size(); ++i) {
    if (mu[i] != 0.0) out += mu[i] * DTheta(static_cast<int>(i), tau, theta);
  }
  return out;
}

double LyapunovField::Value(std::span<const double> x, double tau,
                            std::span<const double> theta) const {
  if (static_cast<int>(x.size()) != size_) throw std::invalid_argument("state size mismatch");
  const Eigen::Map<const Eigen::VectorXd> v(x.data(), size_);
  return v.dot(S(tau, theta) * v);
}

}  // namespace hlpv::lpvcert
