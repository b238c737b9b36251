#include "hlpv/lpvcert/gain.h"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace hlpv::lpvcert {

ControllerGain::ControllerGain(const LpvSystem& sys, const Certificate& cert)
    : sys_(sys), n_(sys.n), m_(sys.m), dwell_(cert.dwell), u_(cert.U), r_(cert.R) {
  if (cert.mode == Mode::kSynthCt) {
    kind_ = GainKind::kContinuous;
  } else if (cert.mode == Mode::kSynthSd) {
    kind_ = GainKind::kSampledData;
  } else {
    throw std::invalid_argument("gain recovery requires a synthesis certificate");
  }
  if (u_.rows() != m_ || r_.rows() != r_.cols() || u_.cols() != r_.rows()) {
    throw std::invalid_argument("certificate matrices do not match the system");
  }
}

Eigen::MatrixXd ControllerGain::Evaluate(double tau, std::span<const double> theta) const {
  const double t = kind_ == GainKind::kContinuous ? std::clamp(tau, 0.0, dwell_) : 0.0;
  const auto pt = EnvPoint(sys_, t, theta);
  const Eigen::MatrixXd r = polyalg::Evaluate(r_, pt);
  const Eigen::MatrixXd u = polyalg::Evaluate(u_, pt);
  Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (r + r.transpose()));
  if (llt.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "R is not positive definite at tau=" << t << ", theta=(";
    for (size_t i = 0; i < theta.size(); ++i) msg << (i ? "," : "") << theta[i];
    msg << ")";
    throw std::domain_error(msg.str());
  }
  // R symmetric: Rᵀ Kᵀ = Uᵀ.
  return llt.solve(u.transpose()).transpose();
}

SampledGain ControllerGain::Split(std::span<const double> theta) const {
  if (kind_ != GainKind::kSampledData) throw std::logic_error("not a sampled-data gain");
  const Eigen::MatrixXd k = Evaluate(0.0, theta);
  return {k.leftCols(n_), k.rightCols(m_)};
}

}  // namespace hlpv::lpvcert
