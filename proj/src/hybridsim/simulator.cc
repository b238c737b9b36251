#include "hlpv/hybridsim/simulator.h"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace hlpv::hybridsim {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using lpvcert::GainKind;

namespace {

constexpr double kDivergence = 1e100;

bool Finite(const VectorXd& v) { return v.allFinite() && v.norm() < kDivergence; }

}  // namespace

HybridTrajectory Simulate(const lpvcert::LpvSystem& sys, const lpvcert::ControllerGain* gain,
                          const ParamTrajectory& rho, const JumpSequence& jumps,
                          const VectorXd& x0, const VectorXd& u0, const SimOptions& opts) {
  if (!(opts.step > 0.0)) throw std::invalid_argument("step must be > 0");
  if (x0.size() != sys.n) throw std::invalid_argument("initial state has wrong size");
  if (rho.dim() != sys.num_params) throw std::invalid_argument("parameter trajectory size mismatch");
  const bool sampled = gain && gain->kind() == GainKind::kSampledData;
  if (gain && (gain->n() != sys.n || gain->m() != sys.m)) {
    throw std::invalid_argument("gain does not match the system");
  }
  if (sampled && u0.size() != sys.m) throw std::invalid_argument("initial input has wrong size");

  auto eval = [&](const lpvcert::PolyMatrix& m, const std::vector<double>& p) {
    return polyalg::Evaluate(m, lpvcert::EnvPoint(sys, 0.0, p));
  };
  // Flow field for the current interval; `start` is the last jump instant.
  auto field = [&](double t, int interval, double start, const VectorXd& x,
                   const VectorXd& u) -> VectorXd {
    const auto p = rho.Value(t, interval);
    VectorXd dx = eval(sys.A, p) * x;
    if (sampled) {
      dx += eval(sys.B, p) * u;
    } else if (gain) {
      dx += eval(sys.B, p) * (gain->Evaluate(t - start + opts.timer_offset, p) * x);
    }
    return dx;
  };

  HybridTrajectory tr;
  tr.n = sys.n;
  tr.m = sampled ? sys.m : 0;
  VectorXd x = x0;
  VectorXd u = sampled ? u0 : VectorXd();
  const double nan = std::numeric_limits<double>::quiet_NaN();

  std::vector<double> bounds{0.0};
  bounds.insert(bounds.end(), jumps.times.begin(), jumps.times.end());
  bounds.push_back(jumps.horizon);
  auto record = [&](double t, int interval) {
    const double start = bounds[interval];
    const double next = interval + 1 < static_cast<int>(bounds.size()) - 1
                            ? bounds[interval + 1]
                            : jumps.next;
    tr.t.push_back(t);
    tr.x.push_back(x);
    if (sampled) tr.u.push_back(u);
    tr.rho.push_back(rho.Value(t, interval));
    tr.since.push_back(t - start);
    tr.until.push_back(std::isnan(next) ? nan : next - t);
  };

  for (int k = 0; k + 1 < static_cast<int>(bounds.size()); ++k) {
    const double a = bounds[k], b = bounds[k + 1];
    if (k == 0) record(a, 0);
    double t = a;
    while (t < b) {
      double h = std::min(opts.step, b - t);
      // Avoid a sliver step from rounding.
      if (b - (t + h) < 1e-12 * std::max(1.0, std::fabs(b))) h = b - t;
      const VectorXd k1 = field(t, k, a, x, u);
      const VectorXd k2 = field(t + 0.5 * h, k, a, x + 0.5 * h * k1, u);
      const VectorXd k3 = field(t + 0.5 * h, k, a, x + 0.5 * h * k2, u);
      const VectorXd k4 = field(t + h, k, a, x + h * k3, u);
      x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      t = (t + h >= b) ? b : t + h;
      if (!Finite(x)) {
        tr.diverged = true;
        return tr;
      }
      record(t, k);
    }
    if (k + 2 < static_cast<int>(bounds.size())) {
      // Jump at b, with the parameter value before the jump.
      const auto p = rho.Value(b, k);
      tr.jumps.push_back(static_cast<int>(tr.t.size()) - 1);
      if (sampled) {
        const auto split = gain->Split(p);
        const VectorXd u_next = split.K1 * x + split.K2 * u;
        u = u_next;
      }
      x = eval(sys.J, p) * x;
      record(b, k + 1);
    }
  }
  return tr;
}

std::string ToCsv(const HybridTrajectory& tr, const std::vector<double>& v) {
  std::ostringstream os;
  os.precision(17);
  const int np = tr.rho.empty() ? 0 : static_cast<int>(tr.rho[0].size());
  os << "time";
  for (int i = 1; i <= tr.n; ++i) os << ",x" << i;
  for (int i = 1; i <= tr.m; ++i) os << ",u" << i;
  for (int i = 1; i <= np; ++i) os << ",rho" << i;
  os << ",V,jump\n";
  size_t next_jump = 0;
  for (size_t s = 0; s < tr.t.size(); ++s) {
    bool post = false;
    if (next_jump < tr.jumps.size() && static_cast<int>(s) == tr.jumps[next_jump] + 1) {
      post = true;
      ++next_jump;
    }
    os << tr.t[s];
    for (int i = 0; i < tr.n; ++i) os << "," << tr.x[s](i);
    for (int i = 0; i < tr.m; ++i) os << "," << tr.u[s](i);
    for (int i = 0; i < np; ++i) os << "," << tr.rho[s][i];
    os << ",";
    if (s < v.size()) os << v[s];
    os << "," << (post ? 1 : 0) << "\n";
  }
  return os.str();
}

}  // namespace hlpv::hybridsim
