#include "hlpv/hybridsim/lyapunov_eval.h"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "hlpv/lpvcert/lyapunov_field.h"

namespace hlpv::hybridsim {

using lpvcert::Mode;

LyapunovReport EvalLyapunov(const lpvcert::LpvSystem& sys, const lpvcert::Certificate& cert,
                            const HybridTrajectory& tr) {
  const lpvcert::LyapunovField field(sys, cert);
  const bool augmented = cert.mode == Mode::kSynthSd;
  const int dim = augmented ? tr.n + tr.m : tr.n;
  if (field.size() != dim || (augmented && tr.m == 0)) {
    throw std::invalid_argument("certificate does not match the trajectory dimension");
  }
  const bool countdown = cert.mode == Mode::kRangeDwell || cert.mode == Mode::kSynthSd;
  const bool analysis = !lpvcert::IsSynthesis(cert.mode);
  const double eps = analysis && !cert.box1_verbatim ? cert.epsilon : 0.0;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  LyapunovReport rep;
  rep.flow_violation = -std::numeric_limits<double>::infinity();
  rep.jump_violation = -std::numeric_limits<double>::infinity();
  std::vector<double> state(dim);
  for (size_t s = 0; s < tr.t.size(); ++s) {
    const double tau = countdown ? tr.until[s] : tr.since[s];
    if (std::isnan(tau)) {
      rep.v.push_back(nan);
      continue;
    }
    for (int i = 0; i < tr.n; ++i) state[i] = tr.x[s](i);
    if (augmented) {
      for (int i = 0; i < tr.m; ++i) state[tr.n + i] = tr.u[s](i);
    }
    rep.v.push_back(field.Value(state, tau, tr.rho[s]));
  }

  size_t next_jump = 0;
  for (size_t s = 0; s + 1 < tr.t.size(); ++s) {
    if (next_jump < tr.jumps.size() && static_cast<int>(s) == tr.jumps[next_jump]) {
      ++next_jump;
      if (std::isnan(rep.v[s]) || std::isnan(rep.v[s + 1])) continue;
      rep.jump_violation = std::max(rep.jump_violation, rep.v[s + 1] - rep.v[s]);
      ++rep.jumps_checked;
      continue;
    }
    const double h = tr.t[s + 1] - tr.t[s];
    if (!(h > 0.0) || std::isnan(rep.v[s]) || std::isnan(rep.v[s + 1])) continue;
    const double dv = (rep.v[s + 1] - rep.v[s]) / h;
    // Difference quotient paired with the interval midpoint.
    const double x2 = 0.5 * (tr.x[s].squaredNorm() + tr.x[s + 1].squaredNorm());
    rep.flow_violation = std::max(rep.flow_violation, dv + eps * x2);
  }
  if (!std::isfinite(rep.flow_violation)) rep.flow_violation = 0.0;
  if (!std::isfinite(rep.jump_violation)) rep.jump_violation = 0.0;
  return rep;
}

}  // namespace hlpv::hybridsim
