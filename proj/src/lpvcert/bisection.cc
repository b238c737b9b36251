#include "hlpv/lpvcert/bisection.h"

#include <cstdio>
#include <stdexcept>

namespace hlpv::lpvcert {

namespace {

bool Feasible(const Probe& p) { return p.status == sdpcore::Status::kFeasible; }

}  // namespace

std::vector<std::string> MonotonicityWarnings(const std::vector<Probe>& probes) {
  std::vector<std::string> out;
  for (const auto& a : probes) {
    if (!Feasible(a)) continue;
    for (const auto& b : probes) {
      if (Feasible(b) || !(b.dwell > a.dwell)) continue;
      char buf[160];
      std::snprintf(buf, sizeof buf,
                    "non-monotone feasibility: feasible at %.6g but %s at %.6g", a.dwell,
                    std::string(sdpcore::StatusName(b.status)).c_str(), b.dwell);
      out.emplace_back(buf);
    }
  }
  return out;
}

BisectionResult BisectDwellTime(const LpvSystem& sys, const ProgramOptions& opts, double lo,
                                double hi, double tol, const sdpcore::SolverOptions& solver) {
  if (opts.mode != Mode::kMinDwell && opts.mode != Mode::kSynthCt) {
    throw std::invalid_argument("bisection requires min-dwell or synth-ct mode");
  }
  if (!(lo > 0.0 && lo < hi)) throw std::invalid_argument("search range must satisfy 0 < lo < hi");
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be > 0");

  BisectionResult r;
  auto probe = [&](double dwell) {
    ProgramOptions o = opts;
    o.dwell = dwell;
    auto c = Certify(sys, o, solver);
    r.probes.push_back({dwell, c.status, c.margin, c.seconds});
    if (c.status != sdpcore::Status::kFeasible) return false;
    r.certificate = std::move(c.certificate);
    r.dwell = dwell;
    return true;
  };

  if (!probe(hi)) {
    r.message = "no certificate in range";
  } else if (probe(lo)) {
    r.found = true;
    r.message = "feasible at lower bound";
  } else {
    r.found = true;
    double a = lo, b = hi;
    while (b - a > tol) {
      const double mid = 0.5 * (a + b);
      (probe(mid) ? b : a) = mid;
    }
  }
  r.warnings = MonotonicityWarnings(r.probes);
  return r;
}

}  // namespace hlpv::lpvcert
