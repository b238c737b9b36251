#include "hlpv/lpvcert/certify.h"

#include <algorithm>
#include <chrono>
#include <stdexcept>

namespace hlpv::lpvcert {

ProgramStats Stats(const sdpcore::SdpProblem& p) {
  ProgramStats s;
  s.rows = p.num_rows();
  s.blocks = static_cast<int>(p.block_dims.size());
  s.free_vars = p.num_free;
  s.primal_vars = p.num_free;
  for (int d : p.block_dims) {
    s.max_block = std::max(s.max_block, d);
    s.primal_vars += static_cast<long>(d) * (d + 1) / 2;
  }
  return s;
}

CertifyResult Certify(const LpvSystem& sys, const ProgramOptions& opts,
                      const sdpcore::SolverOptions& solver) {
  const auto start = std::chrono::steady_clock::now();
  const BuiltProgram built = BuildProgram(sys, opts);
  const auto compiled = built.program.Compile(sdpcore::Sense::kFeasibility);

  CertifyResult r;
  r.stats = Stats(compiled.problem);
  const auto sol = sdpcore::Solve(compiled.problem, solver);
  r.status = sol.status;
  r.margin = sol.margin;
  r.iterations = sol.iterations;
  r.primal_residual = sol.primal_residual;
  r.dual_residual = sol.dual_residual;
  r.message = sol.message;

  if (sol.status == sdpcore::Status::kFeasible) {
    Certificate c;
    c.mode = opts.mode;
    c.degree = opts.degree;
    c.epsilon = opts.epsilon;
    c.dwell = opts.dwell;
    c.tmin = opts.tmin;
    c.tmax = opts.tmax;
    c.box1_verbatim = opts.box1_verbatim;
    c.size = built.lyapunov.rows;
    const auto value = soscomp::ExtractValues(compiled.map, sol, built.lyapunov);
    if (IsSynthesis(opts.mode)) {
      c.R = value;
      c.U = soscomp::ExtractValues(compiled.map, sol, *built.gain);
    } else {
      c.S = value;
    }
    r.certificate = std::move(c);
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

Certificate AsMinDwell(const Certificate& quadratic, double dwell) {
  if (quadratic.mode != Mode::kQuadratic && quadratic.mode != Mode::kRobust) {
    throw std::invalid_argument("expected a quadratic or robust certificate");
  }
  Certificate c = quadratic;
  c.mode = Mode::kMinDwell;
  c.dwell = dwell;
  return c;
}

}  // namespace hlpv::lpvcert
