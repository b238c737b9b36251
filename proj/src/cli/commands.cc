#include "hlpv/cli/commands.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "CLI11.hpp"

#include "hlpv/cli/problem_file.h"
#include "hlpv/cli/result_file.h"
#include "hlpv/hybridsim/lyapunov_eval.h"
#include "hlpv/hybridsim/simulator.h"
#include "hlpv/lpvcert/bisection.h"
#include "hlpv/lpvcert/gain.h"
#include "hlpv/lpvcert/grid_check.h"
#include "hlpv/sdpcore/sdpa_io.h"

namespace hlpv::cli {

namespace {

using lpvcert::Mode;

/// Error in the command line itself; maps to the usage exit code.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> SplitNumbers(const std::string& text, char sep, const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    try {
      size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(flag + ": '" + item + "' is not a number");
    }
  }
  return out;
}

polyalg::ConstantTable ParseAssignments(const std::vector<std::string>& items,
                                        const std::string& flag) {
  polyalg::ConstantTable out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError(flag + ": expected name=value");
    out[item.substr(0, eq)] = SplitNumbers(item.substr(eq + 1), ',', flag).at(0);
  }
  return out;
}

void WriteText(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw UsageError("cannot write " + path);
  f << text;
}

/// Options shared by analyze, synthesize and export-sdpa.
struct ProgramFlags {
  std::string problem;
  std::vector<std::string> constants;
  std::string mode;
  int degree{-1};
  double epsilon{-1.0};
  int multiplier_degree{-2};
  double dwell{0.0};
  std::string range;
  bool verbatim{false};

  void Register(CLI::App* sub) {
    sub->add_option("--problem", problem, "Problem JSON file")->required();
    sub->add_option("--const", constants, "Override a problem constant (name=value)");
    sub->add_option("--degree", degree, "Degree of the Lyapunov (and gain) polynomials");
    sub->add_option("--epsilon", epsilon, "Strictness margin");
    sub->add_option("--multiplier-degree", multiplier_degree, "Degree of SOS multipliers");
    sub->add_option("--dwell", dwell, "Dwell time T");
    sub->add_option("--range", range, "Dwell-time range tmin:tmax");
    sub->add_flag("--verbatim-flow", verbatim, "Drop epsilon from the flow conditions");
  }

  lpvcert::ProgramOptions Options(const ProblemFile& pf, Mode m) const {
    lpvcert::ProgramOptions o;
    o.mode = m;
    o.degree = degree >= 0 ? degree : pf.degree;
    o.epsilon = epsilon >= 0.0 ? epsilon : pf.epsilon;
    o.multiplier_degree = multiplier_degree >= -1 ? multiplier_degree : pf.multiplier_degree;
    o.dwell = dwell;
    o.box1_verbatim = verbatim;
    if (!range.empty()) {
      const auto r = SplitNumbers(range, ':', "--range");
      if (r.size() != 2) throw UsageError("--range: expected tmin:tmax");
      o.tmin = r[0];
      o.tmax = r[1];
    }
    return o;
  }
};

Json OptionsToJson(const lpvcert::ProgramOptions& o) {
  return {{"mode", lpvcert::ModeName(o.mode)},
          {"degree", o.degree},
          {"epsilon", o.epsilon},
          {"dwell", o.dwell},
          {"tmin", o.tmin},
          {"tmax", o.tmax},
          {"multiplier_degree", o.multiplier_degree},
          {"box1_verbatim", o.box1_verbatim}};
}

sdpcore::SolverOptions SolverFrom(const std::vector<std::string>& items) {
  std::string text;
  for (const auto& s : items) text += s + "\n";
  try {
    return sdpcore::ParseSolverOptions(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--solver: ") + e.what());
  }
}

Json GainToJson(const lpvcert::Certificate& c) {
  if (c.mode == Mode::kSynthCt) {
    return {{"kind", "continuous"},
            {"law", "u = K(tau, theta) x, K = U(theta) R(min(tau, dwell), theta)^-1"},
            {"matrices", "certificate/U, certificate/R"}};
  }
  return {{"kind", "sampled-data"},
          {"law", "u+ = [K1 K2](theta) [x; u], [K1 K2] = U(theta) R(0, theta)^-1"},
          {"matrices", "certificate/U, certificate/R"}};
}

/// Solves at a fixed dwell time or bisects, then grid-checks any certificate.
struct Solve {
  std::string command;
  ProgramFlags flags;
  std::string bisect;
  int grid{50};
  std::vector<std::string> solver;
};

Json RunSolve(const Solve& s, Mode mode, std::ostream& err) {
  const ProblemFile pf = LoadProblem(s.flags.problem, ParseAssignments(s.flags.constants, "--const"));
  const lpvcert::ProgramOptions opts = s.flags.Options(pf, mode);
  const auto solver = SolverFrom(s.solver);
  if (s.grid < 2) throw UsageError("--grid must be >= 2");

  Json res = {{"command", s.command}, {"problem", pf.source}, {"options", OptionsToJson(opts)}};
  std::optional<lpvcert::Certificate> cert;
  std::string status;
  if (!s.bisect.empty()) {
    if (mode != Mode::kMinDwell && mode != Mode::kSynthCt) {
      throw UsageError("--bisect applies to min-dwell and ct modes only");
    }
    const auto b = SplitNumbers(s.bisect, ':', "--bisect");
    if (b.size() != 3 || !(b[0] > 0.0) || !(b[1] > b[0]) || !(b[2] > 0.0)) {
      throw UsageError("--bisect: expected lo:hi:tol with 0 < lo < hi and tol > 0");
    }
    const auto br = lpvcert::BisectDwellTime(pf.system, opts, b[0], b[1], b[2], solver);
    res["bisection"] = {{"lo", b[0]},
                        {"hi", b[1]},
                        {"tol", b[2]},
                        {"found", br.found},
                        {"message", br.message},
                        {"warnings", br.warnings},
                        {"probes", ProbesToJson(br.probes)}};
    for (const auto& w : br.warnings) err << "warning: " << w << "\n";
    if (br.found) {
      status = "feasible";
      cert = br.certificate;
      res["dwell"] = br.dwell;
    } else {
      // The upper end decides: infeasible there is a claim, anything else is not.
      status = br.probes.empty() ? "numerical-failure"
                                 : std::string(sdpcore::StatusName(br.probes.front().status));
      if (status == "feasible") status = "numerical-failure";
    }
    res["message"] = br.message;
  } else {
    const auto r = lpvcert::Certify(pf.system, opts, solver);
    status = sdpcore::StatusName(r.status);
    cert = r.certificate;
    res["solver"] = StatsToJson(r);
    res["message"] = r.message;
    if (mode == Mode::kMinDwell || mode == Mode::kSynthCt) res["dwell"] = opts.dwell;
  }

  if (cert) {
    res["certificate"] = CertificateToJson(*cert, pf.names);
    if (lpvcert::IsSynthesis(mode)) res["gain"] = GainToJson(*cert);
    lpvcert::GridSpec spec;
    spec.points = s.grid;
    const auto rep = lpvcert::CheckCertificate(pf.system, *cert, spec);
    res["grid_check"] = GridReportToJson(rep, spec);
    if (!rep.pass) {
      status = "numerical-failure";
      res["message"] = "solver reported feasible but the certificate failed the grid check";
    }
  }
  res["status"] = status;
  return res;
}

Mode SynthMode(const std::string& m) {
  if (m == "ct" || m == "synth-ct") return Mode::kSynthCt;
  if (m == "sd" || m == "synth-sd") return Mode::kSynthSd;
  throw UsageError("--mode must be ct or sd");
}

Mode AnyMode(const std::string& m) {
  if (m == "ct" || m == "sd") return SynthMode(m);
  const auto parsed = lpvcert::ParseMode(m);
  if (!parsed) throw UsageError("unknown mode '" + m + "'");
  return *parsed;
}

struct Simulate {
  std::string gain;
  std::vector<std::string> constants;
  std::string traj{"phase-jump"};
  double nu{-1.0};
  std::uint64_t seed{1};
  double horizon{10.0};
  double step{1e-3};
  std::string x0;
  std::string u0;
  std::string rho;
  double phase{0.0};
  std::string table;
  std::string jumps;
  double dwell{-1.0};
  std::string range;
  double spread{1.0};
  double timer_offset{0.0};
  std::string csv;
};

hybridsim::ParamTrajectory ReadTable(const std::string& path, int dim) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path);
  std::vector<double> times;
  std::vector<std::vector<double>> values;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (lineno == 1 && std::isalpha(static_cast<unsigned char>(line[0]))) continue;
    const auto row = SplitNumbers(line, ',', path + ":" + std::to_string(lineno));
    if (static_cast<int>(row.size()) != dim + 1) {
      throw UsageError(path + ":" + std::to_string(lineno) + ": expected time and " +
                       std::to_string(dim) + " parameter values");
    }
    times.push_back(row[0]);
    values.emplace_back(row.begin() + 1, row.end());
  }
  try {
    return hybridsim::ParamTrajectory::Table(std::move(times), std::move(values));
  } catch (const std::invalid_argument& e) {
    throw UsageError(path + ": " + e.what());
  }
}

Eigen::VectorXd VectorFlag(const std::string& text, int size, double fill, const char* flag) {
  Eigen::VectorXd v = Eigen::VectorXd::Constant(size, fill);
  if (text.empty()) return v;
  const auto vals = SplitNumbers(text, ',', flag);
  if (static_cast<int>(vals.size()) != size) {
    throw UsageError(std::string(flag) + ": expected " + std::to_string(size) + " values");
  }
  for (int i = 0; i < size; ++i) v(i) = vals[i];
  return v;
}

Json RunSimulate(const Simulate& s, std::ostream& err) {
  const ResultFile rf = LoadResult(s.gain);
  if (!rf.certificate) throw UsageError(s.gain + " carries no certificate");
  ProblemFile pf = rf.problem;
  if (!s.constants.empty()) {
    pf = ParseProblem(rf.problem.source, ParseAssignments(s.constants, "--const"));
  }
  const auto& sys = pf.system;
  const auto& cert = *rf.certificate;
  if (!(s.horizon > 0.0)) throw UsageError("--horizon must be > 0");
  const bool countdown = cert.mode == Mode::kRangeDwell || cert.mode == Mode::kSynthSd;

  hybridsim::JumpSequence jumps;
  if (!s.jumps.empty()) {
    jumps = hybridsim::ExplicitJumps(SplitNumbers(s.jumps, ',', "--jumps"), s.horizon);
  } else if (countdown || !s.range.empty()) {
    double tmin = cert.tmin, tmax = cert.tmax;
    if (!s.range.empty()) {
      const auto r = SplitNumbers(s.range, ':', "--range");
      if (r.size() != 2) throw UsageError("--range: expected tmin:tmax");
      tmin = r[0];
      tmax = r[1];
    }
    jumps = hybridsim::RangeDwellJumps(tmin, tmax, s.horizon, s.seed);
  } else {
    const double dwell = s.dwell >= 0.0 ? s.dwell : cert.dwell;
    jumps = dwell > 0.0 ? hybridsim::MinDwellJumps(dwell, s.horizon, s.seed, s.spread)
                        : hybridsim::ExplicitJumps({}, s.horizon);
  }

  std::vector<std::string> warnings;
  const int np = sys.num_params;
  const int intervals = static_cast<int>(jumps.times.size()) + 1;
  hybridsim::ParamTrajectory traj = hybridsim::ParamTrajectory::Constant({});
  if (s.traj == "constant") {
    std::vector<double> value(np);
    for (int i = 0; i < np; ++i) value[i] = 0.5 * (sys.box_lo[i] + sys.box_hi[i]);
    if (!s.rho.empty()) {
      const auto v = VectorFlag(s.rho, np, 0.0, "--rho");
      value.assign(v.data(), v.data() + np);
    }
    traj = hybridsim::ParamTrajectory::Constant(value);
  } else if (s.traj == "sin" || s.traj == "phase-jump") {
    if (!(s.nu >= 0.0)) throw UsageError("--nu is required for sinusoidal trajectories");
    if (!sys.h.empty()) {
      throw UsageError("sinusoidal trajectories leave an equality-constrained set; use --traj table");
    }
    traj = s.traj == "sin"
               ? hybridsim::ParamTrajectory::Sinusoid(sys.box_lo, sys.box_hi, s.nu, s.phase)
               : hybridsim::ParamTrajectory::PhaseJump(sys.box_lo, sys.box_hi, s.nu, s.seed,
                                                       intervals);
    // Constant vertex sets give a box the rate bound must fit in.
    for (int i = 0; i < np; ++i) {
      double lo = 0.0, hi = 0.0;
      bool constant = true;
      for (const auto& v : sys.vertices) {
        constant = constant && v[i].degree() <= 0;
        const double c = polyalg::Evaluate(v[i], lpvcert::EnvPoint(sys, 0.0, sys.box_lo));
        lo = std::min(lo, c);
        hi = std::max(hi, c);
      }
      if (constant && (s.nu > hi + 1e-12 || -s.nu < lo - 1e-12)) {
        warnings.push_back("parameter " + pf.param_names[i] +
                           ": rate bound nu exceeds the certified derivative set");
      }
    }
    if (countdown && s.traj == "phase-jump") {
      warnings.push_back(
          "range dwell-time certificates assume parameters continuous at jumps; "
          "phase-jump trajectories are outside the certified class");
    }
  } else if (s.traj == "table") {
    if (s.table.empty()) throw UsageError("--traj table needs --table FILE");
    traj = ReadTable(s.table, np);
  } else {
    throw UsageError("--traj must be constant, sin, phase-jump or table");
  }

  std::optional<lpvcert::ControllerGain> gain;
  if (lpvcert::IsSynthesis(cert.mode)) gain.emplace(sys, cert);
  const bool sampled = cert.mode == Mode::kSynthSd;
  const Eigen::VectorXd x0 = VectorFlag(s.x0, sys.n, 1.0, "--x0");
  const Eigen::VectorXd u0 = sampled ? VectorFlag(s.u0, sys.m, 0.0, "--u0") : Eigen::VectorXd();
  hybridsim::SimOptions so;
  so.step = s.step;
  so.timer_offset = s.timer_offset;
  const auto tr = hybridsim::Simulate(sys, gain ? &*gain : nullptr, traj, jumps, x0, u0, so);
  const auto rep = hybridsim::EvalLyapunov(sys, cert, tr);
  if (!s.csv.empty()) WriteText(s.csv, hybridsim::ToCsv(tr, rep.v));

  const double n0 = tr.x.front().norm();
  const double n1 = tr.x.back().norm();
  for (const auto& w : warnings) err << "warning: " << w << "\n";
  Json res = {{"command", "simulate"},
              {"status", tr.diverged ? "diverged" : "success"},
              {"problem", pf.source},
              {"certificate", rf.doc["certificate"]},
              {"warnings", warnings}};
  res["simulation"] = {{"source", s.gain},
                       {"traj", s.traj},
                       {"nu", s.nu},
                       {"seed", s.seed},
                       {"horizon", s.horizon},
                       {"step", s.step},
                       {"timer_offset", s.timer_offset},
                       {"closed_loop", gain.has_value()},
                       {"x0", std::vector<double>(x0.data(), x0.data() + x0.size())},
                       {"jump_times", jumps.times},
                       {"final_time", tr.t.back()},
                       {"samples", tr.t.size()},
                       {"initial_norm", n0},
                       {"final_norm", n1},
                       {"norm_ratio", n0 > 0.0 ? n1 / n0 : 0.0},
                       {"diverged", tr.diverged},
                       {"csv", s.csv}};
  res["lyapunov"] = {{"flow_violation", rep.flow_violation},
                     {"jump_violation", rep.jump_violation},
                     {"jumps_checked", rep.jumps_checked}};
  return res;
}

Json RunCheck(const std::string& path, const lpvcert::GridSpec& spec, std::ostream& err) {
  const ResultFile rf = LoadResult(path);
  if (!rf.certificate) throw UsageError(path + " carries no certificate");
  const auto rep = lpvcert::CheckCertificate(rf.problem.system, *rf.certificate, spec);
  if (!rep.pass) {
    if (rep.min_eig < rep.min_eig_threshold) {
      err << "fail: positivity min_eig=" << rep.min_eig << " at " << rep.min_eig_point << "\n";
    }
    for (const auto& c : rep.conditions) {
      if (!c.pass) err << "fail: " << c.name << " max_eig=" << c.max_eig << " at " << c.worst_point << "\n";
    }
  }
  return {{"command", "check"},
          {"status", rep.pass ? "pass" : "fail"},
          {"problem", rf.problem.source},
          {"certificate", rf.doc["certificate"]},
          {"source", path},
          {"grid_check", GridReportToJson(rep, spec)}};
}

Json RunExport(const ProgramFlags& flags, const std::string& path) {
  const ProblemFile pf = LoadProblem(flags.problem, ParseAssignments(flags.constants, "--const"));
  const auto opts = flags.Options(pf, AnyMode(flags.mode));
  const auto built = lpvcert::BuildProgram(pf.system, opts);
  const auto compiled = built.program.Compile(sdpcore::Sense::kFeasibility);
  WriteText(path, sdpcore::ExportSdpa(compiled.problem));
  const auto stats = lpvcert::Stats(compiled.problem);
  return {{"command", "export-sdpa"},
          {"status", "success"},
          {"problem", pf.source},
          {"options", OptionsToJson(opts)},
          {"file", path},
          {"rows", stats.rows},
          {"blocks", stats.blocks},
          {"max_block", stats.max_block},
          {"free_vars", stats.free_vars},
          {"primal_vars", stats.primal_vars}};
}

void Emit(const Json& res, const std::string& out_path, std::ostream& out) {
  const std::string text = res.dump(2) + "\n";
  if (out_path.empty()) {
    out << text;
  } else {
    WriteText(out_path, text);
  }
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dwell-time certification and synthesis for LPV systems with jumps", "hlpv"};
  app.require_subcommand(1);
  std::string out_path;

  Solve analyze;
  analyze.command = "analyze";
  analyze.flags.mode = "min-dwell";
  auto* a = app.add_subcommand("analyze", "Certify stability of the open-loop system");
  analyze.flags.Register(a);
  a->add_option("--mode", analyze.flags.mode, "min-dwell, quadratic, robust or range-dwell");
  a->add_option("--bisect", analyze.bisect, "Bisect the dwell time over lo:hi:tol");
  a->add_option("--grid", analyze.grid, "Grid points per axis for the certificate check");
  a->add_option("--solver", analyze.solver, "Solver option key=value");
  a->add_option("--out", out_path, "Result JSON file");

  Solve synth;
  synth.command = "synthesize";
  synth.flags.mode = "ct";
  auto* y = app.add_subcommand("synthesize", "Synthesize a state-feedback gain");
  synth.flags.Register(y);
  y->add_option("--mode", synth.flags.mode, "ct or sd");
  y->add_option("--bisect", synth.bisect, "Bisect the dwell time over lo:hi:tol (ct)");
  y->add_option("--grid", synth.grid, "Grid points per axis for the certificate check");
  y->add_option("--solver", synth.solver, "Solver option key=value");
  y->add_option("--out", out_path, "Result JSON file");

  Simulate sim;
  auto* s = app.add_subcommand("simulate", "Simulate the hybrid system under a certificate");
  s->add_option("--gain", sim.gain, "Result JSON with a certificate")->required();
  s->add_option("--const", sim.constants, "Override a problem constant (name=value)");
  s->add_option("--traj", sim.traj, "constant, sin, phase-jump or table");
  s->add_option("--nu", sim.nu, "Rate bound of sinusoidal trajectories");
  s->add_option("--seed", sim.seed, "Seed for jump times and phases");
  s->add_option("--horizon", sim.horizon, "Final time");
  s->add_option("--step", sim.step, "Integration step");
  s->add_option("--x0", sim.x0, "Initial state, comma separated (default all ones)");
  s->add_option("--u0", sim.u0, "Initial held input for sampled-data loops");
  s->add_option("--rho", sim.rho, "Constant parameter value, comma separated");
  s->add_option("--phase", sim.phase, "Phase of the sin trajectory");
  s->add_option("--table", sim.table, "CSV of time,rho1,.. rows for --traj table");
  s->add_option("--jumps", sim.jumps, "Explicit jump times, comma separated");
  s->add_option("--dwell", sim.dwell, "Minimum dwell time of generated jumps");
  s->add_option("--range", sim.range, "Dwell-time range tmin:tmax of generated jumps");
  s->add_option("--spread", sim.spread, "Generated gaps lie in [T, T(1+spread)]");
  s->add_option("--timer-offset", sim.timer_offset, "Offset of the controller clock");
  s->add_option("--csv", sim.csv, "Trajectory CSV file");
  s->add_option("--out", out_path, "Result JSON file");

  std::string cert_path;
  lpvcert::GridSpec spec;
  auto* c = app.add_subcommand("check", "Re-check a certificate on a grid");
  c->add_option("--cert", cert_path, "Result JSON with a certificate")->required();
  c->add_option("--grid", spec.points, "Grid points per axis");
  c->add_option("--sigma-points", spec.sigma_points, "Grid points on the dwell range");
  c->add_option("--tol", spec.tol, "Eigenvalue tolerance");
  c->add_option("--out", out_path, "Result JSON file");

  ProgramFlags exp;
  exp.mode = "min-dwell";
  std::string sdpa_path;
  auto* e = app.add_subcommand("export-sdpa", "Write the compiled SDP in SDPA format");
  exp.Register(e);
  e->add_option("--mode", exp.mode, "Any analysis mode, ct or sd");
  e->add_option("--out", sdpa_path, "SDPA file")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitSuccess;
  } catch (const CLI::ParseError& ex) {
    err << "usage error: " << ex.what() << "\n" << app.help();
    return kExitUsage;
  }

  try {
    Json res;
    if (a->parsed()) {
      const auto mode = lpvcert::ParseMode(analyze.flags.mode);
      if (!mode || lpvcert::IsSynthesis(*mode)) {
        throw UsageError("--mode must be min-dwell, quadratic, robust or range-dwell");
      }
      res = RunSolve(analyze, *mode, err);
    } else if (y->parsed()) {
      res = RunSolve(synth, SynthMode(synth.flags.mode), err);
    } else if (s->parsed()) {
      res = RunSimulate(sim, err);
    } else if (c->parsed()) {
      if (spec.points < 2 || spec.sigma_points < 1 || !(spec.tol >= 0.0)) {
        throw UsageError("--grid must be >= 2, --sigma-points >= 1, --tol >= 0");
      }
      res = RunCheck(cert_path, spec, err);
    } else {
      res = RunExport(exp, sdpa_path);
    }
    const std::string status = res["status"].get<std::string>();
    Emit(res, out_path, out);
    err << res["command"].get<std::string>() << ": " << status;
    if (res.contains("dwell")) err << " (dwell " << res["dwell"].get<double>() << ")";
    err << "\n";
    return ExitCodeForStatus(status);
  } catch (const SchemaError& ex) {
    err << "schema error: " << ex.what() << "\n";
    return kExitUsage;
  } catch (const UsageError& ex) {
    err << "usage error: " << ex.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& ex) {
    err << "invalid input: " << ex.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace hlpv::cli
