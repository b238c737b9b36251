#include "hlpv/lpvcert/builders.h"

#include <array>
#include <stdexcept>
#include <string>

namespace hlpv::lpvcert {

using polyalg::Monomial;
using soscomp::AffinePolyMatrix;
using soscomp::DecisionMatrix;
using soscomp::Lift;
using soscomp::SosConstraint;

namespace {

constexpr std::array<std::pair<Mode, std::string_view>, 6> kModeNames{{
    {Mode::kMinDwell, "min-dwell"},
    {Mode::kQuadratic, "quadratic"},
    {Mode::kRobust, "robust"},
    {Mode::kRangeDwell, "range-dwell"},
    {Mode::kSynthCt, "synth-ct"},
    {Mode::kSynthSd, "synth-sd"},
}};

Polynomial Var(const LpvSystem& sys, int v) {
  return Polynomial::Term(Monomial::Var(sys.env.size(), v), 1.0);
}

Polynomial Const(const LpvSystem& sys, double c) {
  return Polynomial::Constant(sys.env.size(), c);
}

/// (v − lo)(hi − v) ≥ 0.
Polynomial Interval(const LpvSystem& sys, int v, double lo, double hi) {
  return (Var(sys, v) - Const(sys, lo)) * (Const(sys, hi) - Var(sys, v));
}

template <typename Coeff>
polyalg::BasicPolyMatrix<Coeff> At(const polyalg::BasicPolyMatrix<Coeff>& m, int var,
                                   const Polynomial& value) {
  auto out = m.Substitute(var, value);
  out.set_symmetric(m.symmetric());
  return out;
}

std::vector<int> Concat(std::vector<int> a, const std::vector<int>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

std::vector<Polynomial> Concat(std::vector<Polynomial> a, const std::vector<Polynomial>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

std::vector<Polynomial> Copies(const LpvSystem& sys, const std::vector<Polynomial>& ps) {
  std::vector<Polynomial> out;
  for (const auto& p : ps) out.push_back(ToCopy(sys, p));
  return out;
}

std::vector<std::vector<Polynomial>> VerticesOrZero(const LpvSystem& sys) {
  if (sys.num_params == 0) return {{}};
  return sys.vertices;
}

void CheckCommon(const LpvSystem& sys, const ProgramOptions& o) {
  sys.Validate();
  if (o.degree < 0) throw std::invalid_argument("degree must be >= 0");
  if (!(o.epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  if (UsesVertices(o.mode) && sys.num_params > 0 && sys.vertices.empty()) {
    throw std::invalid_argument(std::string(ModeName(o.mode)) +
                                " requires derivative vertices");
  }
  switch (o.mode) {
    case Mode::kMinDwell:
    case Mode::kSynthCt:
      if (!(o.dwell > 0.0)) throw std::invalid_argument("dwell time must be > 0");
      break;
    case Mode::kRangeDwell:
    case Mode::kSynthSd:
      if (!(o.tmin > 0.0 && o.tmin <= o.tmax)) {
        throw std::invalid_argument("dwell range must satisfy 0 < T_min <= T_max");
      }
      break;
    case Mode::kQuadratic:
    case Mode::kRobust:
      if (!sys.JIsIdentity()) {
        throw std::invalid_argument(std::string(ModeName(o.mode)) +
                                    " mode requires J = I");
      }
      break;
  }
}

struct Builder {
  const LpvSystem& sys;
  const ProgramOptions& o;
  BuiltProgram& out;

  int t() const { return sys.t_var(); }
  std::vector<int> pv() const { return sys.p_vars(); }
  std::vector<int> tp() const { return Concat({sys.t_var()}, sys.p_vars()); }
  std::vector<int> sp() const { return Concat({sys.s_var()}, sys.p_vars()); }
  double flow_margin() const { return o.box1_verbatim ? 0.0 : o.epsilon; }

  void Add(std::string label, AffinePolyMatrix expr, std::vector<int> vars,
           std::vector<Polynomial> ineq, std::vector<Polynomial> eq, double margin) {
    SosConstraint c;
    c.label = std::move(label);
    expr.set_symmetric(true);
    c.expression = std::move(expr);
    c.vars = std::move(vars);
    c.inequalities = std::move(ineq);
    c.equalities = std::move(eq);
    c.margin = margin;
    c.multiplier_degree = o.multiplier_degree;
    out.program.AddSosConstraint(c);
  }

  AffinePolyMatrix He(const PolyMatrix& a, const AffinePolyMatrix& s) const {
    return polyalg::Multiply(s, a).He();
  }

  void MinDwell() {
    const auto S = out.program.DeclareDecision(sys.n, true, tp(), o.degree);
    out.lyapunov = S;
    const auto ineq = sys.Inequalities();
    const auto timed = Concat(ineq, {Interval(sys, t(), 0.0, o.dwell)});
    Add("positivity", S.value, tp(), timed, sys.h, o.epsilon);

    const auto verts = VerticesOrZero(sys);
    for (size_t k = 0; k < verts.size(); ++k) {
      AffinePolyMatrix lhs = S.value.Diff(t()) + DirectionalDiff(S.value, pv(), verts[k]) +
                             He(sys.A, S.value);
      Add("flow[" + std::to_string(k) + "]", -lhs, tp(), timed, sys.h, flow_margin());
    }

    const auto s_end = At(S.value, t(), Const(sys, o.dwell));
    const auto s_start = At(S.value, t(), Const(sys, 0.0));
    const auto j_eta = ToCopy(sys, sys.J);
    AffinePolyMatrix jump =
        ToCopy(sys, s_end) - polyalg::Multiply(j_eta.Transpose(), polyalg::Multiply(s_start, j_eta));
    Add("jump", jump, Concat(sys.p_vars(), sys.q_vars()), Concat(ineq, Copies(sys, ineq)),
        Concat(sys.h, Copies(sys, sys.h)), o.epsilon);

    for (size_t k = 0; k < verts.size(); ++k) {
      AffinePolyMatrix lhs = DirectionalDiff(s_end, pv(), verts[k]) + He(sys.A, s_end);
      Add("boundary[" + std::to_string(k) + "]", -lhs, pv(), ineq, sys.h, o.epsilon);
    }
  }

  void Quadratic() {
    const auto P = out.program.DeclareDecision(sys.n, true, {}, 0);
    out.lyapunov = P;
    Add("positivity", P.value, {}, {}, {}, o.epsilon);
    SosConstraint c;
    c.label = "flow";
    c.expression = -He(sys.A, P.value);
    c.expression.set_symmetric(true);
    c.vars = pv();
    c.inequalities = sys.Inequalities();
    c.equalities = sys.h;
    c.margin = o.epsilon;
    c.multiplier_degree = o.multiplier_degree >= 0 ? o.multiplier_degree : o.degree;
    out.program.AddSosConstraint(c);
  }

  void Robust() {
    const auto P = out.program.DeclareDecision(sys.n, true, pv(), o.degree);
    out.lyapunov = P;
    const auto ineq = sys.Inequalities();
    Add("positivity", P.value, pv(), ineq, sys.h, o.epsilon);
    const auto verts = VerticesOrZero(sys);
    for (size_t k = 0; k < verts.size(); ++k) {
      AffinePolyMatrix lhs = DirectionalDiff(P.value, pv(), verts[k]) + He(sys.A, P.value);
      Add("flow[" + std::to_string(k) + "]", -lhs, pv(), ineq, sys.h, o.epsilon);
    }
  }

  void RangeDwell() {
    const auto S = out.program.DeclareDecision(sys.n, true, tp(), o.degree);
    out.lyapunov = S;
    const auto ineq = sys.Inequalities();
    const auto timed = Concat(ineq, {Interval(sys, t(), 0.0, o.tmax)});
    Add("positivity", S.value, tp(), timed, sys.h, o.epsilon);

    const auto verts = VerticesOrZero(sys);
    for (size_t k = 0; k < verts.size(); ++k) {
      AffinePolyMatrix lhs = -S.value.Diff(t()) + DirectionalDiff(S.value, pv(), verts[k]) +
                             He(sys.A, S.value);
      Add("flow[" + std::to_string(k) + "]", -lhs, tp(), timed, sys.h, flow_margin());
    }

    const auto s_sigma = At(S.value, t(), Var(sys, sys.s_var()));
    const auto s_zero = At(S.value, t(), Const(sys, 0.0));
    AffinePolyMatrix jump =
        s_zero - polyalg::Multiply(sys.J.Transpose(), polyalg::Multiply(s_sigma, sys.J));
    Add("jump", jump, sp(), Concat(ineq, {Interval(sys, sys.s_var(), o.tmin, o.tmax)}), sys.h,
        o.epsilon);
  }

  void SynthCt() {
    const auto R = out.program.DeclareDecision(sys.n, true, tp(), o.degree);
    const auto U = out.program.DeclareRectangular(sys.m, sys.n, tp(), o.degree);
    out.lyapunov = R;
    out.gain = U;
    const auto ineq = sys.Inequalities();
    const auto timed = Concat(ineq, {Interval(sys, t(), 0.0, o.dwell)});
    Add("positivity", R.value, tp(), timed, sys.h, o.epsilon);

    AffinePolyMatrix phi = polyalg::Multiply(sys.A, R.value) + polyalg::Multiply(sys.B, U.value);
    const auto verts = VerticesOrZero(sys);
    for (size_t k = 0; k < verts.size(); ++k) {
      AffinePolyMatrix lhs =
          -R.value.Diff(t()) - DirectionalDiff(R.value, pv(), verts[k]) + phi.He();
      Add("flow[" + std::to_string(k) + "]", -lhs, tp(), timed, sys.h, flow_margin());
    }

    const auto r_end = At(R.value, t(), Const(sys, o.dwell));
    const auto r_start = At(R.value, t(), Const(sys, 0.0));
    const auto j_eta = ToCopy(sys, sys.J);
    AffinePolyMatrix jump =
        r_start - polyalg::Multiply(j_eta, polyalg::Multiply(ToCopy(sys, r_end), j_eta.Transpose()));
    Add("jump", jump, Concat(sys.p_vars(), sys.q_vars()), Concat(ineq, Copies(sys, ineq)),
        Concat(sys.h, Copies(sys, sys.h)), o.epsilon);

    const auto phi_end = phi.Substitute(t(), Const(sys, o.dwell));
    for (size_t k = 0; k < verts.size(); ++k) {
      AffinePolyMatrix lhs = -DirectionalDiff(r_end, pv(), verts[k]) + phi_end.He();
      Add("boundary[" + std::to_string(k) + "]", -lhs, pv(), ineq, sys.h, o.epsilon);
    }
  }

  void SynthSd() {
    const auto aug = Augment(sys);
    const int nz = sys.n + sys.m;
    const auto R = out.program.DeclareDecision(nz, true, tp(), o.degree);
    const auto U = out.program.DeclareRectangular(sys.m, nz, pv(), o.degree);
    out.lyapunov = R;
    out.gain = U;
    const auto ineq = sys.Inequalities();
    const auto timed = Concat(ineq, {Interval(sys, t(), 0.0, o.tmax)});
    Add("positivity", R.value, tp(), timed, sys.h, o.epsilon);

    const auto verts = VerticesOrZero(sys);
    for (size_t k = 0; k < verts.size(); ++k) {
      AffinePolyMatrix lhs = R.value.Diff(t()) - DirectionalDiff(R.value, pv(), verts[k]) +
                             polyalg::Multiply(aug.A, R.value).He();
      Add("flow[" + std::to_string(k) + "]", -lhs, tp(), timed, sys.h, flow_margin());
    }

    const auto r_sigma = At(R.value, t(), Var(sys, sys.s_var()));
    const auto r_zero = At(R.value, t(), Const(sys, 0.0));
    AffinePolyMatrix off = polyalg::Multiply(aug.J, r_zero) + polyalg::Multiply(aug.B, U.value);
    // The block LMI [[−R(σ), J̃R(0)+B̃U], [⋆, −R(0)]] ⪯ 0, stated as its negation.
    AffinePolyMatrix jump(2 * nz, 2 * nz, sys.env.size());
    jump.SetBlock(0, 0, r_sigma);
    jump.SetBlock(0, nz, -off);
    jump.SetBlock(nz, 0, -off.Transpose());
    jump.SetBlock(nz, nz, r_zero);
    Add("jump", jump, sp(), Concat(ineq, {Interval(sys, sys.s_var(), o.tmin, o.tmax)}), sys.h,
        o.epsilon);
  }
};

bool AllZero(const PolyMatrix& m) {
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      if (!m(i, j).IsZero()) return false;
    }
  }
  return true;
}

}  // namespace

std::string_view ModeName(Mode mode) {
  for (const auto& [m, name] : kModeNames) {
    if (m == mode) return name;
  }
  return "unknown";
}

std::optional<Mode> ParseMode(std::string_view name) {
  for (const auto& [m, n] : kModeNames) {
    if (n == name) return m;
  }
  return std::nullopt;
}

bool IsSynthesis(Mode mode) { return mode == Mode::kSynthCt || mode == Mode::kSynthSd; }

bool UsesVertices(Mode mode) { return mode != Mode::kQuadratic; }

AugmentedSystem Augment(const LpvSystem& sys) {
  const int nz = sys.n + sys.m;
  const int ar = sys.env.size();
  AugmentedSystem a{PolyMatrix(nz, nz, ar), PolyMatrix(nz, nz, ar), PolyMatrix(nz, sys.m, ar)};
  a.A.SetBlock(0, 0, sys.A);
  a.A.SetBlock(0, sys.n, sys.B);
  a.J.SetBlock(0, 0, sys.J);
  for (int i = 0; i < sys.m; ++i) a.B(sys.n + i, i) = Polynomial::Constant(ar, 1.0);
  return a;
}

BuiltProgram BuildAnalysisProgram(const LpvSystem& sys, const ProgramOptions& opts) {
  if (IsSynthesis(opts.mode)) throw std::invalid_argument("not an analysis mode");
  CheckCommon(sys, opts);
  BuiltProgram out;
  out.program = soscomp::SosProgram(sys.env.size());
  out.options = opts;
  Builder b{sys, opts, out};
  switch (opts.mode) {
    case Mode::kMinDwell: b.MinDwell(); break;
    case Mode::kQuadratic: b.Quadratic(); break;
    case Mode::kRobust: b.Robust(); break;
    case Mode::kRangeDwell: b.RangeDwell(); break;
    default: break;
  }
  return out;
}

BuiltProgram BuildSynthesisProgram(const LpvSystem& sys, const ProgramOptions& opts) {
  if (!IsSynthesis(opts.mode)) throw std::invalid_argument("not a synthesis mode");
  CheckCommon(sys, opts);
  if (sys.m < 1) throw std::invalid_argument("synthesis requires an input (m >= 1)");
  if (AllZero(sys.B)) throw std::invalid_argument("input matrix B is zero; nothing to synthesize");
  BuiltProgram out;
  out.program = soscomp::SosProgram(sys.env.size());
  out.options = opts;
  Builder b{sys, opts, out};
  if (opts.mode == Mode::kSynthCt) {
    b.SynthCt();
  } else {
    b.SynthSd();
  }
  return out;
}

BuiltProgram BuildProgram(const LpvSystem& sys, const ProgramOptions& opts) {
  return IsSynthesis(opts.mode) ? BuildSynthesisProgram(sys, opts)
                                : BuildAnalysisProgram(sys, opts);
}

}  // namespace hlpv::lpvcert
