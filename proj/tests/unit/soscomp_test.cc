#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "hlpv/polyalg/parse.h"
#include "hlpv/polyalg/var_env.h"
#include "hlpv/sdpcore/sdpa_io.h"
#include "hlpv/soscomp/sos_program.h"

namespace hlpv::soscomp {
namespace {

using polyalg::Polynomial;
using polyalg::PolyMatrix;
using polyalg::VarEnv;
using sdpcore::Status;

Polynomial P(const VarEnv& env, const std::string& s) {
  return polyalg::ParsePolynomial(s, env);
}

AffinePolyMatrix Scalar(const Polynomial& p) {
  PolyMatrix m(1, 1, p.arity());
  m(0, 0) = p;
  return Lift(m);
}

// Coefficient-wise max |a − b|.
double MaxDiff(const PolyMatrix& a, const PolyMatrix& b) {
  double worst = 0.0;
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) {
      const Polynomial d = a(i, j) - b(i, j);
      for (const auto& [m, c] : d.terms()) {
        worst = std::max(worst, std::fabs(c));
      }
    }
  }
  return worst;
}

// Reassembles Gram form + multiplier terms + εI and compares to the
// expression evaluated at the solution.
double ReconstructionError(const SosProgram& prog, const CompiledProgram& cp,
                           const sdpcore::SdpSolution& sol) {
  const auto values = UnknownValues(cp.map, sol);
  double worst = 0.0;
  for (const auto& cc : cp.map.constraints) {
    PolyMatrix sum = GramForm(cc.basis, cc.size, sol.x[cc.block], prog.arity());
    for (size_t k = 0; k < cc.inequalities.size(); ++k) {
      sum += polyalg::Multiply(cc.inequalities[k],
                               EvaluateUnknowns(cc.sos_multipliers[k].value, values));
    }
    for (size_t k = 0; k < cc.equalities.size(); ++k) {
      sum += polyalg::Multiply(cc.equalities[k],
                               EvaluateUnknowns(cc.eq_multipliers[k].value, values));
    }
    sum += PolyMatrix::Identity(cc.size, prog.arity(), cc.margin);
    worst = std::max(worst, MaxDiff(sum, EvaluateUnknowns(cc.expression, values)));
  }
  return worst;
}

TEST(AffineExpr, Arithmetic) {
  const AffineExpr a = AffineExpr::Unknown(2, 3.0) + AffineExpr(1.0);
  const AffineExpr b = AffineExpr::Unknown(0) - AffineExpr::Unknown(2, 3.0);
  const AffineExpr s = a + b;
  EXPECT_EQ(s.constant(), 1.0);
  ASSERT_EQ(s.terms().size(), 1u);
  EXPECT_EQ(s.terms()[0], (std::pair<int, double>{0, 1.0}));
  EXPECT_TRUE(IsZeroCoeff(a - a));
  EXPECT_EQ((a * AffineExpr(2.0)).terms()[0].second, 6.0);
  EXPECT_THROW(a * b, std::domain_error);
  const std::vector<double> vals{1.0, 0.0, 2.0};
  EXPECT_DOUBLE_EQ(a.Evaluate(vals), 7.0);
}

TEST(SosProgram, UnknownCounts) {
  {
    SosProgram prog(3);
    EXPECT_EQ(prog.DeclareDecision(2, true, {0, 1}, 2).unknowns.size(), 18u);
  }
  {
    SosProgram prog(3);
    EXPECT_EQ(prog.DeclareDecision(1, true, {0, 1}, 0).unknowns.size(), 1u);
  }
  {
    SosProgram prog(3);
    EXPECT_EQ(prog.DeclareDecision(4, true, {0, 1, 2}, 2).unknowns.size(), 100u);
  }
  SosProgram prog(2);
  EXPECT_EQ(prog.DeclareRectangular(1, 2, {0, 1}, 1).unknowns.size(), 6u);
  EXPECT_THROW(prog.DeclareDecision(2, true, {0}, -1), std::invalid_argument);
}

TEST(SosProgram, MultiplierBlockStructure) {
  const VarEnv env = VarEnv::Standard(1);  // t, p1, q1
  const int t = env.Get("t").index, p = env.Get("p1").index;
  SosProgram prog(env.size());
  const DecisionMatrix s = prog.DeclareDecision(1, true, {t, p}, 2);
  SosConstraint c;
  c.expression = s.value;
  c.vars = {t, p};
  c.inequalities = {P(env, "(p1 + 2)*(2 - p1)"), P(env, "t*(1 - t)")};
  c.margin = 1e-3;
  prog.AddSosConstraint(c);
  EXPECT_EQ(prog.num_blocks(), 3);

  SosProgram plain(env.size());
  SosConstraint c2;
  c2.expression = plain.DeclareDecision(1, true, {t, p}, 2).value;
  c2.vars = {t, p};
  plain.AddSosConstraint(c2);
  EXPECT_EQ(plain.num_blocks(), 1);

  // Equality-constrained domain: free symmetric multipliers, no extra blocks.
  const VarEnv env2 = VarEnv::Standard(2);
  SosProgram eq(env2.size());
  SosConstraint c3;
  std::vector<int> vars;
  for (const char* v : {"p1", "p2", "q1", "q2"}) vars.push_back(env2.Get(v).index);
  c3.expression = eq.DeclareDecision(2, true, vars, 2).value;
  c3.vars = vars;
  c3.equalities = {P(env2, "p1^2 + p2^2 - 1"), P(env2, "q1^2 + q2^2 - 1")};
  eq.AddSosConstraint(c3);
  EXPECT_EQ(eq.num_blocks(), 1);
  EXPECT_EQ(eq.constraints()[0].eq_multipliers.size(), 2u);
}

TEST(SosProgram, GramBlockSizeFormula) {
  const VarEnv env = VarEnv::Standard(2);
  std::vector<int> vars{0, 1, 2};
  SosProgram prog(env.size());
  for (int deg : {0, 1, 2, 3, 4}) {
    SosConstraint c;
    c.expression = prog.DeclareDecision(2, true, vars, deg).value;
    c.vars = vars;
    const int id = prog.AddSosConstraint(c);
    const int k = (deg + 1) / 2;
    const auto& cc = prog.constraints()[id];
    EXPECT_EQ(cc.size * static_cast<int>(cc.basis.size()),
              2 * polyalg::Binomial(3 + k, k));
  }
}

TEST(SosCompile, HandExpansionRows) {
  VarEnv env;
  env.Add("x", polyalg::VarKind::kParameter);
  SosProgram prog(1);
  SosConstraint c;
  c.expression = Scalar(P(env, "x^2 + 2*x + 2"));
  c.vars = {0};
  prog.AddSosConstraint(c);
  const CompiledProgram cp = prog.Compile();
  EXPECT_EQ(cp.problem.block_dims, (std::vector<int>{2}));
  ASSERT_EQ(cp.problem.num_rows(), 3);
  EXPECT_EQ(cp.problem.constraints[0].entries,
            (std::vector<sdpcore::BlockEntry>{{0, 0, 0, 1.0}}));
  EXPECT_EQ(cp.problem.constraints[0].rhs, 2.0);
  EXPECT_EQ(cp.problem.constraints[1].entries,
            (std::vector<sdpcore::BlockEntry>{{0, 0, 1, 1.0}}));
  EXPECT_EQ(cp.problem.constraints[1].rhs, 2.0);
  EXPECT_EQ(cp.problem.constraints[2].entries,
            (std::vector<sdpcore::BlockEntry>{{0, 1, 1, 1.0}}));
  EXPECT_EQ(cp.problem.constraints[2].rhs, 1.0);

  const auto sol = sdpcore::Solve(cp.problem);
  ASSERT_EQ(sol.status, Status::kFeasible) << sol.message;
  Eigen::Matrix2d expect;
  expect << 2, 1, 1, 1;
  EXPECT_LE((sol.x[0] - expect).norm(), 1e-6);
  const PolyMatrix g = GramForm(cp.map.constraints[0].basis, 1, sol.x[0], 1);
  EXPECT_NEAR(g(0, 0).coefficient(polyalg::Monomial::Var(1, 0, 0)), 2.0, 1e-6);
  EXPECT_NEAR(g(0, 0).coefficient(polyalg::Monomial::Var(1, 0, 1)), 2.0, 1e-6);
  EXPECT_NEAR(g(0, 0).coefficient(polyalg::Monomial::Var(1, 0, 2)), 1.0, 1e-6);
  EXPECT_LE(ReconstructionError(prog, cp, sol), 1e-6);
}

TEST(SosCompile, NegativeConstantIsNotSos) {
  VarEnv env;
  env.Add("x", polyalg::VarKind::kParameter);
  SosProgram prog(1);
  SosConstraint c;
  c.expression = Scalar(P(env, "x^2 - 1"));
  c.vars = {0};
  prog.AddSosConstraint(c);
  EXPECT_EQ(sdpcore::Solve(prog.Compile().problem).status, Status::kInfeasible);
}

TEST(SosCompile, DeterministicOutput) {
  auto build = [] {
    const VarEnv env = VarEnv::Standard(1);
    SosProgram prog(env.size());
    const DecisionMatrix s = prog.DeclareDecision(2, true, {0, 1}, 2);
    SosConstraint c;
    c.expression = s.value;
    c.vars = {0, 1};
    c.inequalities = {P(env, "t*(1 - t)"), P(env, "1 - p1^2")};
    c.margin = 0.01;
    c.multiplier_degree = 2;
    prog.AddSosConstraint(c);
    return sdpcore::ExportSdpa(prog.Compile().problem);
  };
  EXPECT_EQ(build(), build());
}

TEST(SosCompile, DomainConstrainedFeasibilityIsSound) {
  // c + x − ε − Γ(1 − x²) SOS: needs c > 1 + ε on [−1, 1].
  const VarEnv env = VarEnv::Standard(1);
  const int x = env.Get("p1").index;
  SosProgram prog(env.size());
  const DecisionMatrix c = prog.DeclareDecision(1, true, {}, 0);
  SosConstraint con;
  con.expression = c.value + Scalar(P(env, "p1"));
  con.vars = {x};
  con.inequalities = {P(env, "1 - p1^2")};
  con.margin = 0.1;
  con.multiplier_degree = 0;
  prog.AddSosConstraint(con);
  const CompiledProgram cp = prog.Compile();
  const auto sol = sdpcore::Solve(cp.problem);
  ASSERT_EQ(sol.status, Status::kFeasible) << sol.message;
  EXPECT_LE(ReconstructionError(prog, cp, sol), 1e-6);
  const PolyMatrix cv = ExtractValues(cp.map, sol, c);
  const double c0 = cv(0, 0).coefficient(polyalg::Monomial(env.size()));
  EXPECT_GT(c0, 1.1 - 1e-6);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    const double v = c0 + u(rng);
    EXPECT_GE(v - 0.1, -1e-6);
  }
}

TEST(SosCompile, MatrixWithEqualityMultipliers) {
  // S(p) − I ⪰ 0 on the unit circle for S declared free of degree 2.
  const VarEnv env = VarEnv::Standard(2);
  const int p1 = env.Get("p1").index, p2 = env.Get("p2").index;
  SosProgram prog(env.size());
  const DecisionMatrix s = prog.DeclareDecision(2, true, {p1, p2}, 2);
  SosConstraint c;
  c.expression = s.value - AffinePolyMatrix::Identity(2, env.size(), AffineExpr(1.0));
  c.vars = {p1, p2};
  c.equalities = {P(env, "p1^2 + p2^2 - 1")};
  c.margin = 1e-3;
  prog.AddSosConstraint(c);
  SosConstraint bound;
  bound.expression =
      AffinePolyMatrix::Identity(2, env.size(), AffineExpr(10.0)) - s.value;
  bound.vars = {p1, p2};
  bound.equalities = {P(env, "p1^2 + p2^2 - 1")};
  prog.AddSosConstraint(bound);
  const CompiledProgram cp = prog.Compile();
  const auto sol = sdpcore::Solve(cp.problem);
  ASSERT_EQ(sol.status, Status::kFeasible) << sol.message;
  EXPECT_LE(ReconstructionError(prog, cp, sol), 1e-6);
  const PolyMatrix sv = ExtractValues(cp.map, sol, s);
  for (int k = 0; k < 100; ++k) {
    const double a = 2 * M_PI * k / 100.0;
    std::vector<double> pt(env.size(), 0.0);
    pt[p1] = std::cos(a);
    pt[p2] = std::sin(a);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(polyalg::Evaluate(sv, pt));
    EXPECT_GE(es.eigenvalues().minCoeff(), 1.0 - 1e-6);
  }
}

TEST(SosCompile, ZeroConstraintProgram) {
  SosProgram prog(1);
  const DecisionMatrix d = prog.DeclareDecision(1, true, {0}, 1);
  const CompiledProgram cp = prog.Compile();
  EXPECT_EQ(cp.problem.num_rows(), 0);
  const auto sol = sdpcore::Solve(cp.problem);
  ASSERT_EQ(sol.status, Status::kFeasible);
  const PolyMatrix v = ExtractValues(cp.map, sol, d);
  EXPECT_TRUE(v(0, 0).IsZero());
}

TEST(SosCompile, ExtractRejectsInfeasible) {
  SosProgram prog(1);
  const DecisionMatrix d = prog.DeclareDecision(1, true, {0}, 0);
  sdpcore::SdpSolution sol;
  sol.status = Status::kInfeasible;
  EXPECT_THROW(ExtractValues(prog.Compile().map, sol, d), std::logic_error);
}

TEST(SosProgram, RejectsNonlinearAndAsymmetric) {
  SosProgram prog(1);
  const DecisionMatrix a = prog.DeclareDecision(1, true, {0}, 1);
  EXPECT_THROW(polyalg::Multiply(a.value, a.value), std::domain_error);
  const DecisionMatrix r = prog.DeclareRectangular(2, 2, {0}, 0);
  SosConstraint c;
  c.expression = r.value;
  c.vars = {0};
  EXPECT_THROW(prog.AddSosConstraint(c), std::invalid_argument);
  SosConstraint outside;
  outside.expression = a.value;
  outside.vars = {};
  EXPECT_THROW(prog.AddSosConstraint(outside), std::invalid_argument);
}

}  // namespace
}  // namespace hlpv::soscomp
