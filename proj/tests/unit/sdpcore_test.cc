#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "common/sdp_examples.h"
#include "hlpv/sdpcore/sdpa_io.h"
#include "hlpv/sdpcore/solver.h"

namespace hlpv::sdpcore {
namespace {

using namespace examples;

Eigen::MatrixXd RandomSym(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> nd;
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = nd(rng);
  }
  return 0.5 * (a + a.transpose());
}

Eigen::MatrixXd RandomPd(std::mt19937_64& rng, int n) {
  Eigen::MatrixXd a = RandomSym(rng, n);
  return a * a.transpose() + Eigen::MatrixXd::Identity(n, n);
}

void AddDense(const Eigen::MatrixXd& a, int block, std::vector<BlockEntry>* out) {
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = i; j < a.cols(); ++j) out->push_back({block, i, j, a(i, j)});
  }
}

// Random primal-dual feasible problem: b from a PD X0, C from a PD Z0 plus
// Aᵀy0, free columns with c_f = Fᵀy0.
SdpProblem RandomFeasibleMin(std::mt19937_64& rng, int m, std::vector<int> dims, int nfree) {
  std::normal_distribution<double> nd;
  SdpProblem p;
  p.block_dims = dims;
  p.num_free = nfree;
  std::vector<Eigen::MatrixXd> x0, z0;
  for (int d : dims) {
    x0.push_back(RandomPd(rng, d));
    z0.push_back(RandomPd(rng, d));
  }
  Eigen::VectorXd xf0(nfree), y0(m);
  for (int k = 0; k < nfree; ++k) xf0[k] = nd(rng);
  for (int r = 0; r < m; ++r) y0[r] = nd(rng);
  std::vector<Eigen::MatrixXd> c = z0;
  p.objective_free.assign(nfree, 0.0);
  for (int r = 0; r < m; ++r) {
    Constraint row;
    double rhs = 0.0;
    for (size_t k = 0; k < dims.size(); ++k) {
      const Eigen::MatrixXd a = RandomSym(rng, dims[k]);
      AddDense(a, static_cast<int>(k), &row.entries);
      rhs += a.cwiseProduct(x0[k]).sum();
      c[k] += y0[r] * a;
    }
    for (int k = 0; k < nfree; ++k) {
      const double f = nd(rng);
      row.free.emplace_back(k, f);
      rhs += f * xf0[k];
      p.objective_free[k] += f * y0[r];
    }
    row.rhs = rhs;
    p.constraints.push_back(row);
  }
  for (size_t k = 0; k < dims.size(); ++k) AddDense(c[k], static_cast<int>(k), &p.objective);
  return p;
}

SolverOptions NoEarlyStop() {
  SolverOptions o;
  o.early_stop = false;
  return o;
}

TEST(SdpSolver, IdentityMarginIsOne) {
  const SdpProblem p = IdentityFeasibility();
  const SdpSolution s = Solve(p, NoEarlyStop());
  ASSERT_EQ(s.status, Status::kFeasible) << s.message;
  EXPECT_NEAR(s.margin, 1.0, 1e-6);
  EXPECT_NEAR((s.x[0] - Eigen::MatrixXd::Identity(2, 2)).norm(), 0.0, 1e-6);
  const ResidualReport r = CheckSolution(p, s);
  EXPECT_LE(r.primal, 1e-8);
  EXPECT_LE(r.dual, 1e-8);
  EXPECT_LE(r.gap, 1e-8);
}

TEST(SdpSolver, NegativeScalarIsInfeasible) {
  const SdpSolution s = Solve(NegativeScalar(), NoEarlyStop());
  EXPECT_EQ(s.status, Status::kInfeasible);
  EXPECT_NEAR(s.margin, -1.0, 1e-6);
  const SdpSolution e = Solve(NegativeScalar());
  EXPECT_EQ(e.status, Status::kInfeasible);
  EXPECT_LT(e.margin, 0.0);
}

TEST(SdpSolver, SchurMinimum) {
  const SdpProblem p = SchurMin();
  const SdpSolution s = Solve(p);
  ASSERT_EQ(s.status, Status::kFeasible) << s.message;
  EXPECT_NEAR(s.primal_objective, 1.0, 1e-7);
  EXPECT_NEAR(s.x[0](0, 0), 1.0, 1e-6);
  const ResidualReport r = CheckSolution(p, s);
  EXPECT_LE(r.primal, 1e-8);
  EXPECT_LE(r.dual, 1e-8);
  EXPECT_LE(r.gap, 1e-8);
}

TEST(SdpSolver, ZeroPointResidual) {
  SdpProblem p;
  p.block_dims = {1};
  p.constraints = {{{{0, 0, 0, 1.0}}, {}, 1.0}};
  SdpSolution s;
  s.x = {Eigen::MatrixXd::Zero(1, 1)};
  EXPECT_DOUBLE_EQ(CheckSolution(p, s).primal, 0.5);
}

TEST(SdpSolver, AnalyticExamplesWeakDuality) {
  for (const SdpProblem& p : {IdentityFeasibility(), NegativeScalar(), SchurMin()}) {
    const SdpSolution s = Solve(p, NoEarlyStop());
    for (const auto& it : s.trace) {
      if (it.primal_infeasibility <= 1e-8 && it.dual_infeasibility <= 1e-8) {
        EXPECT_GE(it.primal_objective - it.dual_objective, -1e-7);
      }
    }
    EXPECT_GE(s.primal_objective - s.dual_objective,
              -1e-8 * (1 + std::fabs(s.primal_objective)));
  }
}

TEST(SdpSolver, RandomProblemsConvergeWithSmallResiduals) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const int nfree = trial % 3;
    const SdpProblem p = RandomFeasibleMin(rng, 4 + trial % 5, {3, 2, 1}, nfree);
    const SdpSolution s = Solve(p);
    ASSERT_EQ(s.status, Status::kFeasible) << "trial " << trial << ": " << s.message;
    const ResidualReport r = CheckSolution(p, s);
    EXPECT_LE(r.primal, 1e-8) << trial;
    EXPECT_LE(r.dual, 1e-8) << trial;
    EXPECT_LE(r.gap, 1e-8) << trial;
    EXPECT_GE(s.primal_objective - s.dual_objective, -1e-7) << trial;
    for (double e : r.min_eig) EXPECT_GE(e, -1e-9);
    for (size_t k = 1; k < s.trace.size(); ++k) {
      EXPECT_LE(s.trace[k].mu, 1.1 * s.trace[k - 1].mu) << trial << " iter " << k;
    }
  }
}

TEST(SdpSolver, FreeVariablesInFeasibility) {
  // [[1, x1 + x2 + 0.5], [., 1]] with dependent free columns.
  SdpProblem p;
  p.block_dims = {2};
  p.num_free = 2;
  p.sense = Sense::kFeasibility;
  p.constraints = {{{{0, 0, 0, 1.0}}, {}, 1.0},
                   {{{0, 1, 1, 1.0}}, {}, 1.0},
                   {{{0, 0, 1, 1.0}}, {{0, -1.0}, {1, -1.0}}, 0.5}};
  const SdpSolution s = Solve(p, NoEarlyStop());
  ASSERT_EQ(s.status, Status::kFeasible) << s.message;
  EXPECT_NEAR(s.margin, 1.0, 1e-6);
  EXPECT_NEAR(s.x_free[0] + s.x_free[1], -0.5, 1e-6);
}

TEST(SdpSolver, FreeOnlyRows) {
  // x1 − x2 = 1 together with X11 − x1 = 0: minimise X11 subject to X11 ≥ 0.
  SdpProblem p;
  p.block_dims = {1};
  p.num_free = 2;
  p.constraints = {{{}, {{0, 1.0}, {1, -1.0}}, 1.0},
                   {{{0, 0, 0, 1.0}}, {{1, -1.0}}, 0.0}};
  p.objective = {{0, 0, 0, 1.0}};
  const SdpSolution s = Solve(p);
  ASSERT_EQ(s.status, Status::kFeasible) << s.message;
  EXPECT_NEAR(s.primal_objective, 0.0, 1e-7);
  EXPECT_NEAR(s.x_free[0] - s.x_free[1], 1.0, 1e-7);
}

TEST(SdpSolver, RedundantRows) {
  SdpProblem p = IdentityFeasibility();
  p.constraints.push_back(p.constraints[0]);
  const SdpSolution s = Solve(p, NoEarlyStop());
  ASSERT_EQ(s.status, Status::kFeasible) << s.message;
  EXPECT_NEAR(s.margin, 1.0, 1e-6);
  p.constraints.back().rhs = 2.0;
  EXPECT_EQ(Solve(p).status, Status::kInfeasible);
}

TEST(SdpSolver, EmptyRowWithNonzeroRhsIsInfeasible) {
  SdpProblem p = IdentityFeasibility();
  p.constraints.push_back({{}, {}, 1.0});
  EXPECT_EQ(Solve(p).status, Status::kInfeasible);
}

TEST(SdpSolver, MarginProblemLayout) {
  const SdpProblem m = MarginProblem(IdentityFeasibility(), 10.0);
  EXPECT_EQ(m.block_dims, (std::vector<int>{2, 1}));
  EXPECT_EQ(m.num_free, 1);
  ASSERT_EQ(m.num_rows(), 4);
  EXPECT_DOUBLE_EQ(m.constraints[3].rhs, 20.0);
  EXPECT_EQ(m.constraints[0].free, (std::vector<std::pair<int, double>>{{0, 1.0}}));
  EXPECT_TRUE(m.constraints[2].free.empty());
  EXPECT_EQ(m.objective_free, (std::vector<double>{-1.0}));
}

TEST(SolverOptionsText, ParseAndFormat) {
  const SolverOptions o = ParseSolverOptions("# comment\ntol = 1e-9\n\nmax_iter=50\nearly_stop=false\n");
  EXPECT_DOUBLE_EQ(o.tol, 1e-9);
  EXPECT_EQ(o.max_iter, 50);
  EXPECT_FALSE(o.early_stop);
  const SolverOptions back = ParseSolverOptions(FormatSolverOptions(o));
  EXPECT_DOUBLE_EQ(back.tol, o.tol);
  EXPECT_EQ(back.max_iter, o.max_iter);
  EXPECT_EQ(back.early_stop, o.early_stop);
  EXPECT_THROW(ParseSolverOptions("bogus=1"), std::invalid_argument);
  EXPECT_THROW(ParseSolverOptions("tol=abc"), std::invalid_argument);
}

TEST(Sdpa, RoundTripRandomProblems) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const SdpProblem p = RandomSparse(rng);
    const std::string text = ExportSdpa(p);
    const SdpProblem back = ImportSdpa(text);
    EXPECT_TRUE(back == p) << "trial " << trial << "\n" << text;
    EXPECT_EQ(ExportSdpa(back), text) << trial;
  }
}

TEST(Sdpa, HeaderLayout) {
  SdpProblem p = SchurMin();
  p.constraints.push_back({{{0, 0, 0, 1.0}}, {}, 2.5});
  const std::string text = ExportSdpa(p);
  EXPECT_EQ(text.substr(0, 6), "3\n1\n2\n");
  EXPECT_EQ(text,
            "3\n1\n2\n1 1 2.5\n"
            "0 1 1 1 -1\n"
            "1 1 1 2 0.5\n"
            "2 1 2 2 1\n"
            "3 1 1 1 1\n");
}

TEST(Sdpa, FreeVariablesAndFeasibilityMarker) {
  SdpProblem p;
  p.block_dims = {1};
  p.num_free = 1;
  p.sense = Sense::kFeasibility;
  p.constraints = {{{{0, 0, 0, 1.0}}, {{0, 2.0}}, 1.0}};
  const std::string text = ExportSdpa(p);
  EXPECT_EQ(text, "* hlpv feasibility\n1\n2\n1 -2\n1\n1 1 1 1 1\n1 2 1 1 2\n1 2 2 2 -2\n");
  EXPECT_TRUE(ImportSdpa(text) == p);
}

TEST(Sdpa, ForeignDiagonalBlockBecomesScalars) {
  const SdpProblem p = ImportSdpa("\"a comment\n1\n1\n{-2}\n(1.0)\n1 1 1 1 1.0\n1 1 2 2 +3\n");
  EXPECT_EQ(p.block_dims, (std::vector<int>{1, 1}));
  EXPECT_EQ(p.num_free, 0);
  ASSERT_EQ(p.constraints.size(), 1u);
  EXPECT_EQ(p.constraints[0].entries.size(), 2u);
  EXPECT_EQ(p.constraints[0].entries[1].block, 1);
}

TEST(Sdpa, ErrorPositions) {
  try {
    ImportSdpa("1\n1\n2\n1.0\n1 1 1 x 1.0\n");
    FAIL();
  } catch (const SdpaParseError& e) {
    EXPECT_EQ(e.line(), 5);
    EXPECT_EQ(e.column(), 7);
  }
  try {
    ImportSdpa("1\n1\n2\n1.0\n1 1 3 1 1.0\n");
    FAIL();
  } catch (const SdpaParseError& e) {
    EXPECT_EQ(e.line(), 5);
    EXPECT_EQ(e.column(), 1);
  }
  EXPECT_THROW(ImportSdpa("2\n1\n"), SdpaParseError);
}

}  // namespace
}  // namespace hlpv::sdpcore
