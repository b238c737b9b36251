#include <cmath>

#include <gtest/gtest.h>

#include "hlpv/hybridsim/lyapunov_eval.h"
#include "hlpv/hybridsim/simulator.h"
#include "hlpv/lpvcert/certify.h"

namespace hlpv::hybridsim {
namespace {

using Eigen::VectorXd;
using lpvcert::LpvSystem;
using lpvcert::Mode;
using lpvcert::ParseMatrix;

LpvSystem Scalar(const std::string& a, const std::string& j, const std::string& b = "") {
  LpvSystem s = lpvcert::MakeSystem(1, b.empty() ? 0 : 1, 0);
  s.A = ParseMatrix(s.env, {{a}});
  s.J = ParseMatrix(s.env, {{j}});
  if (!b.empty()) s.B = ParseMatrix(s.env, {{b}});
  return s;
}

LpvSystem Oscillator(double rho_max, double nu) {
  LpvSystem s = lpvcert::MakeSystem(2, 0, 1);
  s.A = ParseMatrix(s.env, {{"0", "1"}, {"-2-p1", "-1"}});
  s.J = ParseMatrix(s.env, {{"1", "0"}, {"0", "1"}});
  s.box_lo = {0.0};
  s.box_hi = {rho_max};
  s.vertices = lpvcert::BoxVertices(s.env.size(), {-nu}, {nu});
  return s;
}

VectorXd Vec(std::initializer_list<double> v) {
  VectorXd out(static_cast<int>(v.size()));
  int i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

double FinalError(double h) {
  const auto sys = Scalar("-1", "1");
  SimOptions o;
  o.step = h;
  const auto tr = Simulate(sys, nullptr, ParamTrajectory::Constant({}), ExplicitJumps({}, 1.0),
                           Vec({1.0}), VectorXd(), o);
  return std::fabs(tr.x.back()(0) - std::exp(-1.0));
}

TEST(SimulatorTest, ExponentialDecay) {
  EXPECT_LT(FinalError(1e-3), 1e-6);
  const auto sys = Scalar("-1", "1");
  const auto tr = Simulate(sys, nullptr, ParamTrajectory::Constant({}), ExplicitJumps({}, 1.0),
                           Vec({1.0}), VectorXd());
  EXPECT_EQ(tr.t.back(), 1.0);
  EXPECT_EQ(tr.t.size(), 1001u);
}

TEST(SimulatorTest, FourthOrderConvergence) {
  EXPECT_GE(FinalError(0.1) / FinalError(0.05), 8.0);
  EXPECT_GE(FinalError(0.05) / FinalError(0.025), 8.0);
}

TEST(SimulatorTest, JumpMapIsExact) {
  const auto sys = Scalar("-1", "2");
  const auto tr = Simulate(sys, nullptr, ParamTrajectory::Constant({}),
                           ExplicitJumps({1.0, 1.3337}, 2.0), Vec({1.0}), VectorXd());
  ASSERT_EQ(tr.jumps.size(), 2u);
  for (int j : tr.jumps) {
    EXPECT_EQ(tr.t[j], tr.t[j + 1]);
    EXPECT_EQ(tr.x[j + 1](0), 2.0 * tr.x[j](0));
    EXPECT_EQ(tr.since[j + 1], 0.0);
  }
  EXPECT_EQ(tr.t[tr.jumps[1]], 1.3337);
  EXPECT_EQ(tr.t.back(), 2.0);
  EXPECT_NEAR(tr.until[0], 1.0, 1e-15);
  EXPECT_TRUE(std::isnan(tr.until.back()));
}

TEST(SimulatorTest, DivergenceIsFlagged) {
  const auto sys = Scalar("1000", "1");
  const auto tr = Simulate(sys, nullptr, ParamTrajectory::Constant({}), ExplicitJumps({}, 1.0),
                           Vec({1.0}), VectorXd());
  EXPECT_TRUE(tr.diverged);
  EXPECT_LT(tr.t.back(), 1.0);
}

TEST(SimulatorTest, RejectsBadInput) {
  const auto sys = Scalar("-1", "1");
  const auto c = ParamTrajectory::Constant({});
  const auto j = ExplicitJumps({}, 1.0);
  EXPECT_THROW(Simulate(sys, nullptr, c, j, Vec({1.0, 2.0}), VectorXd()), std::invalid_argument);
  EXPECT_THROW(Simulate(sys, nullptr, ParamTrajectory::Constant({1.0}), j, Vec({1.0}), VectorXd()),
               std::invalid_argument);
  SimOptions o;
  o.step = 0.0;
  EXPECT_THROW(Simulate(sys, nullptr, c, j, Vec({1.0}), VectorXd(), o), std::invalid_argument);
}

TEST(TrajectoryTest, JumpGenerators) {
  const auto s = MinDwellJumps(0.5, 2.0, 7);
  double prev = 0.0;
  for (double t : s.times) {
    EXPECT_GE(t - prev, 0.5);
    EXPECT_LT(t, 2.0);
    prev = t;
  }
  EXPECT_GE(s.next - prev, 0.5);
  EXPECT_GE(s.next, 2.0);

  const auto r = RangeDwellJumps(0.2, 0.3, 10.0, 3);
  prev = 0.0;
  for (double t : r.times) {
    EXPECT_GE(t - prev, 0.2);
    EXPECT_LE(t - prev, 0.3);
    prev = t;
  }
  EXPECT_EQ(r.IntervalAt(0.0), 0);
  EXPECT_EQ(r.IntervalAt(r.times[0]), 1);

  EXPECT_THROW(MinDwellJumps(0.5, 0.0, 1), std::invalid_argument);
  EXPECT_THROW(ExplicitJumps({0.5, 0.4}, 1.0), std::invalid_argument);
  EXPECT_THROW(ExplicitJumps({0.0}, 1.0), std::invalid_argument);
  EXPECT_THROW(RangeDwellJumps(0.3, 0.2, 1.0, 1), std::invalid_argument);
}

TEST(TrajectoryTest, PhaseJumpStaysInRangeAndRateBound) {
  const double nu = 1.0;
  const auto jumps = MinDwellJumps(0.5, 10.0, 11);
  const auto p = ParamTrajectory::PhaseJump({0.0}, {1.0}, nu, 5,
                                            static_cast<int>(jumps.times.size()) + 1);
  const double h = 1e-3;
  for (double t = 0.0; t < 10.0; t += h) {
    const int k = jumps.IntervalAt(t);
    const double v = p.Value(t, k)[0];
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
    if (jumps.IntervalAt(t + h) == k) {
      EXPECT_LE(std::fabs(p.Value(t + h, k)[0] - v) / h, nu + 1e-3);
    }
  }
  const auto q = ParamTrajectory::PhaseJump({0.0}, {1.0}, nu, 5, 3);
  EXPECT_EQ(q.Value(0.3, 1), ParamTrajectory::PhaseJump({0.0}, {1.0}, nu, 5, 3).Value(0.3, 1));
  EXPECT_EQ(ParamTrajectory::Constant({0.4}).Value(3.0, 2), std::vector<double>{0.4});
  const auto tab = ParamTrajectory::Table({0.0, 1.0}, {{0.0}, {2.0}});
  EXPECT_DOUBLE_EQ(tab.Value(0.25, 0)[0], 0.5);
  EXPECT_DOUBLE_EQ(tab.Value(5.0, 0)[0], 2.0);
}

TEST(SimulatorTest, SeedsAreReproducible) {
  const auto sys = Oscillator(10.0, 1.0);
  auto run = [&](std::uint64_t seed) {
    const auto jumps = MinDwellJumps(1.0, 5.0, seed);
    const auto p = ParamTrajectory::PhaseJump({0.0}, {10.0}, 1.0, seed,
                                              static_cast<int>(jumps.times.size()) + 1);
    return Simulate(sys, nullptr, p, jumps, Vec({1.0, 0.0}), VectorXd());
  };
  const auto a = run(42), b = run(42), c = run(43);
  ASSERT_EQ(a.t.size(), b.t.size());
  for (size_t s = 0; s < a.t.size(); ++s) {
    EXPECT_EQ(a.t[s], b.t[s]);
    EXPECT_EQ(a.x[s], b.x[s]);
  }
  EXPECT_NE(a.x.back(), c.x.back());
}

TEST(LyapunovTest, ZeroStateHasZeroValue) {
  const auto sys = Scalar("-1", "2");
  lpvcert::Certificate cert;
  cert.mode = Mode::kMinDwell;
  cert.dwell = 1.0;
  cert.epsilon = 0.01;
  cert.S = ParseMatrix(sys.env, {{"1+t"}});
  const auto tr = Simulate(sys, nullptr, ParamTrajectory::Constant({}),
                           ExplicitJumps({1.0}, 2.0), Vec({0.0}), VectorXd());
  const auto rep = EvalLyapunov(sys, cert, tr);
  for (double v : rep.v) EXPECT_EQ(v, 0.0);
}

TEST(LyapunovTest, ConstantQuadraticFailsBelowLogTwo) {
  const auto sys = Scalar("-1", "2");
  lpvcert::Certificate cert;
  cert.mode = Mode::kMinDwell;
  cert.dwell = 0.5;
  cert.epsilon = 0.01;
  cert.S = ParseMatrix(sys.env, {{"1"}});
  const auto tr = Simulate(sys, nullptr, ParamTrajectory::Constant({}),
                           ExplicitJumps({0.5, 1.0, 1.5}, 2.0), Vec({1.0}), VectorXd());
  const auto rep = EvalLyapunov(sys, cert, tr);
  EXPECT_EQ(rep.jumps_checked, 3);
  EXPECT_GT(rep.jump_violation, 0.0);
}

TEST(LyapunovTest, CertifiedOscillatorRun) {
  const auto sys = Oscillator(10.0, 0.5);
  lpvcert::ProgramOptions o;
  o.mode = Mode::kMinDwell;
  o.degree = 4;
  o.dwell = 1.0;
  const auto r = lpvcert::Certify(sys, o);
  ASSERT_EQ(r.status, sdpcore::Status::kFeasible);
  const auto jumps = MinDwellJumps(1.0, 10.0, 9);
  const auto p = ParamTrajectory::PhaseJump({0.0}, {10.0}, 0.5, 9,
                                            static_cast<int>(jumps.times.size()) + 1);
  const auto tr = Simulate(sys, nullptr, p, jumps, Vec({1.0, -1.0}), VectorXd());
  const auto rep = EvalLyapunov(sys, *r.certificate, tr);
  EXPECT_GT(rep.jumps_checked, 3);
  EXPECT_LE(rep.jump_violation, 1e-6);
  EXPECT_LE(rep.flow_violation, 1e-4);
  EXPECT_LT(tr.x.back().norm(), tr.x.front().norm());
}

TEST(LyapunovTest, ContinuousGainStabilizes) {
  const auto sys = Scalar("1", "1", "1");
  lpvcert::ProgramOptions o;
  o.mode = Mode::kSynthCt;
  o.degree = 2;
  o.dwell = 0.5;
  const auto r = lpvcert::Certify(sys, o);
  ASSERT_EQ(r.status, sdpcore::Status::kFeasible);
  const lpvcert::ControllerGain k(sys, *r.certificate);
  const auto jumps = MinDwellJumps(0.5, 10.0, 1);
  const auto tr =
      Simulate(sys, &k, ParamTrajectory::Constant({}), jumps, Vec({1.0}), VectorXd());
  EXPECT_LT(tr.x.back().norm(), 1e-2);
  const auto rep = EvalLyapunov(sys, *r.certificate, tr);
  EXPECT_LE(rep.jump_violation, 1e-6);
  EXPECT_LE(rep.flow_violation, 1e-4);
}

TEST(LyapunovTest, SampledDataGainStabilizes) {
  const auto sys = Scalar("1", "1", "1");
  lpvcert::ProgramOptions o;
  o.mode = Mode::kSynthSd;
  o.degree = 2;
  o.tmin = 0.05;
  o.tmax = 0.3;
  const auto r = lpvcert::Certify(sys, o);
  ASSERT_EQ(r.status, sdpcore::Status::kFeasible);
  const lpvcert::ControllerGain k(sys, *r.certificate);
  const auto jumps = RangeDwellJumps(0.05, 0.3, 10.0, 4);
  const auto tr =
      Simulate(sys, &k, ParamTrajectory::Constant({}), jumps, Vec({1.0}), Vec({0.0}));
  EXPECT_EQ(tr.m, 1);
  EXPECT_LT(tr.x.back().norm(), 1e-2);
  const auto rep = EvalLyapunov(sys, *r.certificate, tr);
  EXPECT_LE(rep.jump_violation, 1e-6);
  EXPECT_LE(rep.flow_violation, 1e-4);
  EXPECT_GT(rep.jumps_checked, 10);
}

TEST(CsvTest, HeaderAndJumpFlag) {
  const auto sys = Scalar("-1", "2");
  const auto tr = Simulate(sys, nullptr, ParamTrajectory::Constant({}),
                           ExplicitJumps({0.5}, 1.0), Vec({1.0}), VectorXd());
  const auto csv = ToCsv(tr);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "time,x1,V,jump");
  size_t flagged = 0, pos = 0;
  while ((pos = csv.find(",1\n", pos)) != std::string::npos) {
    ++flagged;
    ++pos;
  }
  EXPECT_EQ(flagged, 1u);
}

}  // namespace
}  // namespace hlpv::hybridsim
