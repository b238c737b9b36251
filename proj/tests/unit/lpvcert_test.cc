#include <cmath>

#include <gtest/gtest.h>

#include "hlpv/lpvcert/bisection.h"
#include "hlpv/lpvcert/certify.h"
#include "hlpv/lpvcert/gain.h"
#include "hlpv/lpvcert/grid_check.h"
#include "hlpv/lpvcert/lyapunov_field.h"

namespace hlpv::lpvcert {
namespace {

using sdpcore::Status;

LpvSystem Scalar(const std::string& a, const std::string& j, const std::string& b = "") {
  LpvSystem s = MakeSystem(1, b.empty() ? 0 : 1, 0);
  s.A = ParseMatrix(s.env, {{a}});
  s.J = ParseMatrix(s.env, {{j}});
  if (!b.empty()) s.B = ParseMatrix(s.env, {{b}});
  return s;
}

// ẋ = [[0,1],[−2−ρ,−1]]x, ρ ∈ [0, ρ̄], |ρ̇| ≤ ν.
LpvSystem Oscillator(double rho_max, double nu) {
  LpvSystem s = MakeSystem(2, 0, 1);
  s.A = ParseMatrix(s.env, {{"0", "1"}, {"-2-p1", "-1"}});
  s.J = ParseMatrix(s.env, {{"1", "0"}, {"0", "1"}});
  s.box_lo = {0.0};
  s.box_hi = {rho_max};
  s.vertices = BoxVertices(s.env.size(), {-nu}, {nu});
  return s;
}

ProgramOptions Opts(Mode mode, int degree, double dwell = 0.0) {
  ProgramOptions o;
  o.mode = mode;
  o.degree = degree;
  o.dwell = dwell;
  return o;
}

TEST(LpvSystemTest, ValidationRejectsBadData) {
  LpvSystem s = Oscillator(1.0, 0.0);
  EXPECT_NO_THROW(s.Validate());
  s.g.push_back(Polynomial::Constant(s.env.size(), 1.0));
  EXPECT_THROW(s.Validate(), std::invalid_argument);
  s = Oscillator(1.0, 0.0);
  s.A = ParseMatrix(s.env, {{"0", "t"}, {"-2", "-1"}});
  EXPECT_THROW(s.Validate(), std::invalid_argument);
  s = Oscillator(1.0, 0.0);
  s.box_hi = {-1.0};
  EXPECT_THROW(s.Validate(), std::invalid_argument);
}

TEST(LpvSystemTest, BoxVerticesEnumerateCorners) {
  const auto v = BoxVertices(3, {-1.0, 0.0}, {1.0, 2.0});
  ASSERT_EQ(v.size(), 4u);
  EXPECT_EQ(v[0][0], Polynomial::Constant(3, -1.0));
  EXPECT_EQ(v[3][1], Polynomial::Constant(3, 2.0));
  EXPECT_EQ(BoxVertices(3, {0.5}, {0.5}).size(), 1u);
}

TEST(BuilderTest, QuadraticScalarIsFeasible) {
  const auto sys = Scalar("-1", "1");
  const auto r = Certify(sys, Opts(Mode::kQuadratic, 0));
  ASSERT_EQ(r.status, Status::kFeasible) << r.message;
  const double p = polyalg::Evaluate(r.certificate->S(0, 0), EnvPoint(sys, 0, {}));
  EXPECT_GT(p, 0.0);
  EXPECT_TRUE(CheckCertificate(sys, *r.certificate).pass);

  Certificate unit = *r.certificate;
  unit.S = ParseMatrix(sys.env, {{"1"}});
  EXPECT_TRUE(CheckCertificate(sys, unit).pass);
}

TEST(BuilderTest, ModeErrors) {
  auto sys = Scalar("-1", "2");
  EXPECT_THROW(BuildProgram(sys, Opts(Mode::kQuadratic, 0)), std::invalid_argument);
  EXPECT_THROW(BuildProgram(sys, Opts(Mode::kRobust, 2)), std::invalid_argument);
  EXPECT_THROW(BuildProgram(sys, Opts(Mode::kMinDwell, 2, 0.0)), std::invalid_argument);
  auto range = Opts(Mode::kRangeDwell, 2);
  range.tmin = 2.0;
  range.tmax = 1.0;
  EXPECT_THROW(BuildProgram(sys, range), std::invalid_argument);

  auto osc = Oscillator(1.0, 0.5);
  osc.vertices.clear();
  EXPECT_THROW(BuildProgram(osc, Opts(Mode::kMinDwell, 2, 1.0)), std::invalid_argument);
  EXPECT_NO_THROW(BuildProgram(osc, Opts(Mode::kQuadratic, 2)));

  const auto no_input = Scalar("1", "1", "0");
  EXPECT_THROW(BuildProgram(no_input, Opts(Mode::kSynthCt, 2, 1.0)), std::invalid_argument);
  EXPECT_THROW(BuildProgram(Scalar("1", "1"), Opts(Mode::kSynthCt, 2, 1.0)),
               std::invalid_argument);
}

TEST(BuilderTest, MinDwellEmitsFourGroups) {
  const auto built = BuildProgram(Oscillator(10.0, 0.5), Opts(Mode::kMinDwell, 4, 1.0));
  std::vector<std::string> labels;
  for (const auto& c : built.program.constraints()) labels.push_back(c.label);
  EXPECT_EQ(labels, (std::vector<std::string>{"positivity", "flow[0]", "flow[1]", "jump",
                                              "boundary[0]", "boundary[1]"}));
  const auto& jump = built.program.constraints()[3];
  EXPECT_EQ(jump.inequalities.size(), 2u);
  EXPECT_EQ(built.program.constraints()[1].inequalities.size(), 2u);
}

TEST(BuilderTest, ModeNamesRoundTrip) {
  for (auto m : {Mode::kMinDwell, Mode::kQuadratic, Mode::kRobust, Mode::kRangeDwell,
                 Mode::kSynthCt, Mode::kSynthSd}) {
    EXPECT_EQ(ParseMode(ModeName(m)), m);
  }
  EXPECT_FALSE(ParseMode("dwell").has_value());
}

// ẋ = −x, x⁺ = 2x: 2e^(−T̄) < 1 exactly when T̄ > ln 2. A degree-2 S(τ)
// reaches 0.75 (scalar LP oracle), so the estimate is bracketed by [ln 2, 0.76].
TEST(BisectionTest, ScalarMinDwell) {
  const auto sys = Scalar("-1", "2");
  const auto r = BisectDwellTime(sys, Opts(Mode::kMinDwell, 2), 0.1, 2.0, 1e-3);
  ASSERT_TRUE(r.found) << r.message;
  EXPECT_GT(r.dwell, std::log(2.0));
  EXPECT_LT(r.dwell, 0.76);
  EXPECT_TRUE(r.warnings.empty());
  EXPECT_GE(r.probes.size(), 10u);
  ASSERT_TRUE(r.certificate.has_value());
  EXPECT_NEAR(r.certificate->dwell, r.dwell, 0.0);
  EXPECT_TRUE(CheckCertificate(sys, *r.certificate).pass);
}

TEST(BisectionTest, BelowLogTwoHasNoCertificate) {
  const auto sys = Scalar("-1", "2");
  const auto r = Certify(sys, Opts(Mode::kMinDwell, 4, 0.5));
  EXPECT_NE(r.status, Status::kFeasible);
}

TEST(BisectionTest, HurwitzReturnsLowerBound) {
  const auto r = BisectDwellTime(Scalar("-1", "1"), Opts(Mode::kMinDwell, 2), 0.05, 1.0, 1e-2);
  ASSERT_TRUE(r.found);
  EXPECT_EQ(r.dwell, 0.05);
  EXPECT_EQ(r.probes.size(), 2u);
}

TEST(BisectionTest, NoCertificateInRange) {
  const auto r = BisectDwellTime(Scalar("1", "2"), Opts(Mode::kMinDwell, 2), 0.1, 1.0, 1e-2);
  EXPECT_FALSE(r.found);
  EXPECT_EQ(r.message, "no certificate in range");
  EXPECT_FALSE(r.certificate.has_value());
}

TEST(BisectionTest, MonotonicityWarnings) {
  std::vector<Probe> probes{{1.0, Status::kFeasible}, {2.0, Status::kInfeasible}};
  EXPECT_EQ(MonotonicityWarnings(probes).size(), 1u);
  probes[1].status = Status::kFeasible;
  EXPECT_TRUE(MonotonicityWarnings(probes).empty());
}

TEST(GainTest, ConstantRatio) {
  auto sys = Scalar("1", "1", "1");
  Certificate c;
  c.mode = Mode::kSynthCt;
  c.dwell = 1.0;
  c.R = ParseMatrix(sys.env, {{"4"}});
  c.U = ParseMatrix(sys.env, {{"2"}});
  const ControllerGain k(sys, c);
  EXPECT_DOUBLE_EQ(k.Evaluate(0.3, {})(0, 0), 0.5);
}

TEST(GainTest, TimerIsClamped) {
  auto sys = Scalar("1", "1", "1");
  Certificate c;
  c.mode = Mode::kSynthCt;
  c.dwell = 0.5;
  c.R = ParseMatrix(sys.env, {{"1+t^2"}});
  c.U = ParseMatrix(sys.env, {{"t"}});
  const ControllerGain k(sys, c);
  EXPECT_EQ(k.Evaluate(1.0, {})(0, 0), k.Evaluate(0.5, {})(0, 0));
  EXPECT_NEAR(k.Evaluate(0.5, {})(0, 0), 0.5 / 1.25, 1e-15);
}

TEST(GainTest, RejectsIndefiniteR) {
  auto sys = Scalar("1", "1", "1");
  Certificate c;
  c.mode = Mode::kSynthCt;
  c.dwell = 1.0;
  c.R = ParseMatrix(sys.env, {{"1-2*t"}});
  c.U = ParseMatrix(sys.env, {{"1"}});
  const ControllerGain k(sys, c);
  EXPECT_NO_THROW(k.Evaluate(0.1, {}));
  try {
    k.Evaluate(0.9, {});
    FAIL();
  } catch (const std::domain_error& e) {
    EXPECT_NE(std::string(e.what()).find("tau=0.9"), std::string::npos);
  }
  c.mode = Mode::kMinDwell;
  EXPECT_THROW(ControllerGain(sys, c), std::invalid_argument);
}

TEST(GridCheckTest, NegatedCertificateFailsPositivity) {
  const auto sys = Oscillator(3.0, 0.0);
  const auto r = Certify(sys, Opts(Mode::kQuadratic, 2));
  ASSERT_EQ(r.status, Status::kFeasible);
  Certificate neg = *r.certificate;
  neg.S = neg.S.Scaled(-1.0);
  const auto rep = CheckCertificate(sys, neg);
  EXPECT_FALSE(rep.pass);
  EXPECT_LT(rep.min_eig, 0.0);
  EXPECT_THROW(CheckCertificate(sys, neg, GridSpec{0, 20}), std::invalid_argument);
}

TEST(GridCheckTest, ParameterGridProjectsOntoCircle) {
  LpvSystem s = MakeSystem(1, 0, 2);
  s.box_lo = {-1.0, -1.0};
  s.box_hi = {1.0, 1.0};
  s.box_generators = false;
  s.h.push_back(polyalg::ParsePolynomial("p1^2+p2^2-1", s.env));
  const auto pts = ParameterGrid(s, 50);
  EXPECT_GT(pts.size(), 100u);
  for (const auto& p : pts) EXPECT_NEAR(p[0] * p[0] + p[1] * p[1], 1.0, 1e-10);
  EXPECT_EQ(ParameterGrid(Oscillator(1.0, 0.0), 50).size(), 50u);
}

// A quadratic certificate is a constant min-dwell certificate for any T̄
// when J = I; the jump condition then holds with equality.
TEST(GridCheckTest, QuadraticImpliesMinDwell) {
  const auto sys = Oscillator(3.0, 0.5);
  const auto r = Certify(sys, Opts(Mode::kQuadratic, 2));
  ASSERT_EQ(r.status, Status::kFeasible);
  for (double dwell : {0.05, 1.0, 10.0}) {
    const auto rep = CheckCertificate(sys, AsMinDwell(*r.certificate, dwell));
    EXPECT_TRUE(rep.pass) << dwell;
    EXPECT_NEAR(rep.conditions[2].max_eig, 0.0, 1e-9);
  }
}

TEST(CertifyTest, OscillatorMinDwellIsSound) {
  const auto sys = Oscillator(10.0, 0.5);
  auto o = Opts(Mode::kMinDwell, 2, 2.0);
  const auto r = Certify(sys, o);
  ASSERT_EQ(r.status, Status::kFeasible) << r.message;
  const auto rep = CheckCertificate(sys, *r.certificate);
  EXPECT_TRUE(rep.pass);
  for (const auto& c : rep.conditions) {
    if (c.name == "flow" || c.name == "boundary") EXPECT_LE(c.max_eig, -0.5 * o.epsilon) << c.name;
  }

  // The flow LHS is affine in μ: interior rates never exceed the vertices.
  const LyapunovField f(sys, *r.certificate);
  const Eigen::MatrixXd a0 = polyalg::Evaluate(sys.A, EnvPoint(sys, 0, std::vector{5.0}));
  const std::vector<double> th{5.0};
  auto lhs = [&](double mu) {
    const Eigen::MatrixXd s = f.S(0.7, th);
    const std::vector<double> m{mu};
    return MaxEig(f.DTau(0.7, th) + f.DTheta(m, 0.7, th) + s * a0 + a0.transpose() * s);
  };
  const double vmax = std::max(lhs(-0.5), lhs(0.5));
  for (double mu : {-0.4, -0.1, 0.0, 0.3}) EXPECT_LE(lhs(mu), vmax + 1e-9);
}

TEST(CertifyTest, RangeDwellScalar) {
  const auto sys = Scalar("-1", "2");
  auto o = Opts(Mode::kRangeDwell, 2);
  o.tmin = 1.0;
  o.tmax = 2.0;
  const auto r = Certify(sys, o);
  ASSERT_EQ(r.status, Status::kFeasible) << r.message;
  EXPECT_TRUE(CheckCertificate(sys, *r.certificate).pass);
  o.tmin = 0.1;
  o.tmax = 0.2;
  EXPECT_NE(Certify(sys, o).status, Status::kFeasible);
}

TEST(CertifyTest, SynthCtScalarClosedLoop) {
  const auto sys = Scalar("1", "1", "1");
  const auto r = Certify(sys, Opts(Mode::kSynthCt, 2, 0.5));
  ASSERT_EQ(r.status, Status::kFeasible) << r.message;
  const auto rep = CheckCertificate(sys, *r.certificate);
  EXPECT_TRUE(rep.pass);
  bool closed = false;
  for (const auto& c : rep.conditions) closed = closed || c.name == "closed-loop flow";
  EXPECT_TRUE(closed);
  const ControllerGain k(sys, *r.certificate);
  EXPECT_LT(k.Evaluate(0.2, {})(0, 0), -1.0);
}

TEST(CertifyTest, SynthSdScalarClosedLoop) {
  const auto sys = Scalar("1", "1", "1");
  auto o = Opts(Mode::kSynthSd, 2);
  o.tmin = 0.05;
  o.tmax = 0.3;
  const auto r = Certify(sys, o);
  ASSERT_EQ(r.status, Status::kFeasible) << r.message;
  EXPECT_EQ(r.certificate->size, 2);
  EXPECT_TRUE(CheckCertificate(sys, *r.certificate).pass);
  const ControllerGain k(sys, *r.certificate);
  const auto split = k.Split({});
  EXPECT_EQ(split.K1.cols(), 1);
  EXPECT_EQ(split.K2.cols(), 1);
  // Closed-loop sample-to-sample map at T = 0.2 must be Schur.
  const double e = std::exp(0.2), x_gain = e, u_gain = e - 1.0;
  Eigen::Matrix2d step;
  step << x_gain, u_gain, split.K1(0, 0) * x_gain, split.K1(0, 0) * u_gain + split.K2(0, 0);
  EXPECT_LT(step.eigenvalues().cwiseAbs().maxCoeff(), 1.0);
}

}  // namespace
}  // namespace hlpv::lpvcert
