#include "hlpv/lpvcert/grid_check.h"

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "hlpv/lpvcert/gain.h"
#include "hlpv/lpvcert/lyapunov_field.h"

namespace hlpv::lpvcert {

namespace {

using Eigen::MatrixXd;
using Point = std::vector<double>;
using MatrixAt = std::function<MatrixXd(double tau, const Point& theta)>;

std::vector<double> Linspace(double lo, double hi, int n) {
  if (n <= 1 || lo == hi) return {lo};
  std::vector<double> out(n);
  for (int k = 0; k < n; ++k) out[k] = lo + (hi - lo) * k / (n - 1);
  return out;
}

std::string Describe(const std::vector<std::pair<std::string, double>>& scalars,
                     const std::vector<std::pair<std::string, const Point*>>& vectors) {
  std::ostringstream os;
  os.precision(6);
  bool first = true;
  for (const auto& [name, v] : scalars) {
    os << (first ? "" : " ") << name << "=" << v;
    first = false;
  }
  for (const auto& [name, v] : vectors) {
    os << (first ? "" : " ") << name << "=(";
    for (size_t i = 0; i < v->size(); ++i) os << (i ? "," : "") << (*v)[i];
    os << ")";
    first = false;
  }
  return os.str();
}

struct Tracker {
  ConditionReport r;
  explicit Tracker(std::string name) {
    r.name = std::move(name);
    r.max_eig = -std::numeric_limits<double>::infinity();
  }
  template <typename Desc>
  void Offer(const MatrixXd& m, Desc&& desc) {
    ++r.evaluations;
    const double e = MaxEig(m);
    if (e > r.max_eig) {
      r.max_eig = e;
      r.worst_point = desc();
    }
  }
};

std::vector<Point> Thin(const std::vector<Point>& pts, size_t cap) {
  if (pts.size() <= cap) return pts;
  std::vector<Point> out;
  for (size_t k = 0; k < cap; ++k) out.push_back(pts[k * pts.size() / cap]);
  return out;
}

/// Shared numeric view of the system at a parameter value.
struct NumericSystem {
  const LpvSystem& sys;
  MatrixXd Eval(const PolyMatrix& m, const Point& theta) const {
    return polyalg::Evaluate(m, EnvPoint(sys, 0.0, theta));
  }
  std::vector<Point> Vertices(const Point& theta) const {
    if (sys.num_params == 0) return {Point{}};
    const auto pt = EnvPoint(sys, 0.0, theta);
    std::vector<Point> out;
    for (const auto& v : sys.vertices) {
      Point mu;
      for (const auto& c : v) mu.push_back(polyalg::Evaluate(c, pt));
      out.push_back(mu);
    }
    return out;
  }
};

struct Checker {
  const LpvSystem& sys;
  const GridSpec& spec;
  NumericSystem num{sys};
  std::vector<Point> thetas;

  MatrixXd He(const MatrixXd& m) const { return m + m.transpose(); }

  /// Min-dwell conditions of a field with closed-loop data A(τ,θ), J(θ).
  void MinDwell(const std::string& prefix, const LyapunovField& f, double dwell,
                const MatrixAt& a, const MatrixAt& j, GridReport* out) const {
    Tracker flow(prefix + "flow"), boundary(prefix + "boundary"), jump(prefix + "jump");
    for (const auto& th : thetas) {
      const auto verts = num.Vertices(th);
      for (double tau : Linspace(0.0, dwell, spec.points)) {
        const MatrixXd s = f.S(tau, th);
        const MatrixXd base = f.DTau(tau, th) + He(s * a(tau, th));
        for (size_t k = 0; k < verts.size(); ++k) {
          flow.Offer(base + f.DTheta(verts[k], tau, th), [&] {
            return Describe({{"tau", tau}, {"vertex", double(k)}}, {{"theta", &th}});
          });
        }
      }
      const MatrixXd s_end = f.S(dwell, th);
      const MatrixXd base = He(s_end * a(dwell, th));
      for (size_t k = 0; k < verts.size(); ++k) {
        boundary.Offer(base + f.DTheta(verts[k], dwell, th), [&] {
          return Describe({{"vertex", double(k)}}, {{"theta", &th}});
        });
      }
    }
    const size_t side = static_cast<size_t>(std::sqrt(double(spec.max_pairs)));
    const auto pts = Thin(thetas, std::max<size_t>(1, side));
    for (const auto& eta : pts) {
      const MatrixXd je = j(dwell, eta);
      const MatrixXd s_end = f.S(dwell, eta);
      for (const auto& th : pts) {
        jump.Offer(je.transpose() * f.S(0.0, th) * je - s_end,
                   [&] { return Describe({}, {{"theta", &th}, {"eta", &eta}}); });
      }
    }
    for (auto* t : {&flow, &boundary, &jump}) out->conditions.push_back(t->r);
  }

  /// Range dwell-time conditions with a timer counting down from σ.
  void RangeDwell(const std::string& prefix, const LyapunovField& f, double tmin, double tmax,
                  const MatrixAt& a, const MatrixAt& j, GridReport* out) const {
    Tracker flow(prefix + "flow"), jump(prefix + "jump");
    for (const auto& th : thetas) {
      const auto verts = num.Vertices(th);
      for (double tau : Linspace(0.0, tmax, spec.points)) {
        const MatrixXd s = f.S(tau, th);
        const MatrixXd base = -f.DTau(tau, th) + He(s * a(tau, th));
        for (size_t k = 0; k < verts.size(); ++k) {
          flow.Offer(base + f.DTheta(verts[k], tau, th), [&] {
            return Describe({{"tau", tau}, {"vertex", double(k)}}, {{"theta", &th}});
          });
        }
      }
      const MatrixXd jt = j(0.0, th);
      const MatrixXd s0 = f.S(0.0, th);
      for (double sigma : Linspace(tmin, tmax, spec.sigma_points)) {
        jump.Offer(jt.transpose() * f.S(sigma, th) * jt - s0,
                   [&] { return Describe({{"sigma", sigma}}, {{"theta", &th}}); });
      }
    }
    out->conditions.push_back(flow.r);
    out->conditions.push_back(jump.r);
  }

  void Positivity(const LyapunovField& f, double tmax, GridReport* out) const {
    out->min_eig = std::numeric_limits<double>::infinity();
    for (const auto& th : thetas) {
      for (double tau : Linspace(0.0, tmax, spec.points)) {
        const double e =
            MinEig(polyalg::Evaluate(f.base(), EnvPoint(sys, f.ClampTimer(tau), th)));
        if (e < out->min_eig) {
          out->min_eig = e;
          out->min_eig_point = Describe({{"tau", tau}}, {{"theta", &th}});
        }
      }
    }
  }
};

Certificate AsPlain(const Certificate& c, Mode mode) {
  Certificate out = c;
  out.mode = mode;
  out.S = c.R;
  return out;
}

}  // namespace

std::vector<std::vector<double>> ParameterGrid(const LpvSystem& sys, int points) {
  const int n = sys.num_params;
  if (n == 0) return {Point{}};
  std::vector<std::vector<double>> axes;
  double spacing = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    axes.push_back(Linspace(sys.box_lo[i], sys.box_hi[i], points));
    if (axes.back().size() > 1) {
      spacing = std::min(spacing, (sys.box_hi[i] - sys.box_lo[i]) / (points - 1));
    }
  }
  const auto pv = sys.p_vars();
  std::vector<std::vector<Polynomial>> grad(sys.h.size());
  for (size_t k = 0; k < sys.h.size(); ++k) {
    for (int v : pv) grad[k].push_back(polyalg::Diff(sys.h[k], v));
  }
  auto in_domain = [&](const Point& th) {
    const auto pt = EnvPoint(sys, 0.0, th);
    for (const auto& g : sys.g) {
      if (polyalg::Evaluate(g, pt) < -1e-9) return false;
    }
    for (int i = 0; i < n; ++i) {
      const double w = 1e-9 * (1.0 + std::fabs(sys.box_hi[i] - sys.box_lo[i]));
      if (sys.box_generators && (th[i] < sys.box_lo[i] - w || th[i] > sys.box_hi[i] + w)) {
        return false;
      }
    }
    return true;
  };
  auto project = [&](Point& th) {
    const int m = static_cast<int>(sys.h.size());
    for (int it = 0; it < 100; ++it) {
      const auto pt = EnvPoint(sys, 0.0, th);
      Eigen::VectorXd r(m);
      MatrixXd jac(m, n);
      for (int k = 0; k < m; ++k) {
        r(k) = polyalg::Evaluate(sys.h[k], pt);
        for (int i = 0; i < n; ++i) jac(k, i) = polyalg::Evaluate(grad[k][i], pt);
      }
      if (r.norm() < 1e-13) return true;
      const Eigen::VectorXd step = jac.completeOrthogonalDecomposition().solve(r);
      for (int i = 0; i < n; ++i) th[i] -= step(i);
    }
    const auto pt = EnvPoint(sys, 0.0, th);
    for (const auto& h : sys.h) {
      if (std::fabs(polyalg::Evaluate(h, pt)) > 1e-10) return false;
    }
    return true;
  };

  std::vector<Point> out;
  std::vector<int> idx(n, 0);
  while (true) {
    Point th(n);
    for (int i = 0; i < n; ++i) th[i] = axes[i][idx[i]];
    bool keep = true;
    if (!sys.h.empty()) {
      keep = project(th);
      if (keep && std::isfinite(spacing)) {
        for (const auto& q : out) {
          double d2 = 0.0;
          for (int i = 0; i < n; ++i) d2 += (q[i] - th[i]) * (q[i] - th[i]);
          if (d2 < 0.25 * spacing * spacing) {
            keep = false;
            break;
          }
        }
      }
    }
    if (keep && in_domain(th)) out.push_back(th);
    int i = n - 1;
    while (i >= 0 && ++idx[i] == static_cast<int>(axes[i].size())) idx[i--] = 0;
    if (i < 0) break;
  }
  return out;
}

GridReport CheckCertificate(const LpvSystem& sys, const Certificate& cert,
                            const GridSpec& spec) {
  if (spec.points < 1 || spec.sigma_points < 1 || spec.max_pairs < 1) {
    throw std::invalid_argument("grid specification is empty");
  }
  sys.Validate();
  Checker ck{sys, spec};
  ck.thetas = ParameterGrid(sys, spec.points);
  if (ck.thetas.empty()) throw std::invalid_argument("parameter grid is empty");
  const NumericSystem& num = ck.num;
  const MatrixAt a_open = [&](double, const Point& th) { return num.Eval(sys.A, th); };
  const MatrixAt j_open = [&](double, const Point& th) { return num.Eval(sys.J, th); };

  GridReport rep;
  rep.min_eig_threshold = cert.epsilon - spec.tol;
  switch (cert.mode) {
    case Mode::kMinDwell: {
      const LyapunovField f(sys, cert);
      ck.MinDwell("", f, cert.dwell, a_open, j_open, &rep);
      ck.Positivity(f, cert.dwell, &rep);
      break;
    }
    case Mode::kQuadratic:
    case Mode::kRobust: {
      const LyapunovField f(sys, cert);
      Tracker flow("flow");
      for (const auto& th : ck.thetas) {
        const MatrixXd base = ck.He(f.S(0.0, th) * a_open(0.0, th));
        const auto verts = cert.mode == Mode::kRobust ? num.Vertices(th) : std::vector<Point>{{}};
        for (size_t k = 0; k < verts.size(); ++k) {
          flow.Offer(base + f.DTheta(verts[k], 0.0, th), [&] {
            return Describe({{"vertex", double(k)}}, {{"theta", &th}});
          });
        }
      }
      rep.conditions.push_back(flow.r);
      ck.Positivity(f, 0.0, &rep);
      break;
    }
    case Mode::kRangeDwell: {
      const LyapunovField f(sys, cert);
      ck.RangeDwell("", f, cert.tmin, cert.tmax, a_open, j_open, &rep);
      ck.Positivity(f, cert.tmax, &rep);
      break;
    }
    case Mode::kSynthCt: {
      // Conditions in (R, U), then the closed loop with S = R⁻¹.
      const LyapunovField fr(sys, AsPlain(cert, Mode::kMinDwell));
      const auto u_at = [&](double tau, const Point& th) {
        return polyalg::Evaluate(cert.U, EnvPoint(sys, fr.ClampTimer(tau), th));
      };
      Tracker flow("flow"), boundary("boundary"), jump("jump");
      for (const auto& th : ck.thetas) {
        const auto verts = num.Vertices(th);
        const MatrixXd a = num.Eval(sys.A, th), b = num.Eval(sys.B, th);
        auto phi = [&](double tau) { return ck.He(a * fr.S(tau, th) + b * u_at(tau, th)); };
        for (double tau : Linspace(0.0, cert.dwell, spec.points)) {
          const MatrixXd base = -fr.DTau(tau, th) + phi(tau);
          for (size_t k = 0; k < verts.size(); ++k) {
            flow.Offer(base - fr.DTheta(verts[k], tau, th), [&] {
              return Describe({{"tau", tau}, {"vertex", double(k)}}, {{"theta", &th}});
            });
          }
        }
        const MatrixXd base = phi(cert.dwell);
        for (size_t k = 0; k < verts.size(); ++k) {
          boundary.Offer(base - fr.DTheta(verts[k], cert.dwell, th), [&] {
            return Describe({{"vertex", double(k)}}, {{"theta", &th}});
          });
        }
      }
      const size_t side = static_cast<size_t>(std::sqrt(double(spec.max_pairs)));
      const auto pts = Thin(ck.thetas, std::max<size_t>(1, side));
      for (const auto& eta : pts) {
        const MatrixXd je = num.Eval(sys.J, eta);
        const MatrixXd mid = je * fr.S(cert.dwell, eta) * je.transpose();
        for (const auto& th : pts) {
          jump.Offer(mid - fr.S(0.0, th),
                     [&] { return Describe({}, {{"theta", &th}, {"eta", &eta}}); });
        }
      }
      for (auto* t : {&flow, &boundary, &jump}) rep.conditions.push_back(t->r);
      ck.Positivity(fr, cert.dwell, &rep);

      const LyapunovField f(sys, cert);
      const ControllerGain gain(sys, cert);
      const MatrixAt a_cl = [&](double tau, const Point& th) {
        return MatrixXd(num.Eval(sys.A, th) + num.Eval(sys.B, th) * gain.Evaluate(tau, th));
      };
      ck.MinDwell("closed-loop ", f, cert.dwell, a_cl, j_open, &rep);
      break;
    }
    case Mode::kSynthSd: {
      const auto aug = Augment(sys);
      const int nz = sys.n + sys.m;
      const LyapunovField fr(sys, AsPlain(cert, Mode::kRangeDwell));
      Tracker flow("flow"), jump("jump");
      for (const auto& th : ck.thetas) {
        const auto verts = num.Vertices(th);
        const MatrixXd a = num.Eval(aug.A, th);
        for (double tau : Linspace(0.0, cert.tmax, spec.points)) {
          const MatrixXd base = fr.DTau(tau, th) + ck.He(a * fr.S(tau, th));
          for (size_t k = 0; k < verts.size(); ++k) {
            flow.Offer(base - fr.DTheta(verts[k], tau, th), [&] {
              return Describe({{"tau", tau}, {"vertex", double(k)}}, {{"theta", &th}});
            });
          }
        }
        const MatrixXd r0 = fr.S(0.0, th);
        const MatrixXd off = num.Eval(aug.J, th) * r0 +
                             num.Eval(aug.B, th) * polyalg::Evaluate(cert.U, EnvPoint(sys, 0.0, th));
        for (double sigma : Linspace(cert.tmin, cert.tmax, spec.sigma_points)) {
          MatrixXd m(2 * nz, 2 * nz);
          m << -fr.S(sigma, th), off, off.transpose(), -r0;
          jump.Offer(m, [&] { return Describe({{"sigma", sigma}}, {{"theta", &th}}); });
        }
      }
      rep.conditions.push_back(flow.r);
      rep.conditions.push_back(jump.r);
      ck.Positivity(fr, cert.tmax, &rep);

      const LyapunovField f(sys, cert);
      const ControllerGain gain(sys, cert);
      const MatrixAt a_cl = [&](double, const Point& th) { return num.Eval(aug.A, th); };
      const MatrixAt j_cl = [&](double, const Point& th) {
        return MatrixXd(num.Eval(aug.J, th) + num.Eval(aug.B, th) * gain.Evaluate(0.0, th));
      };
      ck.RangeDwell("closed-loop ", f, cert.tmin, cert.tmax, a_cl, j_cl, &rep);
      break;
    }
  }
  rep.pass = rep.min_eig >= rep.min_eig_threshold;
  for (auto& c : rep.conditions) {
    c.pass = c.max_eig <= spec.tol;
    rep.pass = rep.pass && c.pass;
  }
  return rep;
}

}  // namespace hlpv::lpvcert
