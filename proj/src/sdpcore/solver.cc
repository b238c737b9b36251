#include "hlpv/sdpcore/solver.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include <Eigen/SparseCore>
#include <Eigen/SparseQR>

#include "kkt_system.h"

namespace hlpv::sdpcore {

using internal::Entry;
using internal::KktSystem;
using internal::RowPart;
using internal::WorkProblem;

std::string_view StatusName(Status s) {
  switch (s) {
    case Status::kFeasible: return "feasible";
    case Status::kInfeasible: return "infeasible";
    case Status::kMarginal: return "marginal";
    case Status::kNumericalFailure: return "numerical-failure";
  }
  return "unknown";
}

SdpProblem MarginProblem(const SdpProblem& p, double trace_cap) {
  const int nb = p.num_blocks();
  SdpProblem out;
  out.block_dims = p.block_dims;
  out.block_dims.insert(out.block_dims.end(), nb, 1);
  out.num_free = p.num_free + 1;
  const int lambda = p.num_free;
  out.constraints.reserve(p.constraints.size() + nb);
  for (const auto& c : p.constraints) {
    Constraint row = c;
    double trace = 0.0;
    for (const auto& e : c.entries) {
      if (e.i == e.j) trace += e.value;
    }
    if (trace != 0.0) row.free.emplace_back(lambda, trace);
    out.constraints.push_back(std::move(row));
  }
  for (int k = 0; k < nb; ++k) {
    Constraint cap;
    for (int i = 0; i < p.block_dims[k]; ++i) cap.entries.push_back({k, i, i, 1.0});
    cap.entries.push_back({nb + k, 0, 0, 1.0});
    cap.free.emplace_back(lambda, static_cast<double>(p.block_dims[k]));
    cap.rhs = trace_cap * p.block_dims[k];
    out.constraints.push_back(std::move(cap));
  }
  out.objective_free.assign(out.num_free, 0.0);
  out.objective_free[lambda] = -1.0;
  out.sense = Sense::kMinimize;
  return out;
}

namespace {

enum class Outcome {
  kConverged,
  kEarlyPositive,
  kEarlyNegative,
  kStructurallyInfeasible,
  kFailed,
};

struct CoreResult {
  Outcome outcome{Outcome::kFailed};
  std::vector<Eigen::MatrixXd> x, z;
  Eigen::VectorXd x_free, y;
  double pobj{0.0}, dobj{0.0}, pinf{0.0}, dinf{0.0}, gap{0.0};
  int iterations{0};
  std::vector<IterationInfo> trace;
  std::string message;
};

// Bookkeeping to map a presolved WorkProblem back to the problem it came from.
struct Presolved {
  WorkProblem wp;
  std::vector<int> row_of;        // original row -> work row or -1
  std::vector<double> row_scale;  // original row -> divisor
  std::vector<int> col_of;        // original free -> work col or -1
  std::vector<std::pair<int, int>> split_of;  // original free -> (+blk, -blk)
  int num_blocks{0};              // original block count (prefix of wp.dims)
  bool infeasible{false};
  std::string message;
};

double RowInfNorm(const Constraint& c) {
  double s = 0.0;
  for (const auto& e : c.entries) s = std::max(s, std::fabs(e.value));
  for (const auto& f : c.free) s = std::max(s, std::fabs(f.second));
  return s;
}

// Rank-deficient block parts inside a row group: rows whose block coefficients
// are a combination of other rows. Consistent ones are dropped.
void DropDependentRows(Presolved* pre, std::vector<bool>* keep) {
  WorkProblem& wp = pre->wp;
  KktSystem kkt(wp);
  std::vector<Eigen::MatrixXd> eye(wp.dims.size());
  for (size_t k = 0; k < wp.dims.size(); ++k) {
    eye[k] = Eigen::MatrixXd::Identity(wp.dims[k], wp.dims[k]);
  }
  std::vector<int> local(wp.m, -1);
  for (int g = 0; g < kkt.num_groups(); ++g) {
    const auto& rows = kkt.group_rows(g);
    const int mg = static_cast<int>(rows.size());
    for (int r = 0; r < mg; ++r) local[rows[r]] = r;
    Eigen::MatrixXd m0 = Eigen::MatrixXd::Zero(mg, mg);
    for (size_t k = 0; k < wp.dims.size(); ++k) {
      if (!wp.rows_of_block[k].empty() && local[wp.rows_of_block[k].front().row] >= 0) {
        internal::AccumulateSchur(eye[k], wp.rows_of_block[k], local, &m0);
      }
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(m0);
    qr.setThreshold(1e-12);
    const int rank = static_cast<int>(qr.rank());
    if (rank < mg) {
      const auto perm = qr.colsPermutation().indices();
      std::vector<int> indep(perm.data(), perm.data() + rank);
      Eigen::MatrixXd mpp(rank, rank);
      for (int a = 0; a < rank; ++a) {
        for (int b = 0; b < rank; ++b) mpp(a, b) = m0(indep[a], indep[b]);
      }
      Eigen::LDLT<Eigen::MatrixXd> ldlt(mpp);
      for (int t = rank; t < mg; ++t) {
        const int r = perm[t];
        Eigen::VectorXd rhs(rank);
        for (int a = 0; a < rank; ++a) rhs[a] = m0(indep[a], r);
        const Eigen::VectorXd coef = ldlt.solve(rhs);
        Eigen::VectorXd fpart = Eigen::VectorXd::Zero(wp.p);
        double bpart = wp.b[rows[r]];
        double scale = std::fabs(wp.b[rows[r]]);
        for (const auto& [k, v] : wp.free_of_row[rows[r]]) fpart[k] += v;
        for (int a = 0; a < rank; ++a) {
          const int row = rows[indep[a]];
          bpart -= coef[a] * wp.b[row];
          scale += std::fabs(coef[a] * wp.b[row]);
          for (const auto& [k, v] : wp.free_of_row[row]) fpart[k] -= coef[a] * v;
        }
        const double ftol = 1e-9 * (1.0 + coef.lpNorm<1>());
        const bool free_zero = wp.p == 0 || fpart.lpNorm<Eigen::Infinity>() <= ftol;
        if (!free_zero) {
          pre->message += "dependent block rows with free coupling kept; ";
          continue;
        }
        if (std::fabs(bpart) > 1e-9 * (1.0 + scale)) {
          pre->infeasible = true;
          pre->message += "inconsistent equality rows; ";
          return;
        }
        (*keep)[rows[r]] = false;
      }
    }
    for (int r = 0; r < mg; ++r) local[rows[r]] = -1;
  }
}

WorkProblem BuildWork(const std::vector<int>& dims, int p,
                      const std::vector<Constraint>& rows,
                      const std::vector<double>& rhs,
                      const std::vector<BlockEntry>& objective,
                      const std::vector<double>& objective_free) {
  WorkProblem wp;
  wp.dims = dims;
  wp.m = static_cast<int>(rows.size());
  wp.p = p;
  wp.rows_of_block.assign(dims.size(), {});
  wp.free_of_row.assign(wp.m, {});
  wp.b = Eigen::VectorXd::Zero(wp.m);
  for (int r = 0; r < wp.m; ++r) {
    wp.b[r] = rhs[r];
    for (const auto& e : rows[r].entries) {
      auto& parts = wp.rows_of_block[e.block];
      if (parts.empty() || parts.back().row != r) parts.push_back({r, {}});
      parts.back().entries.push_back({e.i, e.j, e.value});
    }
    wp.free_of_row[r] = rows[r].free;
  }
  wp.cf = Eigen::VectorXd::Zero(p);
  for (int k = 0; k < p && k < static_cast<int>(objective_free.size()); ++k) {
    wp.cf[k] = objective_free[k];
  }
  wp.c.resize(dims.size());
  for (size_t k = 0; k < dims.size(); ++k) {
    wp.c[k] = DenseBlock(objective, static_cast<int>(k), dims[k]);
  }
  return wp;
}

Presolved Presolve(const SdpProblem& in) {
  Presolved pre;
  const SdpProblem p = Canonicalize(in);
  pre.num_blocks = p.num_blocks();
  const int m = p.num_rows();
  pre.row_of.assign(m, -1);
  pre.row_scale.assign(m, 1.0);
  pre.col_of.assign(p.num_free, -1);
  pre.split_of.assign(p.num_free, {-1, -1});

  std::vector<double> cf(p.num_free, 0.0);
  for (int k = 0; k < static_cast<int>(p.objective_free.size()); ++k) {
    cf[k] = p.objective_free[k];
  }

  // Free columns that appear in rows without block entries are split into
  // nonnegative pairs so that every row touches a PSD block.
  std::vector<bool> used(p.num_free, false), split(p.num_free, false);
  for (const auto& c : p.constraints) {
    for (const auto& f : c.free) used[f.first] = true;
    if (c.entries.empty()) {
      if (c.free.empty()) {
        if (std::fabs(c.rhs) > 0.0) {
          pre.infeasible = true;
          pre.message = "empty row with nonzero right-hand side";
          return pre;
        }
        continue;
      }
      for (const auto& f : c.free) split[f.first] = true;
    }
  }
  std::vector<int> dims = p.block_dims;
  std::vector<BlockEntry> objective = p.objective;
  std::vector<int> col_map(p.num_free, -1);
  int ncols = 0;
  for (int k = 0; k < p.num_free; ++k) {
    if (!used[k]) {
      if (cf[k] != 0.0) pre.message += "unbounded unused free variable; ";
      continue;
    }
    if (split[k]) {
      const int bp = static_cast<int>(dims.size());
      dims.push_back(1);
      dims.push_back(1);
      pre.split_of[k] = {bp, bp + 1};
      if (cf[k] != 0.0) {
        objective.push_back({bp, 0, 0, cf[k]});
        objective.push_back({bp + 1, 0, 0, -cf[k]});
      }
    } else {
      col_map[k] = ncols++;
    }
  }

  std::vector<Constraint> rows;
  std::vector<double> rhs;
  std::vector<int> origin;
  for (int r = 0; r < m; ++r) {
    const auto& c = p.constraints[r];
    if (c.entries.empty() && c.free.empty()) continue;
    Constraint row;
    row.entries = c.entries;
    for (const auto& [k, v] : c.free) {
      if (split[k]) {
        row.entries.push_back({pre.split_of[k].first, 0, 0, v});
        row.entries.push_back({pre.split_of[k].second, 0, 0, -v});
      } else {
        row.free.emplace_back(col_map[k], v);
      }
    }
    std::sort(row.entries.begin(), row.entries.end(),
              [](const BlockEntry& a, const BlockEntry& b) {
                return std::tie(a.block, a.i, a.j) < std::tie(b.block, b.i, b.j);
              });
    const double scale = RowInfNorm(row);
    for (auto& e : row.entries) e.value /= scale;
    for (auto& f : row.free) f.second /= scale;
    pre.row_scale[r] = scale;
    rhs.push_back(c.rhs / scale);
    rows.push_back(std::move(row));
    origin.push_back(r);
  }

  // Dependent free columns: keep a maximal independent subset.
  std::vector<int> keep_col(ncols, 1);
  if (ncols > 0 && !rows.empty()) {
    std::vector<Eigen::Triplet<double>> trip;
    std::vector<double> colnorm(ncols, 0.0);
    for (const auto& row : rows) {
      for (const auto& [k, v] : row.free) colnorm[k] += v * v;
    }
    for (size_t r = 0; r < rows.size(); ++r) {
      for (const auto& [k, v] : rows[r].free) {
        trip.emplace_back(static_cast<int>(r), k, v / std::sqrt(colnorm[k]));
      }
    }
    Eigen::SparseMatrix<double> f(static_cast<int>(rows.size()), ncols);
    f.setFromTriplets(trip.begin(), trip.end());
    f.makeCompressed();
    Eigen::SparseQR<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> qr;
    qr.setPivotThreshold(1e-9);
    qr.compute(f);
    if (qr.info() == Eigen::Success) {
      const int rank = static_cast<int>(qr.rank());
      if (rank < ncols) {
        const auto perm = qr.colsPermutation().indices();
        for (int t = rank; t < ncols; ++t) {
          const int k = perm[t];
          // Columns carrying objective weight stay; dropping them could
          // change the optimum.
          bool has_obj = false;
          for (int o = 0; o < p.num_free; ++o) {
            if (col_map[o] == k && cf[o] != 0.0) has_obj = true;
          }
          if (!has_obj) keep_col[k] = 0;
        }
      }
    }
  }
  std::vector<int> renum(ncols, -1);
  int pc = 0;
  for (int k = 0; k < ncols; ++k) {
    if (keep_col[k]) renum[k] = pc++;
  }
  for (auto& row : rows) {
    std::vector<std::pair<int, double>> kept;
    for (const auto& [k, v] : row.free) {
      if (renum[k] >= 0) kept.emplace_back(renum[k], v);
    }
    row.free = std::move(kept);
  }
  std::vector<double> cf_work(pc, 0.0);
  for (int k = 0; k < p.num_free; ++k) {
    if (col_map[k] >= 0 && renum[col_map[k]] >= 0) {
      pre.col_of[k] = renum[col_map[k]];
      cf_work[pre.col_of[k]] = cf[k];
    }
  }

  pre.wp = BuildWork(dims, pc, rows, rhs, objective, cf_work);

  std::vector<bool> keep(rows.size(), true);
  DropDependentRows(&pre, &keep);
  if (pre.infeasible) return pre;
  if (std::find(keep.begin(), keep.end(), false) != keep.end()) {
    std::vector<Constraint> rows2;
    std::vector<double> rhs2;
    std::vector<int> origin2;
    for (size_t r = 0; r < rows.size(); ++r) {
      if (!keep[r]) continue;
      rows2.push_back(rows[r]);
      rhs2.push_back(rhs[r]);
      origin2.push_back(origin[r]);
    }
    rows = std::move(rows2);
    rhs = std::move(rhs2);
    origin = std::move(origin2);
    pre.wp = BuildWork(dims, pc, rows, rhs, objective, cf_work);
  }
  for (size_t r = 0; r < origin.size(); ++r) pre.row_of[origin[r]] = static_cast<int>(r);
  return pre;
}

struct Scaling {
  Eigen::MatrixXd g, ginv, w;
  Eigen::VectorXd lambda;
};

bool NtScaling(const Eigen::MatrixXd& x, const Eigen::MatrixXd& z, Scaling* s) {
  Eigen::LLT<Eigen::MatrixXd> lx(x);
  if (lx.info() != Eigen::Success) return false;
  const Eigen::MatrixXd l = lx.matrixL();
  const Eigen::MatrixXd ltzl = l.transpose() * z * l;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (ltzl + ltzl.transpose()));
  if (es.info() != Eigen::Success) return false;
  Eigen::VectorXd ev = es.eigenvalues();
  if (ev.minCoeff() <= 0.0) return false;
  s->lambda = ev.cwiseSqrt();
  const Eigen::VectorXd isq = s->lambda.cwiseSqrt().cwiseInverse();
  s->g = l * es.eigenvectors() * isq.asDiagonal();
  // G⁻¹ = Λ^{1/2} Vᵀ L⁻¹
  const Eigen::MatrixXd linv =
      lx.matrixL().solve(Eigen::MatrixXd::Identity(x.rows(), x.cols()));
  s->ginv = s->lambda.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose() * linv;
  s->w = s->g * s->g.transpose();
  return true;
}

// Largest α ≤ cap with Λ + α·d ⪰ 0 for scaled direction d.
double MaxStep(const Eigen::VectorXd& lambda, const Eigen::MatrixXd& d) {
  const Eigen::VectorXd is = lambda.cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd m = is.asDiagonal() * d * is.asDiagonal();
  m = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  const double e = es.eigenvalues().minCoeff();
  return e < 0.0 ? -1.0 / e : std::numeric_limits<double>::infinity();
}

double Inner(const std::vector<Eigen::MatrixXd>& a, const std::vector<Eigen::MatrixXd>& b) {
  double s = 0.0;
  for (size_t k = 0; k < a.size(); ++k) s += a[k].cwiseProduct(b[k]).sum();
  return s;
}

double Frob(const std::vector<Eigen::MatrixXd>& a) {
  double s = 0.0;
  for (const auto& m : a) s += m.squaredNorm();
  return std::sqrt(s);
}

CoreResult RunIpm(const WorkProblem& wp, const SolverOptions& opts, int margin_col) {
  CoreResult res;
  const int nb = static_cast<int>(wp.dims.size());
  const int n = wp.total_dim();
  std::vector<Eigen::MatrixXd> x(nb), z(nb);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(wp.m), xf = Eigen::VectorXd::Zero(wp.p);

  // Initial point (Toh–Todd–Tütüncü heuristic, per block).
  std::vector<double> row_norm_sq(wp.m, 0.0);
  for (int k = 0; k < nb; ++k) {
    double xi = std::max(10.0, std::sqrt(static_cast<double>(wp.dims[k])));
    double eta = std::max(xi, wp.c[k].norm());
    for (const auto& part : wp.rows_of_block[k]) {
      double nrm = 0.0;
      for (const auto& e : part.entries) nrm += (e.i == e.j ? 1.0 : 2.0) * e.v * e.v;
      nrm = std::sqrt(nrm);
      xi = std::max(xi, wp.dims[k] * (1.0 + std::fabs(wp.b[part.row])) / (1.0 + nrm));
      eta = std::max(eta, nrm);
    }
    x[k] = xi * Eigen::MatrixXd::Identity(wp.dims[k], wp.dims[k]);
    z[k] = eta * Eigen::MatrixXd::Identity(wp.dims[k], wp.dims[k]);
  }

  KktSystem kkt(wp);
  const double bnorm = wp.b.norm();
  double cnorm = wp.cf.norm();
  for (const auto& c : wp.c) cnorm += c.norm();
  int stalls = 0;

  for (int iter = 0;; ++iter) {
    const Eigen::VectorXd rp = wp.b - wp.ApplyA(x) - wp.ApplyF(xf);
    std::vector<Eigen::MatrixXd> rd = wp.AdjointA(y);
    for (int k = 0; k < nb; ++k) rd[k] = wp.c[k] - z[k] - rd[k];
    const Eigen::VectorXd rf = wp.cf - wp.AdjointF(y);
    const double pobj = Inner(wp.c, x) + wp.cf.dot(xf);
    const double dobj = wp.b.dot(y);
    const double pinf = rp.norm() / (1.0 + bnorm);
    const double dinf = (Frob(rd) + rf.norm()) / (1.0 + cnorm);
    const double gap = std::fabs(pobj - dobj) / (1.0 + std::fabs(pobj) + std::fabs(dobj));
    const double mu = Inner(x, z) / n;

    res.pobj = pobj;
    res.dobj = dobj;
    res.pinf = pinf;
    res.dinf = dinf;
    res.gap = gap;
    res.iterations = iter;
    IterationInfo info{iter, pobj, dobj, pinf, dinf, gap, mu, 0.0, 0.0};
    res.trace.push_back(info);
    if (opts.verbose) {
      std::fprintf(stderr, "%3d pobj %+.8e dobj %+.8e pinf %.2e dinf %.2e gap %.2e mu %.2e\n",
                   iter, pobj, dobj, pinf, dinf, gap, mu);
    }
    auto finish = [&](Outcome o) {
      res.outcome = o;
      res.x = x;
      res.z = z;
      res.y = y;
      res.x_free = xf;
    };
    if (!std::isfinite(pobj) || !std::isfinite(dobj) || !std::isfinite(mu)) {
      res.message += "non-finite iterate; ";
      finish(Outcome::kFailed);
      return res;
    }
    if (pinf <= opts.tol && dinf <= opts.tol && gap <= opts.tol) {
      finish(Outcome::kConverged);
      return res;
    }
    if (margin_col >= 0 && opts.early_stop) {
      const double lam = xf[margin_col];
      if (pinf <= opts.tol && lam > opts.margin_threshold) {
        finish(Outcome::kEarlyPositive);
        return res;
      }
      // dobj bounds min(−λ) from below, so λ* ≤ −dobj.
      if (dinf <= opts.tol && -dobj < -opts.margin_threshold) {
        finish(Outcome::kEarlyNegative);
        return res;
      }
    }
    if (iter >= opts.max_iter) {
      res.message += "iteration limit reached; ";
      finish(Outcome::kFailed);
      return res;
    }

    std::vector<Scaling> sc(nb);
    std::vector<Eigen::MatrixXd> w(nb);
    for (int k = 0; k < nb; ++k) {
      if (!NtScaling(x[k], z[k], &sc[k])) {
        res.message += "lost positive definiteness; ";
        finish(Outcome::kFailed);
        return res;
      }
      w[k] = sc[k].w;
    }
    kkt.Factor(w);

    std::vector<Eigen::MatrixXd> wrdw(nb);
    for (int k = 0; k < nb; ++k) wrdw[k] = w[k] * rd[k] * w[k];

    auto direction = [&](const std::vector<Eigen::MatrixXd>& rc,
                         std::vector<Eigen::MatrixXd>* dx, std::vector<Eigen::MatrixXd>* dz,
                         Eigen::VectorXd* dy, Eigen::VectorXd* dxf) {
      std::vector<Eigen::MatrixXd> t(nb);
      for (int k = 0; k < nb; ++k) t[k] = rc[k] - wrdw[k];
      const Eigen::VectorXd h = rp - wp.ApplyA(t);
      kkt.Solve(h, rf, dy, dxf);
      *dz = wp.AdjointA(*dy);
      dx->resize(nb);
      for (int k = 0; k < nb; ++k) {
        (*dz)[k] = rd[k] - (*dz)[k];
        (*dx)[k] = rc[k] - w[k] * (*dz)[k] * w[k];
        (*dx)[k] = 0.5 * ((*dx)[k] + (*dx)[k].transpose());
        (*dz)[k] = 0.5 * ((*dz)[k] + (*dz)[k].transpose());
      }
    };
    auto steps = [&](const std::vector<Eigen::MatrixXd>& dx,
                     const std::vector<Eigen::MatrixXd>& dz, double* ap, double* ad,
                     std::vector<Eigen::MatrixXd>* dxs, std::vector<Eigen::MatrixXd>* dzs) {
      *ap = std::numeric_limits<double>::infinity();
      *ad = *ap;
      dxs->resize(nb);
      dzs->resize(nb);
      for (int k = 0; k < nb; ++k) {
        (*dxs)[k] = sc[k].ginv * dx[k] * sc[k].ginv.transpose();
        (*dzs)[k] = sc[k].g.transpose() * dz[k] * sc[k].g;
        *ap = std::min(*ap, MaxStep(sc[k].lambda, (*dxs)[k]));
        *ad = std::min(*ad, MaxStep(sc[k].lambda, (*dzs)[k]));
      }
    };

    // Predictor.
    std::vector<Eigen::MatrixXd> rc(nb);
    for (int k = 0; k < nb; ++k) rc[k] = -x[k];
    std::vector<Eigen::MatrixXd> dx, dz, dxs, dzs;
    Eigen::VectorXd dy, dxf;
    direction(rc, &dx, &dz, &dy, &dxf);
    double ap, ad;
    steps(dx, dz, &ap, &ad, &dxs, &dzs);
    ap = std::min(1.0, ap);
    ad = std::min(1.0, ad);
    double mu_aff = 0.0;
    for (int k = 0; k < nb; ++k) {
      mu_aff += (x[k] + ap * dx[k]).cwiseProduct(z[k] + ad * dz[k]).sum();
    }
    mu_aff /= n;
    const double ratio = std::clamp(mu_aff / mu, 0.0, 1.0);
    const double expo = std::max(1.0, 3.0 * std::pow(std::min(ap, ad), 2));
    const double sigma = std::pow(ratio, expo);

    // Corrector in the scaled space: Λ·D + D·Λ = rhs.
    for (int k = 0; k < nb; ++k) {
      const Eigen::VectorXd& lam = sc[k].lambda;
      Eigen::MatrixXd rhs = -(dxs[k] * dzs[k] + dzs[k] * dxs[k]);
      rhs.diagonal().array() += 2.0 * sigma * mu;
      rhs.diagonal() -= 2.0 * lam.cwiseAbs2();
      for (int i = 0; i < rhs.rows(); ++i) {
        for (int j = 0; j < rhs.cols(); ++j) rhs(i, j) /= lam[i] + lam[j];
      }
      rc[k] = sc[k].g * rhs * sc[k].g.transpose();
    }
    direction(rc, &dx, &dz, &dy, &dxf);
    steps(dx, dz, &ap, &ad, &dxs, &dzs);
    ap = std::min(1.0, opts.step_fraction * ap);
    ad = std::min(1.0, opts.step_fraction * ad);

    for (int k = 0; k < nb; ++k) {
      x[k] += ap * dx[k];
      z[k] += ad * dz[k];
    }
    xf += ap * dxf;
    y += ad * dy;
    res.trace.back().step_primal = ap;
    res.trace.back().step_dual = ad;

    if (std::max(ap, ad) < 1e-6) {
      if (++stalls >= 5) {
        res.message += "step lengths collapsed; ";
        finish(Outcome::kFailed);
        return res;
      }
    } else {
      stalls = 0;
    }
  }
}

// Runs presolve + IPM and maps everything back to `p`'s variables.
CoreResult SolveCore(const SdpProblem& p, const SolverOptions& opts, int margin_col) {
  Presolved pre = Presolve(p);
  CoreResult out;
  out.message = pre.message;
  const int nb = p.num_blocks();
  auto zero_blocks = [&] {
    std::vector<Eigen::MatrixXd> v(nb);
    for (int k = 0; k < nb; ++k) v[k] = Eigen::MatrixXd::Zero(p.block_dims[k], p.block_dims[k]);
    return v;
  };
  if (pre.infeasible) {
    out.outcome = Outcome::kStructurallyInfeasible;
    out.x = zero_blocks();
    out.z = zero_blocks();
    out.x_free = Eigen::VectorXd::Zero(p.num_free);
    out.y = Eigen::VectorXd::Zero(p.num_rows());
    return out;
  }
  int work_margin = -1;
  if (margin_col >= 0) work_margin = pre.col_of[margin_col];
  if (margin_col >= 0 && work_margin < 0) {
    out.message += "margin variable eliminated by presolve; ";
  }
  CoreResult core = RunIpm(pre.wp, opts, work_margin);
  out.outcome = core.outcome;
  out.pobj = core.pobj;
  out.dobj = core.dobj;
  out.pinf = core.pinf;
  out.dinf = core.dinf;
  out.gap = core.gap;
  out.iterations = core.iterations;
  out.trace = std::move(core.trace);
  out.message += core.message;
  out.x.assign(core.x.begin(), core.x.begin() + nb);
  out.z.assign(core.z.begin(), core.z.begin() + nb);
  out.x_free = Eigen::VectorXd::Zero(p.num_free);
  for (int k = 0; k < p.num_free; ++k) {
    if (pre.col_of[k] >= 0) {
      out.x_free[k] = core.x_free[pre.col_of[k]];
    } else if (pre.split_of[k].first >= 0) {
      out.x_free[k] = core.x[pre.split_of[k].first](0, 0) -
                      core.x[pre.split_of[k].second](0, 0);
    }
  }
  out.y = Eigen::VectorXd::Zero(p.num_rows());
  for (int r = 0; r < p.num_rows(); ++r) {
    if (pre.row_of[r] >= 0) out.y[r] = core.y[pre.row_of[r]] / pre.row_scale[r];
  }
  return out;
}

}  // namespace

SdpSolution Solve(const SdpProblem& problem, const SolverOptions& opts) {
  problem.Validate();
  SdpSolution sol;
  const bool feas = problem.sense == Sense::kFeasibility;
  const int nb = problem.num_blocks();
  if (feas && nb == 0) {
    // Pure linear system: feasible iff consistent.
    const int m = problem.num_rows();
    Eigen::MatrixXd f = Eigen::MatrixXd::Zero(m, problem.num_free);
    Eigen::VectorXd b(m);
    for (int r = 0; r < m; ++r) {
      for (const auto& [k, v] : problem.constraints[r].free) f(r, k) += v;
      b[r] = problem.constraints[r].rhs;
    }
    sol.x_free = Eigen::VectorXd::Zero(problem.num_free);
    if (problem.num_free > 0 && m > 0) {
      sol.x_free = f.completeOrthogonalDecomposition().solve(b);
    }
    const double res = (f * sol.x_free - b).norm() / (1.0 + b.norm());
    sol.primal_residual = res;
    sol.y = Eigen::VectorXd::Zero(m);
    sol.margin = std::numeric_limits<double>::quiet_NaN();
    sol.status = res <= opts.tol ? Status::kFeasible : Status::kInfeasible;
    return sol;
  }
  const SdpProblem solved = feas ? MarginProblem(problem, opts.trace_cap) : problem;
  const int margin_col = feas ? problem.num_free : -1;
  CoreResult core = SolveCore(solved, opts, margin_col);

  sol.primal_objective = core.pobj;
  sol.dual_objective = core.dobj;
  sol.primal_residual = core.pinf;
  sol.dual_residual = core.dinf;
  sol.gap = core.gap;
  sol.iterations = core.iterations;
  sol.trace = std::move(core.trace);
  sol.message = core.message;
  sol.y = core.y;
  sol.z = core.z;
  if (!feas) {
    sol.x = core.x;
    sol.x_free = core.x_free;
    sol.margin = std::numeric_limits<double>::quiet_NaN();
    switch (core.outcome) {
      case Outcome::kConverged: sol.status = Status::kFeasible; break;
      case Outcome::kStructurallyInfeasible: sol.status = Status::kInfeasible; break;
      default: sol.status = Status::kNumericalFailure; break;
    }
    return sol;
  }
  const double lam = core.x_free[margin_col];
  sol.margin = lam;
  sol.x_free = core.x_free.head(problem.num_free);
  sol.x.resize(nb);
  for (int k = 0; k < nb; ++k) {
    sol.x[k] = core.x[k];
    sol.x[k].diagonal().array() += lam;
  }
  const double thr = opts.margin_threshold;
  switch (core.outcome) {
    case Outcome::kStructurallyInfeasible:
      sol.status = Status::kInfeasible;
      sol.margin = -std::numeric_limits<double>::infinity();
      break;
    case Outcome::kEarlyPositive: sol.status = Status::kFeasible; break;
    case Outcome::kEarlyNegative:
      sol.status = Status::kInfeasible;
      sol.margin = std::min(lam, -core.dobj);
      break;
    case Outcome::kConverged:
      sol.status = lam > thr ? Status::kFeasible
                   : lam < -thr ? Status::kInfeasible
                                : Status::kMarginal;
      break;
    case Outcome::kFailed: sol.status = Status::kNumericalFailure; break;
  }
  return sol;
}

ResidualReport CheckSolution(const SdpProblem& p, const SdpSolution& s,
                             const SolverOptions& opts) {
  ResidualReport rep;
  const int nb = p.num_blocks();
  for (int k = 0; k < nb; ++k) {
    if (k < static_cast<int>(s.x.size()) && s.x[k].size() > 0) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
          0.5 * (s.x[k] + s.x[k].transpose()), Eigen::EigenvaluesOnly);
      rep.min_eig.push_back(es.eigenvalues().minCoeff());
    } else {
      rep.min_eig.push_back(std::numeric_limits<double>::quiet_NaN());
    }
  }
  SdpProblem q = p;
  std::vector<Eigen::MatrixXd> x(nb);
  Eigen::VectorXd xf = Eigen::VectorXd::Zero(p.num_free);
  for (int k = 0; k < nb; ++k) {
    x[k] = k < static_cast<int>(s.x.size()) && s.x[k].size() > 0
               ? s.x[k]
               : Eigen::MatrixXd::Zero(p.block_dims[k], p.block_dims[k]);
  }
  if (s.x_free.size() == p.num_free) xf = s.x_free;
  if (p.sense == Sense::kFeasibility) {
    q = MarginProblem(p, opts.trace_cap);
    const double lam = std::isfinite(s.margin) ? s.margin : 0.0;
    for (int k = 0; k < nb; ++k) {
      const double slack = opts.trace_cap * p.block_dims[k] - x[k].trace();
      x[k].diagonal().array() -= lam;
      x.push_back(Eigen::MatrixXd::Constant(1, 1, slack));
    }
    Eigen::VectorXd xf2(p.num_free + 1);
    xf2 << xf, lam;
    xf = xf2;
  }
  const int qb = q.num_blocks();
  Eigen::VectorXd b(q.num_rows());
  double rp = 0.0;
  for (int r = 0; r < q.num_rows(); ++r) {
    const auto& c = q.constraints[r];
    double v = Apply(c.entries, x);
    for (const auto& [k, a] : c.free) v += a * xf[k];
    b[r] = c.rhs;
    rp += (v - c.rhs) * (v - c.rhs);
  }
  rep.primal = std::sqrt(rp) / (1.0 + b.norm());

  Eigen::VectorXd y = Eigen::VectorXd::Zero(q.num_rows());
  if (s.y.size() == q.num_rows()) y = s.y;
  double cnorm = 0.0, dres = 0.0, pobj = 0.0;
  for (int k = 0; k < qb; ++k) {
    Eigen::MatrixXd c = DenseBlock(q.objective, k, q.block_dims[k]);
    cnorm += c.norm();
    pobj += c.cwiseProduct(x[k]).sum();
    Eigen::MatrixXd r = c;
    if (k < static_cast<int>(s.z.size()) && s.z[k].rows() == q.block_dims[k]) r -= s.z[k];
    for (int row = 0; row < q.num_rows(); ++row) {
      if (y[row] == 0.0) continue;
      r -= y[row] * DenseBlock(q.constraints[row].entries, k, q.block_dims[k]);
    }
    dres += r.norm();
  }
  Eigen::VectorXd cf = Eigen::VectorXd::Zero(q.num_free);
  for (int k = 0; k < static_cast<int>(q.objective_free.size()); ++k) cf[k] = q.objective_free[k];
  pobj += cf.dot(xf);
  Eigen::VectorXd fty = cf;
  for (int row = 0; row < q.num_rows(); ++row) {
    for (const auto& [k, a] : q.constraints[row].free) fty[k] -= a * y[row];
  }
  dres += fty.norm();
  rep.dual = dres / (1.0 + cnorm + cf.norm());
  const double dobj = b.dot(y);
  rep.gap = std::fabs(pobj - dobj) / (1.0 + std::fabs(pobj) + std::fabs(dobj));
  return rep;
}

}  // namespace hlpv::sdpcore
