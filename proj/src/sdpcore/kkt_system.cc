#include "kkt_system.h"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hlpv::sdpcore::internal {

int WorkProblem::total_dim() const {
  return std::accumulate(dims.begin(), dims.end(), 0);
}

Eigen::VectorXd WorkProblem::ApplyA(const std::vector<Eigen::MatrixXd>& x) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(m);
  for (size_t k = 0; k < dims.size(); ++k) {
    const auto& xb = x[k];
    for (const auto& part : rows_of_block[k]) {
      double s = 0.0;
      for (const auto& e : part.entries) {
        s += e.i == e.j ? e.v * xb(e.i, e.i) : e.v * (xb(e.i, e.j) + xb(e.j, e.i));
      }
      out[part.row] += s;
    }
  }
  return out;
}

std::vector<Eigen::MatrixXd> WorkProblem::AdjointA(const Eigen::VectorXd& y) const {
  std::vector<Eigen::MatrixXd> out(dims.size());
  for (size_t k = 0; k < dims.size(); ++k) {
    out[k] = Eigen::MatrixXd::Zero(dims[k], dims[k]);
    for (const auto& part : rows_of_block[k]) {
      const double yr = y[part.row];
      if (yr == 0.0) continue;
      for (const auto& e : part.entries) {
        out[k](e.i, e.j) += yr * e.v;
        if (e.i != e.j) out[k](e.j, e.i) += yr * e.v;
      }
    }
  }
  return out;
}

Eigen::VectorXd WorkProblem::ApplyF(const Eigen::VectorXd& x) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(m);
  for (int r = 0; r < m; ++r) {
    for (const auto& [k, v] : free_of_row[r]) out[r] += v * x[k];
  }
  return out;
}

Eigen::VectorXd WorkProblem::AdjointF(const Eigen::VectorXd& y) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(p);
  for (int r = 0; r < m; ++r) {
    for (const auto& [k, v] : free_of_row[r]) out[k] += v * y[r];
  }
  return out;
}

namespace {

double InnerWithPattern(const std::vector<Entry>& entries, const Eigen::MatrixXd& t) {
  double s = 0.0;
  for (const auto& e : entries) {
    s += e.i == e.j ? e.v * t(e.i, e.i) : e.v * (t(e.i, e.j) + t(e.j, e.i));
  }
  return s;
}

void CongruenceOfSparse(const Eigen::MatrixXd& w, const std::vector<Entry>& entries,
                        Eigen::MatrixXd* t) {
  const int n = static_cast<int>(w.rows());
  if (static_cast<int>(entries.size()) > n / 2) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (const auto& e : entries) {
      a(e.i, e.j) += e.v;
      if (e.i != e.j) a(e.j, e.i) += e.v;
    }
    Eigen::MatrixXd wa = w * a;
    t->noalias() = wa * w;
    return;
  }
  t->setZero(n, n);
  for (const auto& e : entries) {
    if (e.i == e.j) {
      t->noalias() += e.v * w.col(e.i) * w.col(e.i).transpose();
    } else {
      t->noalias() += e.v * w.col(e.i) * w.col(e.j).transpose();
      t->noalias() += e.v * w.col(e.j) * w.col(e.i).transpose();
    }
  }
}

}  // namespace

void AccumulateSchur(const Eigen::MatrixXd& w, const std::vector<RowPart>& parts,
                     const std::vector<int>& local, Eigen::MatrixXd* m) {
  Eigen::MatrixXd t;
  for (size_t b = 0; b < parts.size(); ++b) {
    CongruenceOfSparse(w, parts[b].entries, &t);
    const int lb = local[parts[b].row];
    for (size_t a = b; a < parts.size(); ++a) {
      const double v = InnerWithPattern(parts[a].entries, t);
      const int la = local[parts[a].row];
      (*m)(la, lb) += v;
      if (la != lb) (*m)(lb, la) += v;
    }
  }
}

double FactorWithShift(Eigen::MatrixXd* a, Eigen::LLT<Eigen::MatrixXd>* llt) {
  if (a->rows() == 0) return 0.0;
  llt->compute(*a);
  if (llt->info() == Eigen::Success) return 0.0;
  const double scale = std::max(a->diagonal().cwiseAbs().maxCoeff(), 1e-300);
  for (double rel = 1e-14; rel < 1.0; rel *= 100.0) {
    Eigen::MatrixXd shifted = *a;
    shifted.diagonal().array() += rel * scale;
    llt->compute(shifted);
    if (llt->info() == Eigen::Success) {
      *a = std::move(shifted);
      return rel;
    }
  }
  a->diagonal().array() += scale;
  llt->compute(*a);
  return 1.0;
}

KktSystem::KktSystem(const WorkProblem& wp) : wp_(wp), local_(wp.m, -1) {
  // Union-find over blocks; rows link every block they touch.
  const int nb = static_cast<int>(wp.dims.size());
  std::vector<int> parent(nb);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<int> first_block(wp.m, -1);
  for (int k = 0; k < nb; ++k) {
    for (const auto& part : wp.rows_of_block[k]) {
      int& fb = first_block[part.row];
      if (fb < 0) {
        fb = k;
      } else {
        parent[find(k)] = find(fb);
      }
    }
  }
  std::vector<int> group_of_root(nb, -1);
  for (int k = 0; k < nb; ++k) {
    const int r = find(k);
    if (wp.rows_of_block[k].empty()) continue;
    if (group_of_root[r] < 0) {
      group_of_root[r] = static_cast<int>(groups_.size());
      groups_.emplace_back();
    }
    groups_[group_of_root[r]].blocks.push_back(k);
  }
  for (int row = 0; row < wp.m; ++row) {
    if (first_block[row] < 0) continue;  // presolve guarantees none
    Group& g = groups_[group_of_root[find(first_block[row])]];
    local_[row] = static_cast<int>(g.rows.size());
    g.rows.push_back(row);
  }
  for (auto& g : groups_) {
    for (int row : g.rows) {
      for (const auto& [k, v] : wp.free_of_row[row]) g.cols.push_back(k);
    }
    std::sort(g.cols.begin(), g.cols.end());
    g.cols.erase(std::unique(g.cols.begin(), g.cols.end()), g.cols.end());
    g.f = Eigen::MatrixXd::Zero(g.rows.size(), g.cols.size());
    for (size_t r = 0; r < g.rows.size(); ++r) {
      for (const auto& [k, v] : wp.free_of_row[g.rows[r]]) {
        const auto it = std::lower_bound(g.cols.begin(), g.cols.end(), k);
        g.f(r, it - g.cols.begin()) += v;
      }
    }
  }
}

double KktSystem::Factor(const std::vector<Eigen::MatrixXd>& w) {
  double worst = 0.0;
  if (wp_.p > 0) g_ = Eigen::MatrixXd::Zero(wp_.p, wp_.p);
  for (auto& g : groups_) {
    const int mg = static_cast<int>(g.rows.size());
    g.m = Eigen::MatrixXd::Zero(mg, mg);
    for (int k : g.blocks) AccumulateSchur(w[k], wp_.rows_of_block[k], local_, &g.m);
    Eigen::MatrixXd work = g.m;
    worst = std::max(worst, FactorWithShift(&work, &g.llt));
    if (g.cols.empty()) continue;
    g.y = g.llt.solve(g.f);
    const Eigen::MatrixXd contrib = g.f.transpose() * g.y;
    for (size_t a = 0; a < g.cols.size(); ++a) {
      for (size_t b = 0; b < g.cols.size(); ++b) {
        g_(g.cols[a], g.cols[b]) += contrib(a, b);
      }
    }
  }
  if (wp_.p > 0) {
    Eigen::MatrixXd work = 0.5 * (g_ + g_.transpose());
    g_ = work;
    worst = std::max(worst, FactorWithShift(&work, &g_llt_));
  }
  return worst;
}

void KktSystem::SolveOnce(const Eigen::VectorXd& h, const Eigen::VectorXd& rf,
                          Eigen::VectorXd* dy, Eigen::VectorXd* dx) const {
  dy->setZero(wp_.m);
  dx->setZero(wp_.p);
  std::vector<Eigen::VectorXd> u(groups_.size());
  Eigen::VectorXd rx = -rf;
  for (size_t gi = 0; gi < groups_.size(); ++gi) {
    const Group& g = groups_[gi];
    Eigen::VectorXd hg(g.rows.size());
    for (size_t r = 0; r < g.rows.size(); ++r) hg[r] = h[g.rows[r]];
    u[gi] = g.llt.solve(hg);
    if (g.cols.empty()) continue;
    const Eigen::VectorXd fu = g.f.transpose() * u[gi];
    for (size_t a = 0; a < g.cols.size(); ++a) rx[g.cols[a]] += fu[a];
  }
  if (wp_.p > 0) *dx = g_llt_.solve(rx);
  for (size_t gi = 0; gi < groups_.size(); ++gi) {
    const Group& g = groups_[gi];
    Eigen::VectorXd v = u[gi];
    if (!g.cols.empty()) {
      Eigen::VectorXd dxg(g.cols.size());
      for (size_t a = 0; a < g.cols.size(); ++a) dxg[a] = (*dx)[g.cols[a]];
      v -= g.y * dxg;
    }
    for (size_t r = 0; r < g.rows.size(); ++r) (*dy)[g.rows[r]] = v[r];
  }
}

void KktSystem::Solve(const Eigen::VectorXd& h, const Eigen::VectorXd& rf,
                      Eigen::VectorXd* dy, Eigen::VectorXd* dx) const {
  SolveOnce(h, rf, dy, dx);
  // Iterative refinement against the unshifted system.
  for (int pass = 0; pass < 2; ++pass) {
    Eigen::VectorXd r1 = h - wp_.ApplyF(*dx);
    for (const auto& g : groups_) {
      Eigen::VectorXd dyg(g.rows.size());
      for (size_t r = 0; r < g.rows.size(); ++r) dyg[r] = (*dy)[g.rows[r]];
      const Eigen::VectorXd mdy = g.m * dyg;
      for (size_t r = 0; r < g.rows.size(); ++r) r1[g.rows[r]] -= mdy[r];
    }
    const Eigen::VectorXd r2 = rf - wp_.AdjointF(*dy);
    const double scale = 1.0 + h.lpNorm<Eigen::Infinity>() +
                         (rf.size() ? rf.lpNorm<Eigen::Infinity>() : 0.0);
    const double res = std::max(r1.lpNorm<Eigen::Infinity>(),
                                r2.size() ? r2.lpNorm<Eigen::Infinity>() : 0.0);
    if (res <= 1e-14 * scale) break;
    Eigen::VectorXd cy, cx;
    SolveOnce(r1, r2, &cy, &cx);
    *dy += cy;
    *dx += cx;
  }
}

}  // namespace hlpv::sdpcore::internal
