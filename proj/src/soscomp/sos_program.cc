#include "hlpv/soscomp/sos_program.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hlpv::soscomp {

using polyalg::Monomial;
using polyalg::MonomialBasis;
using polyalg::Polynomial;

namespace {

int EvenPad(int d) { return d + (d % 2); }

void CheckVars(const std::vector<int>& vars, int arity) {
  for (size_t k = 0; k < vars.size(); ++k) {
    if (vars[k] < 0 || vars[k] >= arity) {
      throw std::invalid_argument("variable index out of range");
    }
    for (size_t l = 0; l < k; ++l) {
      if (vars[l] == vars[k]) throw std::invalid_argument("duplicate variable");
    }
  }
}

template <typename Coeff>
void CheckSupport(const polyalg::BasicPolynomial<Coeff>& p, const std::vector<int>& vars,
                  const char* what) {
  for (const auto& [m, c] : p.terms()) {
    for (int v = 0; v < m.arity(); ++v) {
      if (m[v] != 0 && std::find(vars.begin(), vars.end(), v) == vars.end()) {
        throw std::invalid_argument(std::string(what) +
                                    " depends on a variable outside the constraint");
      }
    }
  }
}

double AffineNorm(const AffineExpr& e) {
  double s = std::fabs(e.constant());
  for (const auto& t : e.terms()) s = std::max(s, std::fabs(t.second));
  return s;
}

}  // namespace

int SosProgram::NewFree() {
  UnknownLocation loc;
  loc.free_index = num_free_++;
  unknowns_.push_back(loc);
  return static_cast<int>(unknowns_.size()) - 1;
}

int SosProgram::NewBlock(int dim) {
  block_dims_.push_back(dim);
  return static_cast<int>(block_dims_.size()) - 1;
}

DecisionMatrix SosProgram::DeclareDecision(int size, bool symmetric, std::vector<int> vars,
                                           int degree) {
  if (!symmetric) return DeclareRectangular(size, size, std::move(vars), degree);
  if (degree < 0) throw std::invalid_argument("degree must be >= 0");
  if (size < 1) throw std::invalid_argument("size must be >= 1");
  CheckVars(vars, arity_);
  DecisionMatrix d;
  d.handle = next_handle_++;
  d.rows = d.cols = size;
  d.symmetric = true;
  d.vars = vars;
  d.degree = degree;
  d.value = AffinePolyMatrix(size, size, arity_);
  const auto basis = MonomialBasis(arity_, vars, degree);
  for (int i = 0; i < size; ++i) {
    for (int j = i; j < size; ++j) {
      for (const auto& m : basis) {
        const int id = NewFree();
        d.unknowns.push_back(id);
        d.value(i, j).AddTerm(m, AffineExpr::Unknown(id));
      }
      if (i != j) d.value(j, i) = d.value(i, j);
    }
  }
  d.value.set_symmetric(true);
  return d;
}

DecisionMatrix SosProgram::DeclareRectangular(int rows, int cols, std::vector<int> vars,
                                              int degree) {
  if (degree < 0) throw std::invalid_argument("degree must be >= 0");
  if (rows < 1 || cols < 1) throw std::invalid_argument("size must be >= 1");
  CheckVars(vars, arity_);
  DecisionMatrix d;
  d.handle = next_handle_++;
  d.rows = rows;
  d.cols = cols;
  d.vars = vars;
  d.degree = degree;
  d.value = AffinePolyMatrix(rows, cols, arity_);
  const auto basis = MonomialBasis(arity_, vars, degree);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      for (const auto& m : basis) {
        const int id = NewFree();
        d.unknowns.push_back(id);
        d.value(i, j).AddTerm(m, AffineExpr::Unknown(id));
      }
    }
  }
  return d;
}

DecisionMatrix SosProgram::DeclareSosMatrix(int size, std::vector<int> vars, int degree) {
  if (degree < 0 || degree % 2 != 0) {
    throw std::invalid_argument("SOS matrix degree must be even and >= 0");
  }
  if (size < 1) throw std::invalid_argument("size must be >= 1");
  CheckVars(vars, arity_);
  const auto basis = MonomialBasis(arity_, vars, degree / 2);
  const int nb = static_cast<int>(basis.size());
  const int dim = size * nb;
  DecisionMatrix d;
  d.handle = next_handle_++;
  d.rows = d.cols = size;
  d.symmetric = true;
  d.vars = vars;
  d.degree = degree;
  d.gram_block = NewBlock(dim);
  std::vector<int> id_of(static_cast<size_t>(dim) * dim, -1);
  for (int i = 0; i < dim; ++i) {
    for (int j = i; j < dim; ++j) {
      UnknownLocation loc;
      loc.gram = true;
      loc.block = d.gram_block;
      loc.i = i;
      loc.j = j;
      unknowns_.push_back(loc);
      const int id = static_cast<int>(unknowns_.size()) - 1;
      d.unknowns.push_back(id);
      id_of[static_cast<size_t>(i) * dim + j] = id;
      id_of[static_cast<size_t>(j) * dim + i] = id;
    }
  }
  d.value = AffinePolyMatrix(size, size, arity_);
  for (int a = 0; a < size; ++a) {
    for (int b = a; b < size; ++b) {
      auto& entry = d.value(a, b);
      for (int u = 0; u < nb; ++u) {
        for (int v = 0; v < nb; ++v) {
          const int id = id_of[static_cast<size_t>(u * size + a) * dim + v * size + b];
          entry.AddTerm(basis[u] * basis[v], AffineExpr::Unknown(id));
        }
      }
      if (a != b) d.value(b, a) = entry;
    }
  }
  d.value.set_symmetric(true);
  return d;
}

int SosProgram::AddSosConstraint(const SosConstraint& c) {
  const auto& e = c.expression;
  if (e.rows() != e.cols()) throw std::invalid_argument("SOS expression must be square");
  if (e.arity() != arity_) throw std::invalid_argument("SOS expression arity mismatch");
  if (c.margin < 0.0) throw std::invalid_argument("margin must be >= 0");
  CheckVars(c.vars, arity_);
  const int n = e.rows();
  int deg = 0;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      CheckSupport(e(a, b), c.vars, "SOS expression");
      deg = std::max(deg, e(a, b).degree());
      if (b <= a) continue;
      // Products like J·R·Jᵀ are symmetric only up to rounding.
      const auto diff = e(a, b) - e(b, a);
      double scale = 0.0, worst = 0.0;
      for (const auto& [m, v] : e(a, b).terms()) scale = std::max(scale, AffineNorm(v));
      for (const auto& [m, v] : diff.terms()) worst = std::max(worst, AffineNorm(v));
      if (worst > 1e-9 * (1.0 + scale)) {
        throw std::invalid_argument("SOS expression is not symmetric");
      }
    }
  }
  for (const auto& g : c.inequalities) CheckSupport(g, c.vars, "inequality");
  for (const auto& h : c.equalities) CheckSupport(h, c.vars, "equality");

  const int base = EvenPad(deg);
  std::vector<int> mdeg;
  int total = base;
  for (const auto& g : c.inequalities) {
    int md = c.multiplier_degree >= 0 ? EvenPad(c.multiplier_degree)
                                      : std::max(0, base - g.degree());
    md -= md % 2;
    mdeg.push_back(md);
    total = std::max(total, md + g.degree());
  }
  for (const auto& h : c.equalities) total = std::max(total, h.degree());
  total = EvenPad(total);

  CompiledConstraint cc;
  cc.label = c.label;
  cc.size = n;
  cc.degree = total;
  cc.margin = c.margin;
  cc.expression = e;
  cc.inequalities = c.inequalities;
  cc.equalities = c.equalities;
  for (size_t k = 0; k < c.inequalities.size(); ++k) {
    cc.sos_multipliers.push_back(DeclareSosMatrix(n, c.vars, mdeg[k]));
  }
  for (const auto& h : c.equalities) {
    cc.eq_multipliers.push_back(DeclareDecision(n, true, c.vars, total - h.degree()));
  }
  cc.basis = MonomialBasis(arity_, c.vars, total / 2);
  cc.block = NewBlock(n * static_cast<int>(cc.basis.size()));
  constraints_.push_back(std::move(cc));
  return static_cast<int>(constraints_.size()) - 1;
}

std::vector<double> UnknownValues(const CompiledMap& map, const sdpcore::SdpSolution& sol) {
  std::vector<double> values(map.unknowns.size(), 0.0);
  for (size_t k = 0; k < map.unknowns.size(); ++k) {
    const auto& loc = map.unknowns[k];
    if (loc.gram) {
      if (loc.block < static_cast<int>(sol.x.size())) values[k] = sol.x[loc.block](loc.i, loc.j);
    } else if (loc.free_index < sol.x_free.size()) {
      values[k] = sol.x_free[loc.free_index];
    }
  }
  return values;
}

polyalg::PolyMatrix ExtractValues(const CompiledMap& map, const sdpcore::SdpSolution& sol,
                                  const DecisionMatrix& m) {
  if (sol.status != sdpcore::Status::kFeasible) {
    throw std::logic_error("values requested from a solution that is not feasible");
  }
  const auto values = UnknownValues(map, sol);
  return EvaluateUnknowns(m.value, values);
}

polyalg::PolyMatrix GramForm(const std::vector<Monomial>& basis, int size,
                             const Eigen::MatrixXd& q, int arity) {
  polyalg::PolyMatrix out(size, size, arity);
  const int nb = static_cast<int>(basis.size());
  for (int a = 0; a < size; ++a) {
    for (int b = 0; b < size; ++b) {
      for (int u = 0; u < nb; ++u) {
        for (int v = 0; v < nb; ++v) {
          out(a, b).AddTerm(basis[u] * basis[v], q(u * size + a, v * size + b));
        }
      }
    }
  }
  out.set_symmetric(true);
  return out;
}

}  // namespace hlpv::soscomp
