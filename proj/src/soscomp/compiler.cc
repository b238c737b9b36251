#include <map>

#include "hlpv/soscomp/sos_program.h"

namespace hlpv::soscomp {

using polyalg::GradedLexLess;
using polyalg::Monomial;
using sdpcore::BlockEntry;
using sdpcore::Constraint;

CompiledProgram SosProgram::Compile(sdpcore::Sense sense) const {
  CompiledProgram out;
  auto& prob = out.problem;
  prob.block_dims = block_dims_;
  prob.num_free = num_free_;
  prob.sense = sense;
  out.map.unknowns = unknowns_;
  out.map.block_dims = block_dims_;
  out.map.num_free = num_free_;
  out.map.constraints = constraints_;

  for (auto& cc : out.map.constraints) {
    const int n = cc.size;
    AffinePolyMatrix rest = cc.expression;
    if (cc.margin > 0.0) {
      rest -= AffinePolyMatrix::Identity(n, arity_, AffineExpr(cc.margin));
    }
    for (size_t k = 0; k < cc.inequalities.size(); ++k) {
      rest -= polyalg::Multiply(cc.inequalities[k], cc.sos_multipliers[k].value);
    }
    for (size_t k = 0; k < cc.equalities.size(); ++k) {
      rest -= polyalg::Multiply(cc.equalities[k], cc.eq_multipliers[k].value);
    }

    const int nb = static_cast<int>(cc.basis.size());
    std::map<Monomial, std::vector<std::pair<int, int>>, GradedLexLess> pairs;
    for (int u = 0; u < nb; ++u) {
      for (int v = 0; v < nb; ++v) pairs[cc.basis[u] * cc.basis[v]].emplace_back(u, v);
    }

    cc.first_row = prob.num_rows();
    for (int a = 0; a < n; ++a) {
      for (int b = a; b < n; ++b) {
        const auto& poly = rest(a, b);
        std::map<Monomial, bool, GradedLexLess> support;
        for (const auto& [m, list] : pairs) support.emplace(m, true);
        for (const auto& [m, c] : poly.terms()) support.emplace(m, true);
        for (const auto& [m, unused] : support) {
          Constraint row;
          if (const auto it = pairs.find(m); it != pairs.end()) {
            for (const auto& [u, v] : it->second) {
              int i = u * n + a, j = v * n + b;
              if (i > j) std::swap(i, j);
              row.entries.push_back({cc.block, i, j, i == j ? 1.0 : 0.5});
            }
          }
          const AffineExpr coeff = poly.coefficient(m);
          row.rhs = coeff.constant();
          for (const auto& [id, v] : coeff.terms()) {
            const auto& loc = unknowns_[id];
            if (loc.gram) {
              row.entries.push_back({loc.block, loc.i, loc.j, loc.i == loc.j ? -v : -0.5 * v});
            } else {
              row.free.emplace_back(loc.free_index, -v);
            }
          }
          prob.constraints.push_back(std::move(row));
        }
      }
    }
    cc.num_rows = prob.num_rows() - cc.first_row;
  }
  prob = sdpcore::Canonicalize(prob);
  return out;
}

}  // namespace hlpv::soscomp
