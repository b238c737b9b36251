#include "hlpv/sdpcore/sdp_problem.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <tuple>

namespace hlpv::sdpcore {

namespace {

void CheckEntries(const std::vector<BlockEntry>& entries,
                  const std::vector<int>& dims, const std::string& where) {
  for (const auto& e : entries) {
    if (e.block < 0 || e.block >= static_cast<int>(dims.size())) {
      throw std::invalid_argument(where + ": block index out of range");
    }
    if (e.i < 0 || e.j < e.i || e.j >= dims[e.block]) {
      throw std::invalid_argument(where + ": entry index out of range");
    }
    if (!std::isfinite(e.value)) {
      throw std::invalid_argument(where + ": non-finite coefficient");
    }
  }
}

std::vector<BlockEntry> CanonicalEntries(const std::vector<BlockEntry>& in) {
  std::map<std::tuple<int, int, int>, double> merged;
  for (const auto& e : in) merged[{e.block, e.i, e.j}] += e.value;
  std::vector<BlockEntry> out;
  for (const auto& [key, v] : merged) {
    if (v != 0.0) out.push_back({std::get<0>(key), std::get<1>(key),
                                 std::get<2>(key), v});
  }
  return out;
}

}  // namespace

void SdpProblem::Validate() const {
  for (int d : block_dims) {
    if (d < 1) throw std::invalid_argument("block dimension must be >= 1");
  }
  if (num_free < 0) throw std::invalid_argument("negative free count");
  if (!objective_free.empty() &&
      static_cast<int>(objective_free.size()) != num_free) {
    throw std::invalid_argument("objective_free size mismatch");
  }
  CheckEntries(objective, block_dims, "objective");
  for (size_t r = 0; r < constraints.size(); ++r) {
    const auto& c = constraints[r];
    const std::string where = "row " + std::to_string(r);
    CheckEntries(c.entries, block_dims, where);
    for (const auto& [k, v] : c.free) {
      if (k < 0 || k >= num_free) {
        throw std::invalid_argument(where + ": free index out of range");
      }
      if (!std::isfinite(v)) {
        throw std::invalid_argument(where + ": non-finite coefficient");
      }
    }
    if (!std::isfinite(c.rhs)) {
      throw std::invalid_argument(where + ": non-finite right-hand side");
    }
  }
}

SdpProblem Canonicalize(const SdpProblem& p) {
  SdpProblem out = p;
  out.objective = CanonicalEntries(p.objective);
  for (auto& c : out.constraints) {
    c.entries = CanonicalEntries(c.entries);
    std::map<int, double> merged;
    for (const auto& [k, v] : c.free) merged[k] += v;
    c.free.clear();
    for (const auto& [k, v] : merged) {
      if (v != 0.0) c.free.emplace_back(k, v);
    }
  }
  if (std::all_of(out.objective_free.begin(), out.objective_free.end(),
                  [](double v) { return v == 0.0; })) {
    out.objective_free.clear();
  }
  return out;
}

Eigen::MatrixXd DenseBlock(const std::vector<BlockEntry>& entries, int block,
                           int dim) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
  for (const auto& e : entries) {
    if (e.block != block) continue;
    m(e.i, e.j) += e.value;
    if (e.i != e.j) m(e.j, e.i) += e.value;
  }
  return m;
}

double Apply(const std::vector<BlockEntry>& entries,
             const std::vector<Eigen::MatrixXd>& x) {
  double sum = 0.0;
  for (const auto& e : entries) {
    const auto& b = x[e.block];
    sum += e.i == e.j ? e.value * b(e.i, e.i)
                      : e.value * (b(e.i, e.j) + b(e.j, e.i));
  }
  return sum;
}

}  // namespace hlpv::sdpcore
