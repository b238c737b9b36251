#pragma once

#include <random>

#include "hlpv/sdpcore/sdp_problem.h"

namespace hlpv::sdpcore::examples {

// X11 = 1, X22 = 1, X12 = 0: only X = I, so the margin is exactly 1.
inline SdpProblem IdentityFeasibility() {
  SdpProblem p;
  p.block_dims = {2};
  p.sense = Sense::kFeasibility;
  p.constraints = {{{{0, 0, 0, 1.0}}, {}, 1.0},
                   {{{0, 1, 1, 1.0}}, {}, 1.0},
                   {{{0, 0, 1, 1.0}}, {}, 0.0}};
  return p;
}

// x11 = −1 on a 1×1 block.
inline SdpProblem NegativeScalar() {
  SdpProblem p;
  p.block_dims = {1};
  p.sense = Sense::kFeasibility;
  p.constraints = {{{{0, 0, 0, 1.0}}, {}, -1.0}};
  return p;
}

// min x11 s.t. [[x11, 1], [1, 1]] ⪰ 0; optimum 1 by the Schur complement.
inline SdpProblem SchurMin() {
  SdpProblem p;
  p.block_dims = {2};
  p.constraints = {{{{0, 0, 1, 0.5}}, {}, 1.0}, {{{0, 1, 1, 1.0}}, {}, 1.0}};
  p.objective = {{0, 0, 0, 1.0}};
  return p;
}

inline SdpProblem RandomSparse(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> nblk(1, 3), dim(1, 4), nrow(1, 6), nfree(0, 3), coin(0, 3);
  std::normal_distribution<double> nd;
  SdpProblem p;
  for (int k = nblk(rng); k > 0; --k) p.block_dims.push_back(dim(rng));
  p.num_free = nfree(rng);
  p.sense = coin(rng) == 0 ? Sense::kFeasibility : Sense::kMinimize;
  auto entries = [&] {
    std::vector<BlockEntry> out;
    for (int b = 0; b < p.num_blocks(); ++b) {
      for (int i = 0; i < p.block_dims[b]; ++i) {
        for (int j = i; j < p.block_dims[b]; ++j) {
          if (coin(rng) == 0) out.push_back({b, i, j, nd(rng)});
        }
      }
    }
    return out;
  };
  for (int r = nrow(rng); r > 0; --r) {
    Constraint c;
    c.entries = entries();
    for (int k = 0; k < p.num_free; ++k) {
      if (coin(rng) < 2) c.free.emplace_back(k, nd(rng));
    }
    c.rhs = coin(rng) == 0 ? 0.0 : nd(rng);
    p.constraints.push_back(c);
  }
  p.objective = entries();
  if (p.num_free > 0 && coin(rng) < 2) {
    for (int k = 0; k < p.num_free; ++k) p.objective_free.push_back(coin(rng) ? nd(rng) : 0.0);
  }
  return Canonicalize(p);
}

}  // namespace hlpv::sdpcore::examples
