#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace hlpv::sdpcore {

/// One upper-triangle entry of a symmetric block coefficient matrix.
/// `value` is stored at both (i,j) and (j,i), so for i < j the entry
/// contributes 2·value·X_ij to ⟨A, X⟩.
struct BlockEntry {
  int block{0};
  int i{0};
  int j{0};
  double value{0.0};

  friend bool operator==(const BlockEntry&, const BlockEntry&) = default;
};

/// ⟨A, X⟩ + fᵀx = rhs, with A given by `entries` and f by `free`.
struct Constraint {
  std::vector<BlockEntry> entries;
  std::vector<std::pair<int, double>> free;
  double rhs{0.0};

  friend bool operator==(const Constraint&, const Constraint&) = default;
};

enum class Sense {
  kMinimize,     ///< min ⟨C,X⟩ + c_fᵀx
  kFeasibility,  ///< solved as margin maximisation, see Solve()
};

/// Standard-form block SDP
///
///     min ⟨C, X⟩ + c_fᵀ x   s.t.  ⟨A_i, X⟩ + f_iᵀ x = b_i,  X ⪰ 0,
///
/// with X block diagonal and x free.
struct SdpProblem {
  std::vector<int> block_dims;
  int num_free{0};
  std::vector<Constraint> constraints;
  std::vector<BlockEntry> objective;
  /// Empty or of size num_free.
  std::vector<double> objective_free;
  Sense sense{Sense::kMinimize};

  int num_rows() const { return static_cast<int>(constraints.size()); }
  int num_blocks() const { return static_cast<int>(block_dims.size()); }

  /// Throws std::invalid_argument on out-of-range indices, i > j entries,
  /// non-positive block sizes or non-finite data.
  void Validate() const;

  friend bool operator==(const SdpProblem&, const SdpProblem&) = default;
};

/// Sorts entries by (block, i, j), merges duplicates and drops zeros; sorts
/// free coefficients the same way. Used for canonical output.
SdpProblem Canonicalize(const SdpProblem& p);

/// Dense symmetric matrix of the entries of one block.
Eigen::MatrixXd DenseBlock(const std::vector<BlockEntry>& entries, int block,
                           int dim);

/// ⟨A, X⟩ for the block entries of a row.
double Apply(const std::vector<BlockEntry>& entries,
             const std::vector<Eigen::MatrixXd>& x);

}  // namespace hlpv::sdpcore
