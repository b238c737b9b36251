#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace hlpv::sdpcore::internal {

struct Entry {
  int i{0};
  int j{0};
  double v{0.0};
};

struct RowPart {
  int row{0};
  std::vector<Entry> entries;
};

/// Solver-internal problem: row-scaled, presolved, with block data indexed
/// by block for fast Schur-complement assembly.
struct WorkProblem {
  std::vector<int> dims;
  int m{0};
  int p{0};
  /// Per block, the rows touching it (ascending row order).
  std::vector<std::vector<RowPart>> rows_of_block;
  /// Per row, free coefficients.
  std::vector<std::vector<std::pair<int, double>>> free_of_row;
  Eigen::VectorXd b;
  Eigen::VectorXd cf;
  std::vector<Eigen::MatrixXd> c;

  int total_dim() const;
  Eigen::VectorXd ApplyA(const std::vector<Eigen::MatrixXd>& x) const;
  std::vector<Eigen::MatrixXd> AdjointA(const Eigen::VectorXd& y) const;
  Eigen::VectorXd ApplyF(const Eigen::VectorXd& x) const;
  Eigen::VectorXd AdjointF(const Eigen::VectorXd& y) const;
};

/// ⟨A_i, W A_j W⟩ restricted to one block, accumulated into `m` for rows
/// given by local indices. Exposed for presolve (W = I) and the KKT system.
void AccumulateSchur(const Eigen::MatrixXd& w, const std::vector<RowPart>& parts,
                     const std::vector<int>& local, Eigen::MatrixXd* m);

/// The Newton system
///
///     [ M   F ] [dy]   [h ]
///     [ Fᵀ  0 ] [dx] = [rf],   M_ij = ⟨A_i, W A_j W⟩,
///
/// solved with M block-diagonal over row groups (rows linked through shared
/// blocks) and the free variables eliminated through G = Σ_g F_gᵀ M_g⁻¹ F_g.
class KktSystem {
 public:
  explicit KktSystem(const WorkProblem& wp);

  int num_groups() const { return static_cast<int>(groups_.size()); }
  const std::vector<int>& group_rows(int g) const { return groups_[g].rows; }

  /// Assembles and factors for scaling matrices `w` (one per block).
  /// Returns the largest relative diagonal perturbation that was needed.
  double Factor(const std::vector<Eigen::MatrixXd>& w);

  void Solve(const Eigen::VectorXd& h, const Eigen::VectorXd& rf,
             Eigen::VectorXd* dy, Eigen::VectorXd* dx) const;

 private:
  struct Group {
    std::vector<int> rows;
    std::vector<int> blocks;
    std::vector<int> cols;      // free columns touched
    Eigen::MatrixXd f;          // rows × cols
    Eigen::MatrixXd m;          // assembled Schur block
    Eigen::LLT<Eigen::MatrixXd> llt;
    Eigen::MatrixXd y;          // M⁻¹ F
  };

  void SolveOnce(const Eigen::VectorXd& h, const Eigen::VectorXd& rf,
                 Eigen::VectorXd* dy, Eigen::VectorXd* dx) const;

  const WorkProblem& wp_;
  std::vector<Group> groups_;
  std::vector<int> local_;  // row -> index within its group
  Eigen::MatrixXd g_;
  Eigen::LLT<Eigen::MatrixXd> g_llt_;
};

/// Cholesky with a growing diagonal shift on failure. Returns the shift
/// relative to the largest diagonal entry (0 when none was needed).
double FactorWithShift(Eigen::MatrixXd* a, Eigen::LLT<Eigen::MatrixXd>* llt);

}  // namespace hlpv::sdpcore::internal
