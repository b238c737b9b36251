#pragma once

#include <string>
#include <vector>

#include "hlpv/polyalg/monomial.h"
#include "hlpv/sdpcore/sdp_problem.h"
#include "hlpv/sdpcore/solver.h"
#include "hlpv/soscomp/affine_expr.h"

namespace hlpv::soscomp {

/// A polynomial matrix whose coefficients are decision unknowns.
///
/// Free decision matrices carry one unknown per (entry, monomial), shared
/// between (i,j) and (j,i) when symmetric. Gram-parametrized SOS matrices
/// carry no free unknowns: their value is (b⊗I)ᵀ Q (b⊗I) with Q a PSD block.
struct DecisionMatrix {
  int handle{-1};
  int rows{0};
  int cols{0};
  bool symmetric{false};
  std::vector<int> vars;
  int degree{0};
  /// Unknown ids owned by this matrix, in allocation order.
  std::vector<int> unknowns;
  AffinePolyMatrix value;
  /// PSD block holding Q for Gram-parametrized matrices, else −1.
  int gram_block{-1};
};

/// `expression − εI − Σ Γᵢ gᵢ − Σ Hⱼ hⱼ` is an SOS matrix in `vars`, with SOS
/// multipliers Γᵢ for the inequalities gᵢ ≥ 0 and free symmetric multipliers
/// Hⱼ for the equalities hⱼ = 0.
struct SosConstraint {
  std::string label;
  AffinePolyMatrix expression;
  std::vector<int> vars;
  std::vector<polyalg::Polynomial> inequalities;
  std::vector<polyalg::Polynomial> equalities;
  double margin{0.0};
  /// Degree of every SOS multiplier, raised to the next even number. A
  /// negative value picks the largest even degree with deg Γᵢ + deg gᵢ not
  /// exceeding the expression's padded degree.
  int multiplier_degree{-1};
};

/// Where one decision unknown lives in the compiled SDP.
struct UnknownLocation {
  bool gram{false};
  int free_index{-1};
  int block{-1};
  int i{0};
  int j{0};
};

struct CompiledConstraint {
  std::string label;
  int block{-1};
  int size{0};
  /// Even degree 2k of the Gram form; the basis has degree k.
  int degree{0};
  std::vector<polyalg::Monomial> basis;
  int first_row{0};
  int num_rows{0};
  double margin{0.0};
  AffinePolyMatrix expression;
  std::vector<polyalg::Polynomial> inequalities;
  std::vector<polyalg::Polynomial> equalities;
  std::vector<DecisionMatrix> sos_multipliers;
  std::vector<DecisionMatrix> eq_multipliers;
};

struct CompiledMap {
  std::vector<CompiledConstraint> constraints;
  std::vector<UnknownLocation> unknowns;
  std::vector<int> block_dims;
  int num_free{0};
};

struct CompiledProgram {
  sdpcore::SdpProblem problem;
  CompiledMap map;
};

class SosProgram {
 public:
  explicit SosProgram(int arity) : arity_(arity) {}

  int arity() const { return arity_; }
  int num_unknowns() const { return static_cast<int>(unknowns_.size()); }
  int num_free_unknowns() const { return num_free_; }
  int num_blocks() const { return static_cast<int>(block_dims_.size()); }
  const std::vector<CompiledConstraint>& constraints() const { return constraints_; }

  /// Square decision matrix of total degree `degree` in `vars`.
  DecisionMatrix DeclareDecision(int size, bool symmetric, std::vector<int> vars,
                                 int degree);
  /// Rectangular decision matrix.
  DecisionMatrix DeclareRectangular(int rows, int cols, std::vector<int> vars,
                                    int degree);
  /// Gram-parametrized SOS matrix of even degree `degree`.
  DecisionMatrix DeclareSosMatrix(int size, std::vector<int> vars, int degree);

  /// Registers the constraint, declaring its multipliers and Gram block.
  /// Throws std::invalid_argument when the expression is not square and
  /// symmetric or uses variables outside `vars`.
  int AddSosConstraint(const SosConstraint& c);

  /// Coefficient matching into a block SDP. Rows are ordered by constraint,
  /// then entry (a ≤ b), then monomial; blocks in allocation order.
  CompiledProgram Compile(sdpcore::Sense sense = sdpcore::Sense::kFeasibility) const;

 private:
  int NewFree();
  int NewBlock(int dim);

  int arity_;
  int next_handle_{0};
  int num_free_{0};
  std::vector<UnknownLocation> unknowns_;
  std::vector<int> block_dims_;
  std::vector<CompiledConstraint> constraints_;
};

/// Value of every unknown in a solution: free unknowns from x_free, Gram
/// unknowns from the solved blocks.
std::vector<double> UnknownValues(const CompiledMap& map,
                                  const sdpcore::SdpSolution& sol);

/// Numeric value of a decision matrix. Throws std::logic_error unless the
/// solution is feasible.
polyalg::PolyMatrix ExtractValues(const CompiledMap& map,
                                  const sdpcore::SdpSolution& sol,
                                  const DecisionMatrix& m);

/// (b⊗I)ᵀ Q (b⊗I) for a numeric Gram matrix.
polyalg::PolyMatrix GramForm(const std::vector<polyalg::Monomial>& basis, int size,
                             const Eigen::MatrixXd& q, int arity);

}  // namespace hlpv::soscomp
