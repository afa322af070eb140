#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "swiptsec/types.hpp"

namespace swiptsec::sdp {

enum class BlockKind {
  RealSym,            // dense real symmetric PSD block
  HermitianEmbedded,  // real 2n x 2n image of an n x n Hermitian PSD block
  Diagonal,           // nonnegative orthant, stored as a diagonal matrix
};

std::string to_string(BlockKind k);

struct BlockSpec {
  int dim = 0;
  BlockKind kind = BlockKind::RealSym;
};

struct Term {
  int block = 0;
  RMatrix coeff;
};

/// sum_j <coeff_j, X_j> = rhs
struct Constraint {
  std::vector<Term> terms;
  double rhs = 0.0;
  std::string label;
};

/// Standard-form block SDP
///
///   min  sum_j <C_j, X_j>
///   s.t. sum_j <A_ij, X_j> = b_i,  X_j in K_j
///
/// Data are validated on insertion: symmetric, dimension-consistent, zero
/// off-diagonals on Diagonal blocks, and for HermitianEmbedded blocks of the
/// form [[P, -Q], [Q, P]].
class SdpProblem {
 public:
  int add_block(int dim, BlockKind kind);
  void set_objective(int block, RMatrix c);
  int add_constraint(std::vector<Term> terms, double rhs, std::string label = {});

  int num_blocks() const { return static_cast<int>(blocks_.size()); }
  int num_constraints() const { return static_cast<int>(constraints_.size()); }
  const BlockSpec& block(int j) const { return blocks_.at(static_cast<std::size_t>(j)); }
  const std::vector<BlockSpec>& blocks() const { return blocks_; }
  const RMatrix& objective(int j) const { return objective_.at(static_cast<std::size_t>(j)); }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  RVector rhs() const;

  /// Sum of block orders (barrier parameter of the cone).
  int barrier_degree() const;

  /// Throws std::invalid_argument when `m` is not valid data for `block`.
  void check_data(int block, const RMatrix& m) const;

 private:
  std::vector<BlockSpec> blocks_;
  std::vector<RMatrix> objective_;
  std::vector<Constraint> constraints_;
};

enum class SdpStatus { Optimal, PrimalInfeasible, DualInfeasible, IllPosed, IterLimit, NumericalFailure };

std::string to_string(SdpStatus s);

struct Residuals {
  double primal = 0.0;  // ||A(X) - b|| / (1 + ||b||)
  double dual = 0.0;    // ||C - A^T y - S|| / (1 + ||C||)
  double gap = 0.0;     // |<C,X> - b^T y| / (1 + |<C,X>|)
};

struct IterationLog {
  int iter = 0;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  Residuals residuals;
  double mu = 0.0;
  double tau = 0.0;
  double kappa = 0.0;
  double step = 0.0;
  double sigma = 0.0;
};

/// On Optimal, (X, y, S) is the primal/dual pair. On PrimalInfeasible, y and
/// S form a Farkas ray normalized to b^T y = 1 (A^T y + S ~ 0, S PSD). On
/// DualInfeasible, X is an improving ray normalized to <C, X> = -1.
struct SdpSolution {
  std::vector<RMatrix> X;
  std::vector<RMatrix> S;
  RVector y;
  SdpStatus status = SdpStatus::NumericalFailure;
  int iterations = 0;
  Residuals residuals;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  std::string message;
  std::vector<IterationLog> history;
};

struct SolverOptions {
  double tol = 1e-8;
  int max_iter = 200;
  double step_fraction = 0.98;
  double regularization = 1e-12;
  bool record_history = false;
};

/// Primal-dual path-following interior-point method on the homogeneous
/// self-dual embedding, Nesterov-Todd scaling, Mehrotra predictor-corrector.
SdpSolution solve(const SdpProblem& problem, const SolverOptions& options = {});

// Inner products and operators over block vectors; exposed for tests and
// for callers building certificates.
double inner(const RMatrix& a, const RMatrix& b);
RVector apply_constraints(const SdpProblem& p, const std::vector<RMatrix>& X);
std::vector<RMatrix> apply_adjoint(const SdpProblem& p, const RVector& y);
double objective_value(const SdpProblem& p, const std::vector<RMatrix>& X);

// -- Hermitian <-> real symmetric embedding --------------------------------

/// T(M) = [[Re M, -Im M], [Im M, Re M]]. <T(A), T(X)> = 2 Re tr(A X), so a
/// complex term Re tr(A X) is encoded with coefficient T(A) / 2.
RMatrix embed_hermitian(const CMatrix& m, double hermitian_tol = 1e-12);

/// Inverse of embed_hermitian after averaging the two copies. Throws
/// NumericalFailure when X is further than `structure_tol` (relative) from
/// the embedded form.
CMatrix extract_complex(const RMatrix& x, double structure_tol = 1e-6);

// -- text dump ------------------------------------------------------------

void write_problem(std::ostream& os, const SdpProblem& p,
                   const std::vector<std::string>& row_notes = {});
SdpProblem read_problem(std::istream& is);
void write_solution(std::ostream& os, const SdpProblem& p, const SdpSolution& s);

}  // namespace swiptsec::sdp
