#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "isac/errors.hpp"

namespace isac {

/// Entry of a sparse symmetric matrix; an off-diagonal value applies to both
/// (row, col) and (col, row).
struct SymTriplet {
  int row;
  int col;
  double value;
};

/// One linear-matrix-inequality block F0 + sum_i x_i F_i >= 0.
struct PsdBlockExpr {
  int dim = 0;
  Eigen::MatrixXd f0;
  std::vector<int> vars;                        // variables entering the block
  std::vector<std::vector<SymTriplet>> coeff;   // F_i triplets, parallel to vars

  void add_coeff(int var, std::vector<SymTriplet> triplets);
};

/// Linear objective, affine inequality rows and PSD cone constraints over a
/// real decision vector. Complex Hermitian variables are carried by their
/// 2N x 2N real symmetric embedding.
struct ConicProblem {
  int num_vars = 0;
  Eigen::VectorXd objective;  // maximize objective . x
  std::vector<PsdBlockExpr> psd_blocks;
  Eigen::MatrixXd lin_a;      // lin_a * x <= lin_rhs, row-wise
  Eigen::VectorXd lin_rhs;

  void add_linear_row(const Eigen::VectorXd& a, double rhs);

  /// Sparse-triplet text dump for external-solver debugging.
  std::string dump() const;
};

enum class SolveStatus { Optimal, Infeasible, MaxIterations, NumericalFailure };

const char* to_string(SolveStatus status);

struct ConicSolution {
  SolveStatus status = SolveStatus::NumericalFailure;
  Eigen::VectorXd x;
  double objective = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double duality_gap = 0.0;
  int iterations = 0;
};

/// Primal-dual interior-point solve (HKM direction, Mehrotra
/// predictor-corrector) of the LMI-form problem above. Deterministic; the
/// Infeasible status is certified by an approximate Farkas dual ray.
ConicSolution solve_conic(const ConicProblem& p, double tol = 1e-7, int max_iters = 100);

}  // namespace isac
