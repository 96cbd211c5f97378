#pragma once

#include <Eigen/Dense>

#include "febe/spaces.hpp"

namespace febe {

/// Full coupled system in the DOF order (FE outer, FE interface,
/// BE interface, BE outer).
struct BlockSystem {
  Eigen::MatrixXd A;
  Eigen::VectorXd rhs;
  int n_fe_outer = 0, n_fe_interface = 0, n_be_interface = 0, n_be_outer = 0;

  int size() const { return n_fe_outer + n_fe_interface + n_be_interface + n_be_outer; }
};

struct Solution {
  Eigen::VectorXd full;
  Eigen::VectorXd fe, be;
  bool spd = true;  // whether the SPD factorization succeeded
};

BlockSystem assemble_global(const FeSpace& fe, const BeTraceSpace& be,
                            const Eigen::MatrixXd& Afe, const Eigen::MatrixXd& Shat,
                            const Eigen::MatrixXd& B, const Eigen::MatrixXd& C,
                            const Eigen::VectorXd& load_fe, const Eigen::VectorXd& load_be);

/// Boundary Neumann load <g, v> over the Neumann-tagged panels.
Eigen::VectorXd assemble_be_neumann_load(const BeTraceSpace& be, const ScalarField& g);

/// Cholesky first; falls back to a pivoted symmetric-indefinite
/// factorization when the matrix is not positive definite.
Solution solve(const BlockSystem& sys);

/// Max-norm relative residual of the solved system.
double galerkin_residual(const BlockSystem& sys, const Solution& sol);

}  // namespace febe
