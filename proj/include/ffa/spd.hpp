#pragma once

#include <Eigen/Dense>

#include "ffa/errors.hpp"

namespace ffa {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Symmetry check with relative tolerance (1e-12 by default).
bool is_symmetric(const MatrixXd& a, double rtol = 1e-12);

/// Symmetric PSD square root via eigendecomposition. Eigenvalues in
/// [-1e-10, 0) (relative to the largest) are clamped to zero; anything
/// more negative is rejected.
MatrixXd spd_sqrt(const MatrixXd& a);

/// Solve A x = b for strictly positive definite A. Throws
/// IllConditionedError (carrying the condition estimate) above 1e12.
VectorXd spd_solve(const MatrixXd& a, const VectorXd& b);

/// Factor L with L L^T = A for PSD A (degenerate directions get zero
/// columns). Used for sampling; never fails on merely singular input.
MatrixXd psd_factor(const MatrixXd& a);

/// Condition number estimate from the symmetric eigenvalues.
double spd_condition(const MatrixXd& a);

}  // namespace ffa
