#pragma once

/// @file eigensolver.hpp
/// Largest eigenpairs of real symmetric operators.

#include <Eigen/Dense>
#include <functional>

namespace spatspec {

struct EigenPairs {
  Eigen::VectorXd values;   ///< non-increasing
  Eigen::MatrixXd vectors;  ///< unit columns
};

/// Dense symmetric matrix (only the lower triangle is read). Returns the
/// `count` largest eigenpairs, or all eigenpairs with value > `min_value`
/// when count <= 0.
EigenPairs dense_top_eigenpairs(const Eigen::MatrixXd& a, int count, double min_value = 0.0);

/// y = A x for a symmetric operator of dimension n.
using MatVec = std::function<void(const Eigen::VectorXd& x, Eigen::VectorXd& y)>;

struct LanczosOptions {
  int basis = 0;              ///< Krylov basis size; 0 picks 2*nev + 20
  double tol = 1e-10;         ///< residual tolerance relative to the operator scale
  int max_restarts = 500;
  unsigned long seed = 12345;
};

/// Thick-restart Lanczos with full reorthogonalization for the `nev` largest
/// eigenpairs. `scale` estimates |A| for the stopping rule.
/// @throws NumericalError if the residuals do not converge.
EigenPairs lanczos_top_eigenpairs(int n, const MatVec& op, int nev, double scale,
                                  const LanczosOptions& opt = {});

}  // namespace spatspec
