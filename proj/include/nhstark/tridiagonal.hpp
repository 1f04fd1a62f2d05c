#pragma once

#include <span>

#include <Eigen/Dense>

namespace nhstark {

struct TridiagonalEigen {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // orthonormal columns
};

/// Implicit-shift QL on a real symmetric tridiagonal matrix with the given
/// diagonal (n) and off-diagonal (n - 1). Throws Error(NumericalFailure) if an
/// eigenvalue fails to converge.
TridiagonalEigen solve_symmetric_tridiagonal(std::span<const double> diagonal,
                                             std::span<const double> off_diagonal);

}  // namespace nhstark
