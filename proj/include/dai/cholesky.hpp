#pragma once

#include <Eigen/Dense>

namespace dai {

/// In-place rank-1 modification of a lower Cholesky factor: on success
/// L Lᵀ becomes L Lᵀ + sign·x xᵀ. `x` is used as scratch. Returns false when a
/// downdate would lose positive definiteness; L is then left unspecified and
/// the caller must refactor.
bool chol_rank1_inplace(Eigen::MatrixXd& L, Eigen::VectorXd& x, int sign);

/// Value-returning form. Throws NumericalError when a downdate fails.
Eigen::MatrixXd chol_update(const Eigen::MatrixXd& L, const Eigen::VectorXd& x, int sign);

}  // namespace dai
