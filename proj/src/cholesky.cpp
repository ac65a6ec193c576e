#include "dai/cholesky.hpp"

#include <cmath>

#include "dai/errors.hpp"

namespace dai {

// Givens-style column sweep; O(M^2).
bool chol_rank1_inplace(Eigen::MatrixXd& L, Eigen::VectorXd& x, int sign) {
  const Eigen::Index m = L.rows();
  const double s = sign >= 0 ? 1.0 : -1.0;
  for (Eigen::Index k = 0; k < m; ++k) {
    const double lkk = L(k, k);
    const double r2 = lkk * lkk + s * x[k] * x[k];
    if (!(r2 > 0.0) || !std::isfinite(r2)) return false;
    const double r = std::sqrt(r2);
    const double c = r / lkk;
    const double sn = x[k] / lkk;
    L(k, k) = r;
    if (k + 1 < m) {
      const Eigen::Index rest = m - k - 1;
      auto col = L.col(k).tail(rest);
      auto xs = x.tail(rest);
      col = (col + s * sn * xs) / c;
      xs = c * xs - sn * col;
    }
  }
  return true;
}

Eigen::MatrixXd chol_update(const Eigen::MatrixXd& L, const Eigen::VectorXd& x, int sign) {
  Eigen::MatrixXd out = L;
  Eigen::VectorXd work = x;
  if (!chol_rank1_inplace(out, work, sign))
    throw NumericalError("rank-1 Cholesky downdate lost positive definiteness");
  return out;
}

}  // namespace dai
