#include "dai/bayes_core.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "dai/cholesky.hpp"
#include "dai/errors.hpp"

namespace dai {

namespace {

std::string cluster_name(int cluster) {
  return cluster >= 0 ? "cluster " + std::to_string(cluster) : "cluster";
}

double student_t_log_norm(double dof, int m, double log_det_scale) {
  return std::lgamma(0.5 * (dof + m)) - std::lgamma(0.5 * dof) -
         0.5 * m * std::log(dof * std::numbers::pi) - 0.5 * log_det_scale;
}

}  // namespace

std::string to_string(DofMode m) {
  return m == DofMode::PaperLiteral ? "paper-literal" : "dimension-corrected";
}

DofMode parse_dof_mode(const std::string& s) {
  if (s == "paper-literal") return DofMode::PaperLiteral;
  if (s == "dimension-corrected") return DofMode::DimensionCorrected;
  throw ConfigError("unknown dof mode '" + s + "' (expected paper-literal or dimension-corrected)");
}

Hyperparams Hyperparams::defaults(int K, int M) {
  Hyperparams h;
  h.K = K;
  h.M = M;
  h.kappa = 0.0;
  h.nu = K;
  h.mu0 = Eigen::VectorXd::Zero(M);
  h.psi = Eigen::MatrixXd::Identity(M, M);
  h.alpha = 50.0 / K;
  return h;
}

void Hyperparams::validate() const {
  if (K < 1) throw ConfigError("K must be >= 1");
  if (M < 1) throw ConfigError("M must be >= 1");
  if (!(alpha > 0.0)) throw ConfigError("alpha must be > 0");
  if (!(kappa >= 0.0)) throw ConfigError("kappa must be >= 0");
  if (!(kappa_floor > 0.0)) throw ConfigError("kappa_floor must be > 0");
  if (mu0.size() != M) throw ConfigError("mu0 must have length M");
  if (psi.rows() != M || psi.cols() != M) throw ConfigError("psi must be M x M");
  if (!psi.isApprox(psi.transpose(), 1e-12)) throw ConfigError("psi must be symmetric");
  if (Eigen::LLT<Eigen::MatrixXd>(psi).info() != Eigen::Success)
    throw ConfigError("psi must be positive definite");
  if (dof_mode == DofMode::DimensionCorrected && nu < M)
    throw ConfigError("dimension-corrected dof mode requires nu >= M (nu=" + std::to_string(nu) +
                      ", M=" + std::to_string(M) + ")");
  if (nu - dof_offset() <= 0.0)
    throw ConfigError(to_string(dof_mode) + " dof mode gives non-positive degrees of freedom " +
                      std::to_string(nu - dof_offset()) + " for an empty cluster");
}

void ClusterStats::add(const Eigen::Ref<const Eigen::VectorXd>& v) {
  ++n;
  sum += v;
  Q.noalias() += v * v.transpose();
}

void ClusterStats::remove(const Eigen::Ref<const Eigen::VectorXd>& v) {
  if (n <= 0) throw std::logic_error("ClusterStats::remove on empty statistics");
  --n;
  if (n == 0) {
    sum.setZero();
    Q.setZero();
    return;
  }
  sum -= v;
  Q.noalias() -= v * v.transpose();
}

Eigen::VectorXd ClusterStats::mean() const {
  if (n == 0) return Eigen::VectorXd::Zero(sum.size());
  return sum / static_cast<double>(n);
}

Eigen::MatrixXd ClusterStats::scatter() const {
  if (n == 0) return Eigen::MatrixXd::Zero(Q.rows(), Q.cols());
  return Q - sum * sum.transpose() / static_cast<double>(n);
}

PosteriorParams posterior_params(const ClusterStats& stats, const Hyperparams& h, int cluster) {
  PosteriorParams p;
  const double n = static_cast<double>(stats.n);
  const double kappa = h.effective_kappa(stats.n);
  p.kappa_k = kappa + n;
  p.nu_k = h.nu + n;
  if (stats.n == 0) {
    p.mu_k = h.mu0;
    p.psi_k = h.psi;
  } else {
    const Eigen::VectorXd mean = stats.sum / n;
    const Eigen::VectorXd diff = mean - h.mu0;
    p.mu_k = (kappa * h.mu0 + stats.sum) / p.kappa_k;
    p.psi_k = h.psi + stats.scatter() + (kappa * n / p.kappa_k) * diff * diff.transpose();
  }
  p.dof = p.nu_k - h.dof_offset();
  if (!(p.dof > 0.0))
    throw ConfigError(to_string(h.dof_mode) + " dof mode gives non-positive degrees of freedom " +
                      std::to_string(p.dof) + " for " + cluster_name(cluster) + " (nu_k=" +
                      std::to_string(p.nu_k) + ")");
  p.sigma_k = p.psi_k / p.dof;
  return p;
}

double log_predictive_t(const Eigen::Ref<const Eigen::VectorXd>& v, const PosteriorParams& p, int cluster) {
  const int m = static_cast<int>(v.size());
  const Eigen::MatrixXd scale = ((p.kappa_k + 1.0) / p.kappa_k) * p.sigma_k;
  Eigen::LLT<Eigen::MatrixXd> llt(scale);
  if (llt.info() != Eigen::Success)
    throw NumericalError("predictive scale matrix is not positive definite for " + cluster_name(cluster));
  const Eigen::MatrixXd L = llt.matrixL();
  const double log_det = 2.0 * L.diagonal().array().log().sum();
  const Eigen::VectorXd z = llt.matrixL().solve(v - p.mu_k);
  return student_t_log_norm(p.dof, m, log_det) -
         0.5 * (p.dof + m) * std::log1p(z.squaredNorm() / p.dof);
}

double cluster_marginal_loglik(const Eigen::Ref<const Eigen::MatrixXd>& points, const Hyperparams& h) {
  ClusterStats stats(static_cast<int>(points.rows()));
  double total = 0.0;
  for (Eigen::Index i = 0; i < points.cols(); ++i) {
    total += log_predictive_t(points.col(i), posterior_params(stats, h));
    stats.add(points.col(i));
  }
  return total;
}

ClusterPredictive::ClusterPredictive(const ClusterStats& stats, const Hyperparams& h, int cluster)
    : cluster_(cluster) {
  rebuild(stats, h);
}

void ClusterPredictive::rebuild(const ClusterStats& stats, const Hyperparams& h) {
  PosteriorParams p = posterior_params(stats, h, cluster_);
  Eigen::LLT<Eigen::MatrixXd> llt(p.psi_k);
  if (llt.info() != Eigen::Success)
    throw NumericalError("posterior scale matrix is not positive definite for " + cluster_name(cluster_));
  chol_ = llt.matrixL();
  kappa_k_ = p.kappa_k;
  dof_ = p.dof;
  mu_k_ = std::move(p.mu_k);
  work_.resize(mu_k_.size());
  refresh_constants();
}

void ClusterPredictive::refresh_constants() {
  const int m = static_cast<int>(mu_k_.size());
  const double c = (kappa_k_ + 1.0) / (kappa_k_ * dof_);
  inv_scale_ = 1.0 / c;
  const double log_det = m * std::log(c) + 2.0 * chol_.diagonal().array().log().sum();
  log_norm_ = student_t_log_norm(dof_, m, log_det);
}

bool ClusterPredictive::added(const Eigen::Ref<const Eigen::VectorXd>& v, const ClusterStats& stats,
                              const Hyperparams& h) {
  if (h.effective_kappa(stats.n - 1) != h.effective_kappa(stats.n)) {
    rebuild(stats, h);
    return true;
  }
  // psi_k grows by kappa/(kappa+1) (v - mu)(v - mu)ᵀ.
  work_ = std::sqrt(kappa_k_ / (kappa_k_ + 1.0)) * (v - mu_k_);
  mu_k_ = (kappa_k_ * mu_k_ + v) / (kappa_k_ + 1.0);
  kappa_k_ += 1.0;
  dof_ += 1.0;
  if (!chol_rank1_inplace(chol_, work_, +1)) {
    rebuild(stats, h);
    return false;
  }
  refresh_constants();
  return true;
}

bool ClusterPredictive::removed(const Eigen::Ref<const Eigen::VectorXd>& v, const ClusterStats& stats,
                                const Hyperparams& h) {
  if (stats.n == 0 || h.effective_kappa(stats.n + 1) != h.effective_kappa(stats.n)) {
    rebuild(stats, h);
    return true;
  }
  const double kappa_prev = kappa_k_ - 1.0;
  mu_k_ = (kappa_k_ * mu_k_ - v) / kappa_prev;
  work_ = std::sqrt(kappa_prev / (kappa_prev + 1.0)) * (v - mu_k_);
  kappa_k_ = kappa_prev;
  dof_ -= 1.0;
  if (!chol_rank1_inplace(chol_, work_, -1)) {
    rebuild(stats, h);
    return false;
  }
  refresh_constants();
  return true;
}

double ClusterPredictive::log_density(const Eigen::Ref<const Eigen::VectorXd>& v) const {
  work_ = v - mu_k_;
  chol_.triangularView<Eigen::Lower>().solveInPlace(work_);
  const double quad = work_.squaredNorm() * inv_scale_;
  return log_norm_ - 0.5 * (dof_ + static_cast<double>(mu_k_.size())) * std::log1p(quad / dof_);
}

std::int64_t TransitionCounts::total() const {
  std::int64_t t = 0;
  for (auto r : row_totals_) t += r;
  return t;
}

void TransitionCounts::remove(int prev, int next) {
  auto& c = counts_[idx(next, prev)];
  if (c <= 0)
    throw std::logic_error("TransitionCounts::remove: no transition " + std::to_string(prev) + "->" +
                           std::to_string(next));
  --c;
  --row_totals_[static_cast<std::size_t>(prev)];
}

double trans_predictive(int next, int prev, const TransitionCounts& counts, const Hyperparams& h) {
  return (static_cast<double>(counts.count(next, prev)) + h.alpha) /
         (static_cast<double>(counts.row_total(prev)) + h.K * h.alpha);
}

double dirichlet_multinomial_logmarginal(const std::vector<std::int64_t>& counts, double alpha) {
  const double k = static_cast<double>(counts.size());
  double n = 0.0;
  double acc = 0.0;
  for (auto c : counts) {
    n += static_cast<double>(c);
    if (c > 0) acc += std::lgamma(static_cast<double>(c) + alpha) - std::lgamma(alpha);
  }
  return std::lgamma(k * alpha) - std::lgamma(n + k * alpha) + acc;
}

}  // namespace dai
