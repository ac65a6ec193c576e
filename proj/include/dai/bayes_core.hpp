#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dai {

/// How the Student-t degrees of freedom are derived from nu_k.
///  - PaperLiteral:        dof = nu_k - K + 1  (K = cluster count)
///  - DimensionCorrected:  dof = nu_k - M + 1  (M = vector dimension)
enum class DofMode { PaperLiteral, DimensionCorrected };

std::string to_string(DofMode m);
DofMode parse_dof_mode(const std::string& s);

struct Hyperparams {
  int K = 2;
  int M = 1;
  double kappa = 0.0;
  double nu = 2.0;
  Eigen::VectorXd mu0;
  Eigen::MatrixXd psi;
  double alpha = 1.0;
  DofMode dof_mode = DofMode::PaperLiteral;
  double kappa_floor = 1e-6;

  /// kappa = 0, mu0 = 0, nu = K, psi = identity, alpha = 50/K.
  static Hyperparams defaults(int K, int M);

  /// Throws ConfigError on any violated invariant.
  void validate() const;

  /// Prior mean strength actually used for a cluster holding n points.
  double effective_kappa(std::int64_t n) const {
    return (n == 0 || kappa == 0.0) ? std::max(kappa, kappa_floor) : kappa;
  }

  /// Degrees-of-freedom offset subtracted from nu_k (K or M), minus one.
  double dof_offset() const { return (dof_mode == DofMode::PaperLiteral ? K : M) - 1.0; }
};

/// Count, vector sum and raw second moment of the vectors in one cluster.
struct ClusterStats {
  std::int64_t n = 0;
  Eigen::VectorXd sum;
  Eigen::MatrixXd Q;

  ClusterStats() = default;
  explicit ClusterStats(int M) : sum(Eigen::VectorXd::Zero(M)), Q(Eigen::MatrixXd::Zero(M, M)) {}

  void add(const Eigen::Ref<const Eigen::VectorXd>& v);
  /// Throws std::logic_error on empty stats.
  void remove(const Eigen::Ref<const Eigen::VectorXd>& v);

  Eigen::VectorXd mean() const;
  /// S = Q - sum sumᵀ / n (zero when n = 0).
  Eigen::MatrixXd scatter() const;
};

struct PosteriorParams {
  double kappa_k = 0.0;
  double nu_k = 0.0;
  Eigen::VectorXd mu_k;
  Eigen::MatrixXd psi_k;
  Eigen::MatrixXd sigma_k;
  double dof = 0.0;
};

/// NIW posterior update. `cluster` is only used in error messages.
PosteriorParams posterior_params(const ClusterStats& stats, const Hyperparams& h, int cluster = -1);

/// Log-density of the multivariate Student-t with dof p.dof, mean p.mu_k and
/// scale ((kappa_k + 1) / kappa_k) * sigma_k.
double log_predictive_t(const Eigen::Ref<const Eigen::VectorXd>& v, const PosteriorParams& p,
                        int cluster = -1);

/// Chain rule over the predictive: sum_i log p(v_i | v_1..v_{i-1}), with the
/// points given as columns. Equals the NIW marginal likelihood in
/// dimension-corrected mode.
double cluster_marginal_loglik(const Eigen::Ref<const Eigen::MatrixXd>& points, const Hyperparams& h);

/// Predictive Student-t for one cluster, kept as a Cholesky factor of psi_k
/// so a density costs one triangular solve. Supports O(M^2) rank-1 updates
/// when points join or leave, with refactorization on breakdown.
class ClusterPredictive {
 public:
  ClusterPredictive() = default;
  ClusterPredictive(const ClusterStats& stats, const Hyperparams& h, int cluster = -1);

  /// Full refactorization from sufficient statistics.
  void rebuild(const ClusterStats& stats, const Hyperparams& h);

  /// Incorporates `v`; `stats` must already include it. Returns false when
  /// the fast path fell back to a rebuild.
  bool added(const Eigen::Ref<const Eigen::VectorXd>& v, const ClusterStats& stats, const Hyperparams& h);
  /// Removes `v`; `stats` must already exclude it.
  bool removed(const Eigen::Ref<const Eigen::VectorXd>& v, const ClusterStats& stats, const Hyperparams& h);

  double log_density(const Eigen::Ref<const Eigen::VectorXd>& v) const;

  double kappa() const { return kappa_k_; }
  double dof() const { return dof_; }
  const Eigen::VectorXd& mean() const { return mu_k_; }
  const Eigen::MatrixXd& psi_factor() const { return chol_; }

 private:
  void refresh_constants();

  int cluster_ = -1;
  double kappa_k_ = 0.0;
  double dof_ = 0.0;
  Eigen::VectorXd mu_k_;
  Eigen::MatrixXd chol_;  // lower factor of psi_k
  double log_norm_ = 0.0;
  double inv_scale_ = 0.0;  // 1 / c where Lambda = c * psi_k
  mutable Eigen::VectorXd work_;
};

/// (K+1) x K table of state-bigram counts. Row K is the virtual START state.
class TransitionCounts {
 public:
  TransitionCounts() = default;
  explicit TransitionCounts(int K)
      : K_(K), counts_(static_cast<std::size_t>(K + 1) * static_cast<std::size_t>(K), 0),
        row_totals_(static_cast<std::size_t>(K + 1), 0) {}

  int K() const { return K_; }
  int start() const { return K_; }

  std::int64_t count(int next, int prev) const { return counts_[idx(next, prev)]; }
  std::int64_t row_total(int prev) const { return row_totals_[static_cast<std::size_t>(prev)]; }
  std::int64_t total() const;

  void add(int prev, int next) {
    ++counts_[idx(next, prev)];
    ++row_totals_[static_cast<std::size_t>(prev)];
  }
  /// Throws std::logic_error when the count is already zero.
  void remove(int prev, int next);

  bool operator==(const TransitionCounts&) const = default;

 private:
  std::size_t idx(int next, int prev) const {
    return static_cast<std::size_t>(prev) * static_cast<std::size_t>(K_) + static_cast<std::size_t>(next);
  }
  int K_ = 0;
  std::vector<std::int64_t> counts_;
  std::vector<std::int64_t> row_totals_;
};

/// (n(next|prev) + alpha) / (n(.|prev) + K alpha).
double trans_predictive(int next, int prev, const TransitionCounts& counts, const Hyperparams& h);

/// Log Dirichlet-multinomial sequence marginal of one count vector under a
/// symmetric Dirichlet(alpha):
/// lnG(K a) - lnG(n + K a) + sum_k [lnG(n_k + a) - lnG(a)].
double dirichlet_multinomial_logmarginal(const std::vector<std::int64_t>& counts, double alpha);

}  // namespace dai
