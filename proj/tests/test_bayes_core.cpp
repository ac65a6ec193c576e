#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "dai/bayes_core.hpp"
#include "dai/errors.hpp"

using namespace dai;

namespace {

Eigen::MatrixXd random_points(int m, int n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Eigen::MatrixXd p(m, n);
  for (int j = 0; j < n; ++j)
    for (int d = 0; d < m; ++d) p(d, j) = normal(rng);
  return p;
}

Hyperparams corrected(int K, int M, double kappa, double nu) {
  Hyperparams h = Hyperparams::defaults(K, M);
  h.kappa = kappa;
  h.nu = nu;
  h.alpha = 0.7;
  h.dof_mode = DofMode::DimensionCorrected;
  return h;
}

double log_multigamma(double a, int m) {
  double r = 0.25 * m * (m - 1) * std::log(std::numbers::pi);
  for (int j = 0; j < m; ++j) r += std::lgamma(a - 0.5 * j);
  return r;
}

// Closed-form NIW marginal likelihood of a point set (textbook dof).
double niw_log_marginal(const Eigen::MatrixXd& pts, const Hyperparams& h) {
  const int m = static_cast<int>(pts.rows());
  const double n = static_cast<double>(pts.cols());
  if (pts.cols() == 0) return 0.0;
  const Eigen::VectorXd mean = pts.rowwise().mean();
  const Eigen::MatrixXd centered = pts.colwise() - mean;
  const Eigen::MatrixXd S = centered * centered.transpose();
  const double kn = h.kappa + n, nn = h.nu + n;
  const Eigen::VectorXd diff = mean - h.mu0;
  const Eigen::MatrixXd psin = h.psi + S + (h.kappa * n / kn) * diff * diff.transpose();
  return -0.5 * n * m * std::log(std::numbers::pi) + log_multigamma(0.5 * nn, m) - log_multigamma(0.5 * h.nu, m) +
         0.5 * h.nu * std::log(h.psi.determinant()) - 0.5 * nn * std::log(psin.determinant()) +
         0.5 * m * (std::log(h.kappa) - std::log(kn));
}

}  // namespace

TEST_CASE("ClusterStats add/remove") {
  ClusterStats s(2);
  s.add(Eigen::Vector2d(1, 2));
  CHECK(s.n == 1);
  CHECK(s.sum == Eigen::Vector2d(1, 2));
  Eigen::Matrix2d q;
  q << 1, 2, 2, 4;
  CHECK(s.Q == q);

  s.remove(Eigen::Vector2d(1, 2));
  CHECK(s.n == 0);
  CHECK(s.sum.norm() < 1e-12);
  CHECK(s.Q.norm() < 1e-12);
  CHECK_THROWS_AS(s.remove(Eigen::Vector2d(1, 2)), std::logic_error);

  ClusterStats t(2);
  t.add(Eigen::Vector2d(1, 0));
  t.add(Eigen::Vector2d(0, 1));
  Eigen::Matrix2d scatter;
  scatter << 0.5, -0.5, -0.5, 0.5;
  CHECK(t.scatter().isApprox(scatter, 1e-15));
}

TEST_CASE("ClusterStats interleaving property") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 1 + trial % 4;
    const int n = 5 + trial;
    Eigen::MatrixXd pts = random_points(m, n, rng, 3.0);
    ClusterStats direct(m);
    for (int j = 0; j < n; ++j) direct.add(pts.col(j));

    // Add everything plus extra noise points, remove the extras in a shuffled order.
    Eigen::MatrixXd extra = random_points(m, n, rng, 5.0);
    std::vector<int> order(static_cast<std::size_t>(2 * n));
    for (int j = 0; j < 2 * n; ++j) order[static_cast<std::size_t>(j)] = j;
    std::shuffle(order.begin(), order.end(), rng);
    ClusterStats mixed(m);
    for (int j : order) mixed.add(j < n ? Eigen::VectorXd(pts.col(j)) : Eigen::VectorXd(extra.col(j - n)));
    std::shuffle(order.begin(), order.end(), rng);
    for (int j : order)
      if (j >= n) mixed.remove(extra.col(j - n));

    CHECK(mixed.n == direct.n);
    CHECK((mixed.sum - direct.sum).norm() <= 1e-9 * n);
    CHECK((mixed.Q - direct.Q).norm() <= 1e-9 * n * std::max(1.0, direct.Q.norm()));
    // Scatter stays PSD.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mixed.scatter());
    CHECK(es.eigenvalues().minCoeff() >= -1e-8 * mixed.Q.norm());
  }
}

TEST_CASE("posterior_params") {
  SUBCASE("empty cluster recovers the prior") {
    Hyperparams h = Hyperparams::defaults(3, 2);
    h.psi << 2, 0.5, 0.5, 1;
    h.mu0 << 0.3, -1;
    auto p = posterior_params(ClusterStats(2), h);
    CHECK(p.mu_k == h.mu0);
    CHECK(p.psi_k == h.psi);
    CHECK(p.kappa_k == h.kappa_floor);
    CHECK(p.dof == doctest::Approx(h.nu - h.K + 1));
  }
  SUBCASE("single point with kappa = 0") {
    Hyperparams h = Hyperparams::defaults(2, 2);
    ClusterStats s(2);
    s.add(Eigen::Vector2d(3, -4));
    auto p = posterior_params(s, h);
    CHECK((p.mu_k - Eigen::Vector2d(3, -4)).norm() < 1e-5);
    CHECK((p.psi_k - h.psi).norm() < 1e-4);
    CHECK(p.nu_k == h.nu + 1);
  }
  SUBCASE("hand-computed update") {
    Hyperparams h = Hyperparams::defaults(2, 2);
    h.kappa = 1.0;
    h.nu = 4.0;
    ClusterStats s(2);
    s.add(Eigen::Vector2d(2, 0));
    auto p = posterior_params(s, h);
    CHECK(p.kappa_k == 2.0);
    CHECK(p.nu_k == 5.0);
    CHECK(p.mu_k.isApprox(Eigen::Vector2d(1, 0)));
    Eigen::Matrix2d psi_k, sigma_k;
    psi_k << 3, 0, 0, 1;
    sigma_k << 0.75, 0, 0, 0.25;
    CHECK(p.psi_k.isApprox(psi_k));
    CHECK(p.dof == 4.0);
    CHECK(p.sigma_k.isApprox(sigma_k));
  }
  SUBCASE("non-positive dof is a configuration error") {
    Hyperparams h = Hyperparams::defaults(42, 5);
    h.nu = 2.0;
    CHECK_THROWS_AS(posterior_params(ClusterStats(5), h, 7), ConfigError);
    try {
      posterior_params(ClusterStats(5), h, 7);
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("paper-literal") != std::string::npos);
      CHECK(std::string(e.what()).find("cluster 7") != std::string::npos);
    }
    Hyperparams hc = corrected(2, 5, 1.0, 3.0);
    CHECK_THROWS_AS(hc.validate(), ConfigError);
  }
}

TEST_CASE("log_predictive_t") {
  SUBCASE("standard Cauchy at its mode") {
    PosteriorParams p;
    p.kappa_k = 1.0;
    p.dof = 1.0;
    p.mu_k = Eigen::VectorXd::Zero(1);
    p.sigma_k = Eigen::MatrixXd::Constant(1, 1, 0.5);  // scale (1+1)/1 * 0.5 = 1
    CHECK(log_predictive_t(Eigen::VectorXd::Zero(1), p) == doctest::Approx(-std::log(std::numbers::pi)).epsilon(1e-14));
  }
  SUBCASE("matches a univariate Student-t formula") {
    PosteriorParams p;
    p.kappa_k = 3.0;
    p.dof = 5.0;
    p.mu_k = Eigen::VectorXd::Constant(1, 0.7);
    p.sigma_k = Eigen::MatrixXd::Constant(1, 1, 2.0);
    const double lam = (4.0 / 3.0) * 2.0, x = -1.3, nu = 5.0;
    const double expect = std::lgamma((nu + 1) / 2) - std::lgamma(nu / 2) - 0.5 * std::log(nu * std::numbers::pi * lam) -
                          (nu + 1) / 2 * std::log1p((x - 0.7) * (x - 0.7) / (lam * nu));
    CHECK(log_predictive_t(Eigen::VectorXd::Constant(1, x), p) == doctest::Approx(expect).epsilon(1e-13));
  }
  SUBCASE("1-D density integrates to one on [-50s, 50s] for dof 3 and 10") {
    for (double dof : {3.0, 10.0}) {
      PosteriorParams p;
      p.kappa_k = 1.0;
      p.dof = dof;
      p.mu_k = Eigen::VectorXd::Constant(1, 0.4);
      p.sigma_k = Eigen::MatrixXd::Constant(1, 1, 0.8);
      const double s = std::sqrt(2.0 * 0.8);
      const int n = 200000;
      const double a = 0.4 - 50 * s, b = 0.4 + 50 * s, hstep = (b - a) / n;
      double acc = 0.0;
      for (int i = 0; i <= n; ++i) {
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        acc += w * std::exp(log_predictive_t(Eigen::VectorXd::Constant(1, a + i * hstep), p));
      }
      CHECK(acc * hstep / 3.0 == doctest::Approx(1.0).epsilon(1e-4));
    }
  }
}

TEST_CASE("cluster_marginal_loglik") {
  std::mt19937_64 rng(5);
  Hyperparams h = corrected(3, 2, 0.5, 3.0);
  CHECK(cluster_marginal_loglik(Eigen::MatrixXd(2, 0), h) == 0.0);

  Eigen::MatrixXd one = random_points(2, 1, rng);
  CHECK(cluster_marginal_loglik(one, h) == log_predictive_t(one.col(0), posterior_params(ClusterStats(2), h)));

  SUBCASE("closed-form NIW marginal and permutation invariance") {
    for (int trial = 0; trial < 25; ++trial) {
      const int m = 1 + trial % 3;
      Hyperparams hh = corrected(2, m, 0.3 + 0.1 * trial, m + 0.5 + 0.2 * trial);
      Eigen::MatrixXd pts = random_points(m, 5, rng, 2.0);
      const double chain = cluster_marginal_loglik(pts, hh);
      CHECK(chain == doctest::Approx(niw_log_marginal(pts, hh)).epsilon(1e-10));
      std::vector<int> perm{0, 1, 2, 3, 4};
      std::shuffle(perm.begin(), perm.end(), rng);
      Eigen::MatrixXd shuffled(m, 5);
      for (int j = 0; j < 5; ++j) shuffled.col(j) = pts.col(perm[static_cast<std::size_t>(j)]);
      CHECK(std::abs(cluster_marginal_loglik(shuffled, hh) - chain) < 1e-8);
    }
  }
}

TEST_CASE("ClusterPredictive tracks log_predictive_t") {
  std::mt19937_64 rng(9);
  for (bool literal : {true, false}) {
    Hyperparams h = corrected(4, 3, 0.0, 4.0);
    if (literal) h.dof_mode = DofMode::PaperLiteral;
    Eigen::MatrixXd pts = random_points(3, 30, rng, 2.0);
    ClusterStats stats(3);
    ClusterPredictive pred(stats, h);
    std::vector<int> members;
    std::uniform_real_distribution<double> coin;
    for (int step = 0; step < 200; ++step) {
      if (members.empty() || coin(rng) < 0.6) {
        int j = static_cast<int>(rng() % 30);
        members.push_back(j);
        stats.add(pts.col(j));
        CHECK(pred.added(pts.col(j), stats, h));
      } else {
        std::size_t pick = rng() % members.size();
        int j = members[pick];
        members.erase(members.begin() + static_cast<long>(pick));
        stats.remove(pts.col(j));
        CHECK(pred.removed(pts.col(j), stats, h));
      }
      const Eigen::VectorXd probe = pts.col(step % 30);
      CHECK(pred.log_density(probe) == doctest::Approx(log_predictive_t(probe, posterior_params(stats, h))).epsilon(1e-9));
    }
  }
}

TEST_CASE("trans_predictive") {
  Hyperparams h = Hyperparams::defaults(4, 1);
  h.alpha = 0.5;
  TransitionCounts tc(4);
  for (int prev = 0; prev <= 4; ++prev)
    for (int next = 0; next < 4; ++next) CHECK(trans_predictive(next, prev, tc, h) == 0.25);

  for (int i = 0; i < 3; ++i) tc.add(1, 2);
  for (int i = 0; i < 7; ++i) tc.add(1, i % 2 == 0 ? 0 : 3);
  CHECK(tc.row_total(1) == 10);
  CHECK(trans_predictive(2, 1, tc, h) == doctest::Approx(3.5 / 12));

  tc.add(tc.start(), 3);
  for (int prev = 0; prev <= 4; ++prev) {
    double row = 0.0;
    for (int next = 0; next < 4; ++next) row += trans_predictive(next, prev, tc, h);
    CHECK(std::abs(row - 1.0) < 1e-12);
  }
  CHECK(tc.total() == 11);
  CHECK_THROWS_AS(tc.remove(2, 2), std::logic_error);
}

TEST_CASE("dirichlet_multinomial_logmarginal equals the sequential predictive product") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const int K = 2 + trial % 5;
    const double alpha = 0.1 + 0.3 * trial;
    std::vector<int> seq(static_cast<std::size_t>(trial + 1));
    for (auto& s : seq) s = static_cast<int>(rng() % static_cast<unsigned>(K));
    std::vector<std::int64_t> counts(static_cast<std::size_t>(K), 0);
    double chain = 0.0;
    for (std::size_t i = 0; i < seq.size(); ++i) {
      chain += std::log((counts[static_cast<std::size_t>(seq[i])] + alpha) / (static_cast<double>(i) + K * alpha));
      ++counts[static_cast<std::size_t>(seq[i])];
    }
    CHECK(dirichlet_multinomial_logmarginal(counts, alpha) == doctest::Approx(chain).epsilon(1e-12));
  }
  CHECK(dirichlet_multinomial_logmarginal({0, 0, 0}, 0.5) == 0.0);
}
