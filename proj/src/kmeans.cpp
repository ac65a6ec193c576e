#include "dai/kmeans.hpp"

#include <limits>
#include <stdexcept>

#include "dai/rng.hpp"

namespace dai {

int nearest_centroid(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::MatrixXd& centroids) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < centroids.cols(); ++k) {
    const double d = (x - centroids.col(k)).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(k);
    }
  }
  return best;
}

double kmeans_objective(const Eigen::Ref<const Eigen::MatrixXd>& points, const std::vector<int>& assignments,
                        const Eigen::MatrixXd& centroids) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < points.cols(); ++i)
    total += (points.col(i) - centroids.col(assignments[static_cast<std::size_t>(i)])).squaredNorm();
  return total;
}

namespace {

Eigen::MatrixXd seed_plus_plus(const Eigen::Ref<const Eigen::MatrixXd>& points, int K, Rng& rng) {
  const Eigen::Index n = points.cols();
  Eigen::MatrixXd centroids(points.rows(), K);
  std::vector<double> d2(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  Eigen::Index pick = static_cast<Eigen::Index>(uniform_index(rng, static_cast<std::uint64_t>(n)));
  for (int k = 0; k < K; ++k) {
    centroids.col(k) = points.col(pick);
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      auto& d = d2[static_cast<std::size_t>(i)];
      d = std::min(d, (points.col(i) - centroids.col(k)).squaredNorm());
      total += d;
    }
    if (k + 1 == K) break;
    if (total > 0.0) {
      const double u = uniform01(rng) * total;
      double acc = 0.0;
      pick = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += d2[static_cast<std::size_t>(i)];
        if (u < acc) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<Eigen::Index>(uniform_index(rng, static_cast<std::uint64_t>(n)));
    }
  }
  return centroids;
}

}  // namespace

KMeansResult kmeans(const Eigen::Ref<const Eigen::MatrixXd>& points, const KMeansConfig& config) {
  if (points.cols() == 0) throw std::invalid_argument("kmeans: empty input");
  if (config.K < 1) throw std::invalid_argument("kmeans: K must be >= 1");
  if (config.max_iters < 1) throw std::invalid_argument("kmeans: max_iters must be >= 1");

  const Eigen::Index n = points.cols();
  const int K = config.K;
  Rng rng(config.seed);
  KMeansResult r;
  r.centroids = seed_plus_plus(points, K, rng);
  r.assignments.assign(static_cast<std::size_t>(n), 0);

  for (int iter = 0; iter < config.max_iters; ++iter) {
    double objective = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const int k = nearest_centroid(points.col(i), r.centroids);
      r.assignments[static_cast<std::size_t>(i)] = k;
      objective += (points.col(i) - r.centroids.col(k)).squaredNorm();
    }
    r.objective_history.push_back(objective);
    r.iterations = iter + 1;

    Eigen::MatrixXd next = Eigen::MatrixXd::Zero(points.rows(), K);
    std::vector<std::int64_t> counts(static_cast<std::size_t>(K), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const int k = r.assignments[static_cast<std::size_t>(i)];
      next.col(k) += points.col(i);
      ++counts[static_cast<std::size_t>(k)];
    }
    for (int k = 0; k < K; ++k) {
      if (counts[static_cast<std::size_t>(k)] > 0) next.col(k) /= static_cast<double>(counts[static_cast<std::size_t>(k)]);
    }
    // Reseed empty clusters with the point farthest from its own centroid.
    for (int k = 0; k < K; ++k) {
      if (counts[static_cast<std::size_t>(k)] > 0) continue;
      Eigen::Index far = 0;
      double far_d = -1.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double d = (points.col(i) - next.col(r.assignments[static_cast<std::size_t>(i)])).squaredNorm();
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      next.col(k) = points.col(far);
      r.assignments[static_cast<std::size_t>(far)] = k;
      counts[static_cast<std::size_t>(k)] = 1;
    }
    const double shift = (next - r.centroids).colwise().norm().maxCoeff();
    r.centroids = std::move(next);
    if (shift <= config.tolerance) break;
  }
  // Final assignment against the last centroids.
  for (Eigen::Index i = 0; i < n; ++i)
    r.assignments[static_cast<std::size_t>(i)] = nearest_centroid(points.col(i), r.centroids);
  return r;
}

}  // namespace dai
