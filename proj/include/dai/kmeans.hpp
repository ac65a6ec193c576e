#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace dai {

struct KMeansConfig {
  int K = 42;
  int max_iters = 100;
  std::uint64_t seed = 1;
  /// Stop once no centroid moves farther than this (Euclidean).
  double tolerance = 1e-6;
};

struct KMeansResult {
  std::vector<int> assignments;
  Eigen::MatrixXd centroids;  // M x K, one centroid per column
  /// Sum of squared distances after each assignment step.
  std::vector<double> objective_history;
  int iterations = 0;
};

/// k-means++ seeding followed by Lloyd iterations. Points are the columns of
/// `points`. Ties go to the lowest cluster index; a cluster that empties is
/// reseeded with the point farthest from its current centroid.
KMeansResult kmeans(const Eigen::Ref<const Eigen::MatrixXd>& points, const KMeansConfig& config);

/// Index of the nearest centroid (lowest index on ties).
int nearest_centroid(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::MatrixXd& centroids);

/// Sum of squared distances of each point to its assigned centroid.
double kmeans_objective(const Eigen::Ref<const Eigen::MatrixXd>& points, const std::vector<int>& assignments,
                        const Eigen::MatrixXd& centroids);

}  // namespace dai
