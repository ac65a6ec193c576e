#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dai/bayes_core.hpp"
#include "dai/corpus.hpp"
#include "dai/embeddings.hpp"
#include "dai/rng.hpp"

namespace dai {

/// Parameters of an HMM with Gaussian emissions.
struct GeneratingParams {
  std::vector<Eigen::VectorXd> means;
  std::vector<Eigen::MatrixXd> covariances;
  Eigen::MatrixXd transition;  // K x K, row = previous state
  Eigen::VectorXd start;       // K

  int K() const { return static_cast<int>(means.size()); }
  int M() const { return means.empty() ? 0 : static_cast<int>(means.front().size()); }

  /// Throws ConfigError on shape mismatches, non-SPD covariances or rows that
  /// do not sum to one.
  void validate() const;

  std::string to_json() const;
  static GeneratingParams from_json(const std::string& text);
};

struct SynthConfig {
  int K = 5;
  int M = 10;
  int dialogues = 20;
  int min_length = 50;
  int max_length = 50;  // uniform in [min_length, max_length]
  std::uint64_t seed = 1;
  /// Explicit parameters; when absent they are drawn from `prior`.
  std::optional<GeneratingParams> explicit_params;
  std::optional<Hyperparams> prior;
};

struct SynthData {
  VectorSet vectors;
  std::vector<std::vector<int>> states;
  GeneratingParams params;

  /// Corpus with empty texts and gold labels "s<state>".
  Corpus corpus() const;
};

/// Draws parameters (when not explicit), then state sequences from the
/// Markov chain and vectors from each state's Gaussian.
SynthData generate(const SynthConfig& config);

/// Parameters from the NIW / Dirichlet prior. kappa must be > 0.
GeneratingParams sample_params_from_prior(const Hyperparams& h, Rng& rng);

/// Means `separation` apart along distinct axes (M >= K), identity
/// covariances, self-transition probability `self_prob` with the rest spread
/// evenly, uniform start distribution.
GeneratingParams separated_params(int K, int M, double separation, double self_prob);

/// Inverse-Wishart draw via the Bartlett decomposition. Requires nu > M - 1.
Eigen::MatrixXd sample_inverse_wishart(const Eigen::MatrixXd& psi, double nu, Rng& rng);

}  // namespace dai
