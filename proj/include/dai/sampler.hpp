#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dai/bayes_core.hpp"
#include "dai/embeddings.hpp"
#include "dai/rng.hpp"

namespace dai {

enum class Model { Ctx, Gmm };

/// PaperLiteral scores both transition factors from counts with the two
/// adjacent transitions removed. ExactCollapsed adds the self-transition
/// correction to the outgoing factor, which makes each step an exact Gibbs
/// conditional of the collapsed model.
enum class ConditionalMode { PaperLiteral, ExactCollapsed };

std::string to_string(Model m);
Model parse_model(const std::string& s);
std::string to_string(ConditionalMode m);
ConditionalMode parse_conditional_mode(const std::string& s);

struct SamplerConfig {
  Model model = Model::Ctx;
  int sweeps = 1000;
  std::uint64_t seed = 1;
  ConditionalMode conditional_mode = ConditionalMode::PaperLiteral;
  /// Full recount of statistics every this many sweeps (0 disables).
  int recount_interval = 100;
  /// Use rank-1 Cholesky updates instead of refactorizing on every move.
  bool fast_cholesky = true;
  /// Record the collapsed log-joint every this many sweeps (0 disables).
  int trace_every = 1;

  void validate() const;
};

/// All mutable inference state. Dialogues can be excluded (not yet
/// assigned); their assignment vectors are then empty.
struct SamplerState {
  Hyperparams h;
  std::vector<std::vector<int>> assignments;
  std::vector<bool> included;
  std::vector<ClusterStats> stats;
  std::vector<ClusterPredictive> predictive;
  TransitionCounts transitions;
  Rng rng;
  int sweep = 0;
  bool fast_cholesky = true;
  /// Downdates that lost positive definiteness and were refactorized.
  std::int64_t cholesky_fallbacks = 0;

  std::int64_t num_assigned() const;
  std::vector<std::int64_t> cluster_sizes() const;
  /// Assignments of included dialogues concatenated in corpus order.
  std::vector<int> flat_assignments() const;
};

/// Uniform random assignment of every utterance in the included dialogues
/// (all of them when `include` is empty).
SamplerState init_random(const VectorSet& vectors, const Hyperparams& h, std::uint64_t seed,
                         const std::vector<bool>& include = {}, bool fast_cholesky = true);

/// Builds a state from given assignments (one vector per dialogue; empty
/// vector = excluded).
SamplerState init_from_assignments(const VectorSet& vectors, const Hyperparams& h,
                                   std::vector<std::vector<int>> assignments, std::uint64_t seed,
                                   bool fast_cholesky = true);

/// Randomly assigns and adds the flagged dialogues that are not yet included.
void include_dialogues(SamplerState& state, const VectorSet& vectors, const std::vector<bool>& mask);

/// One Gibbs sweep of the context model. Only dialogues flagged in `active`
/// are resampled (all included dialogues when empty).
void gibbs_sweep_ctx(SamplerState& state, const VectorSet& vectors, ConditionalMode mode,
                     const std::vector<bool>& active = {});

/// One Gibbs sweep of the context-free mixture model.
void gibbs_sweep_gmm(SamplerState& state, const VectorSet& vectors, const std::vector<bool>& active = {});

/// Recomputes statistics from assignments and compares them with the
/// incremental ones; throws InternalError beyond `rel_tol`. Replaces the
/// incremental statistics with the recount.
void recount_statistics(SamplerState& state, const VectorSet& vectors, double rel_tol = 1e-6);

/// Collapsed log p(D, V): per-cluster marginal likelihoods (chain rule in
/// corpus order) plus Dirichlet-multinomial marginals of the transition rows
/// (ctx) or of the cluster counts (gmm).
double collapsed_log_joint(const SamplerState& state, const VectorSet& vectors, Model model = Model::Ctx);

struct TraceRow {
  int sweep = 0;
  std::optional<double> log_joint;
  std::vector<std::int64_t> sizes;
};

struct RunResult {
  SamplerState state;
  std::vector<TraceRow> trace;
};

/// Random initialization followed by `config.sweeps` sweeps.
RunResult run(const VectorSet& vectors, const SamplerConfig& config, const Hyperparams& h,
              const std::vector<bool>& include = {});

/// Continues sampling an existing state.
void run_sweeps(SamplerState& state, const VectorSet& vectors, const SamplerConfig& config, int sweeps,
                std::vector<TraceRow>* trace, const std::vector<bool>& active = {});

/// CSV with header `sweep,collapsed_log_joint,size_0,...`.
void write_trace_csv(const std::vector<TraceRow>& trace, const std::string& path);

}  // namespace dai
