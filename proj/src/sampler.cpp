#include "dai/sampler.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "dai/errors.hpp"

namespace dai {

std::string to_string(Model m) { return m == Model::Ctx ? "ctx" : "gmm"; }

Model parse_model(const std::string& s) {
  if (s == "ctx") return Model::Ctx;
  if (s == "gmm") return Model::Gmm;
  throw ConfigError("unknown sampler model '" + s + "'");
}

std::string to_string(ConditionalMode m) {
  return m == ConditionalMode::PaperLiteral ? "paper-literal" : "exact-collapsed";
}

ConditionalMode parse_conditional_mode(const std::string& s) {
  if (s == "paper-literal") return ConditionalMode::PaperLiteral;
  if (s == "exact-collapsed") return ConditionalMode::ExactCollapsed;
  throw ConfigError("unknown conditional mode '" + s + "' (expected paper-literal or exact-collapsed)");
}

void SamplerConfig::validate() const {
  if (sweeps < 1) throw ConfigError("sweeps must be >= 1");
  if (recount_interval < 0) throw ConfigError("recount_interval must be >= 0");
  if (trace_every < 0) throw ConfigError("trace_every must be >= 0");
}

std::int64_t SamplerState::num_assigned() const {
  std::int64_t n = 0;
  for (const auto& s : stats) n += s.n;
  return n;
}

std::vector<std::int64_t> SamplerState::cluster_sizes() const {
  std::vector<std::int64_t> out;
  out.reserve(stats.size());
  for (const auto& s : stats) out.push_back(s.n);
  return out;
}

std::vector<int> SamplerState::flat_assignments() const {
  std::vector<int> out;
  for (const auto& z : assignments) out.insert(out.end(), z.begin(), z.end());
  return out;
}

namespace {

void check_shape(const VectorSet& vectors, const Hyperparams& h) {
  if (vectors.num_vectors() == 0) throw std::invalid_argument("sampler: empty vector set");
  if (vectors.dim() != h.M)
    throw ConfigError("vector dimension " + std::to_string(vectors.dim()) + " does not match M=" +
                      std::to_string(h.M));
}

void add_dialogue(SamplerState& s, const VectorSet& vectors, std::size_t j) {
  const auto& z = s.assignments[j];
  int prev = s.transitions.start();
  for (std::size_t i = 0; i < z.size(); ++i) {
    s.stats[static_cast<std::size_t>(z[i])].add(vectors.at(j, i));
    s.transitions.add(prev, z[i]);
    prev = z[i];
  }
}

void rebuild_predictive(SamplerState& s) {
  s.predictive.clear();
  for (int k = 0; k < s.h.K; ++k) s.predictive.emplace_back(s.stats[static_cast<std::size_t>(k)], s.h, k);
}

// Draws an index with probability proportional to exp(scores).
int sample_log_scores(std::vector<double>& scores, Rng& rng) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double x : scores) mx = std::max(mx, x);
  double total = 0.0;
  for (double& x : scores) {
    x = std::exp(x - mx);
    total += x;
    x = total;
  }
  const double u = uniform01(rng) * total;
  for (std::size_t k = 0; k < scores.size(); ++k) {
    if (u < scores[k]) return static_cast<int>(k);
  }
  return static_cast<int>(scores.size()) - 1;
}

void remove_point(SamplerState& s, const Eigen::Ref<const Eigen::VectorXd>& v, int k) {
  auto& st = s.stats[static_cast<std::size_t>(k)];
  st.remove(v);
  auto& pred = s.predictive[static_cast<std::size_t>(k)];
  if (s.fast_cholesky) {
    if (!pred.removed(v, st, s.h)) ++s.cholesky_fallbacks;
  } else {
    pred.rebuild(st, s.h);
  }
}

void add_point(SamplerState& s, const Eigen::Ref<const Eigen::VectorXd>& v, int k) {
  auto& st = s.stats[static_cast<std::size_t>(k)];
  st.add(v);
  auto& pred = s.predictive[static_cast<std::size_t>(k)];
  if (s.fast_cholesky) {
    if (!pred.added(v, st, s.h)) ++s.cholesky_fallbacks;
  } else {
    pred.rebuild(st, s.h);
  }
}

bool is_active(const SamplerState& s, const std::vector<bool>& active, std::size_t j) {
  if (!s.included[j]) return false;
  return active.empty() || (j < active.size() && active[j]);
}

}  // namespace

SamplerState init_from_assignments(const VectorSet& vectors, const Hyperparams& h,
                                   std::vector<std::vector<int>> assignments, std::uint64_t seed,
                                   bool fast_cholesky) {
  h.validate();
  check_shape(vectors, h);
  if (assignments.size() != vectors.num_dialogues())
    throw std::invalid_argument("init_from_assignments: dialogue count mismatch");
  SamplerState s;
  s.h = h;
  s.rng.seed(seed);
  s.fast_cholesky = fast_cholesky;
  s.stats.assign(static_cast<std::size_t>(h.K), ClusterStats(h.M));
  s.transitions = TransitionCounts(h.K);
  s.included.assign(vectors.num_dialogues(), false);
  s.assignments = std::move(assignments);
  for (std::size_t j = 0; j < vectors.num_dialogues(); ++j) {
    const auto& z = s.assignments[j];
    if (z.empty()) continue;
    if (z.size() != vectors.length(j))
      throw std::invalid_argument("init_from_assignments: length mismatch in dialogue " + vectors.dialogue_id(j));
    for (int k : z) {
      if (k < 0 || k >= h.K) throw std::invalid_argument("init_from_assignments: state out of range");
    }
    s.included[j] = true;
    add_dialogue(s, vectors, j);
  }
  rebuild_predictive(s);
  return s;
}

SamplerState init_random(const VectorSet& vectors, const Hyperparams& h, std::uint64_t seed,
                         const std::vector<bool>& include, bool fast_cholesky) {
  h.validate();
  check_shape(vectors, h);
  Rng rng(seed);
  std::vector<std::vector<int>> z(vectors.num_dialogues());
  for (std::size_t j = 0; j < vectors.num_dialogues(); ++j) {
    if (!include.empty() && !(j < include.size() && include[j])) continue;
    z[j].resize(vectors.length(j));
    for (auto& k : z[j]) k = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(h.K)));
  }
  SamplerState s = init_from_assignments(vectors, h, std::move(z), seed, fast_cholesky);
  s.rng = rng;
  return s;
}

void include_dialogues(SamplerState& state, const VectorSet& vectors, const std::vector<bool>& mask) {
  for (std::size_t j = 0; j < vectors.num_dialogues(); ++j) {
    if (j >= mask.size() || !mask[j] || state.included[j]) continue;
    auto& z = state.assignments[j];
    z.resize(vectors.length(j));
    for (auto& k : z) k = static_cast<int>(uniform_index(state.rng, static_cast<std::uint64_t>(state.h.K)));
    state.included[j] = true;
    add_dialogue(state, vectors, j);
  }
  rebuild_predictive(state);
}

void gibbs_sweep_ctx(SamplerState& state, const VectorSet& vectors, ConditionalMode mode,
                     const std::vector<bool>& active) {
  const int K = state.h.K;
  const double alpha = state.h.alpha;
  const double k_alpha = K * alpha;
  const bool exact = mode == ConditionalMode::ExactCollapsed;
  auto& tc = state.transitions;
  std::vector<double> scores(static_cast<std::size_t>(K));

  for (std::size_t j = 0; j < vectors.num_dialogues(); ++j) {
    if (!is_active(state, active, j)) continue;
    auto& z = state.assignments[j];
    const std::size_t len = z.size();
    for (std::size_t i = 0; i < len; ++i) {
      const auto v = vectors.at(j, i);
      const int old = z[i];
      const int prev = i > 0 ? z[i - 1] : tc.start();
      const int next = i + 1 < len ? z[i + 1] : -1;

      remove_point(state, v, old);
      tc.remove(prev, old);
      if (next >= 0) tc.remove(old, next);

      const double in_den = static_cast<double>(tc.row_total(prev)) + k_alpha;
      for (int k = 0; k < K; ++k) {
        double s = std::log((static_cast<double>(tc.count(k, prev)) + alpha) / in_den);
        if (next >= 0) {
          double num = static_cast<double>(tc.count(next, k)) + alpha;
          double den = static_cast<double>(tc.row_total(k)) + k_alpha;
          if (exact && prev == k) {
            den += 1.0;
            if (next == k) num += 1.0;
          }
          s += std::log(num / den);
        }
        s += state.predictive[static_cast<std::size_t>(k)].log_density(v);
        scores[static_cast<std::size_t>(k)] = s;
      }
      const int chosen = sample_log_scores(scores, state.rng);

      z[i] = chosen;
      add_point(state, v, chosen);
      tc.add(prev, chosen);
      if (next >= 0) tc.add(chosen, next);
    }
  }
  ++state.sweep;
}

void gibbs_sweep_gmm(SamplerState& state, const VectorSet& vectors, const std::vector<bool>& active) {
  const int K = state.h.K;
  const double alpha = state.h.alpha;
  const double n_total = static_cast<double>(state.num_assigned());
  const double log_den = std::log(n_total - 1.0 + K * alpha);
  auto& tc = state.transitions;
  std::vector<double> scores(static_cast<std::size_t>(K));

  for (std::size_t j = 0; j < vectors.num_dialogues(); ++j) {
    if (!is_active(state, active, j)) continue;
    auto& z = state.assignments[j];
    for (std::size_t i = 0; i < z.size(); ++i) {
      const auto v = vectors.at(j, i);
      // Transition counts are not used for scoring but are kept consistent.
      const int prev = i > 0 ? z[i - 1] : tc.start();
      const bool has_next = i + 1 < z.size();
      remove_point(state, v, z[i]);
      tc.remove(prev, z[i]);
      if (has_next) tc.remove(z[i], z[i + 1]);
      for (int k = 0; k < K; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        scores[kk] = std::log(static_cast<double>(state.stats[kk].n) + alpha) - log_den +
                     state.predictive[kk].log_density(v);
      }
      z[i] = sample_log_scores(scores, state.rng);
      add_point(state, v, z[i]);
      tc.add(prev, z[i]);
      if (has_next) tc.add(z[i], z[i + 1]);
    }
  }
  ++state.sweep;
}

void recount_statistics(SamplerState& state, const VectorSet& vectors, double rel_tol) {
  const auto& h = state.h;
  std::vector<ClusterStats> fresh(static_cast<std::size_t>(h.K), ClusterStats(h.M));
  TransitionCounts tc(h.K);
  for (std::size_t j = 0; j < vectors.num_dialogues(); ++j) {
    if (!state.included[j]) continue;
    int prev = tc.start();
    for (std::size_t i = 0; i < state.assignments[j].size(); ++i) {
      const int k = state.assignments[j][i];
      fresh[static_cast<std::size_t>(k)].add(vectors.at(j, i));
      tc.add(prev, k);
      prev = k;
    }
  }
  if (!(tc == state.transitions))
    throw InternalError("transition counts diverged from assignments at sweep " + std::to_string(state.sweep));
  for (int k = 0; k < h.K; ++k) {
    const auto& a = state.stats[static_cast<std::size_t>(k)];
    const auto& b = fresh[static_cast<std::size_t>(k)];
    const double scale = std::max(1.0, b.Q.norm());
    if (a.n != b.n || (a.sum - b.sum).norm() > rel_tol * std::max(1.0, b.sum.norm()) ||
        (a.Q - b.Q).norm() > rel_tol * scale)
      throw InternalError("statistics of cluster " + std::to_string(k) + " diverged from assignments at sweep " +
                          std::to_string(state.sweep));
  }
  state.stats = std::move(fresh);
  rebuild_predictive(state);
}

double collapsed_log_joint(const SamplerState& state, const VectorSet& vectors, Model model) {
  const auto& h = state.h;
  double total = 0.0;
  std::vector<ClusterStats> stats(static_cast<std::size_t>(h.K), ClusterStats(h.M));
  std::vector<ClusterPredictive> pred;
  for (int k = 0; k < h.K; ++k) pred.emplace_back(stats[static_cast<std::size_t>(k)], h, k);
  for (std::size_t j = 0; j < vectors.num_dialogues(); ++j) {
    if (!state.included[j]) continue;
    for (std::size_t i = 0; i < state.assignments[j].size(); ++i) {
      const auto k = static_cast<std::size_t>(state.assignments[j][i]);
      const auto v = vectors.at(j, i);
      total += pred[k].log_density(v);
      stats[k].add(v);
      pred[k].added(v, stats[k], h);
    }
  }
  if (model == Model::Ctx) {
    std::vector<std::int64_t> row(static_cast<std::size_t>(h.K));
    for (int prev = 0; prev <= h.K; ++prev) {
      for (int next = 0; next < h.K; ++next) row[static_cast<std::size_t>(next)] = state.transitions.count(next, prev);
      total += dirichlet_multinomial_logmarginal(row, h.alpha);
    }
  } else {
    total += dirichlet_multinomial_logmarginal(state.cluster_sizes(), h.alpha);
  }
  return total;
}

void run_sweeps(SamplerState& state, const VectorSet& vectors, const SamplerConfig& config, int sweeps,
                std::vector<TraceRow>* trace, const std::vector<bool>& active) {
  for (int t = 0; t < sweeps; ++t) {
    if (config.model == Model::Ctx)
      gibbs_sweep_ctx(state, vectors, config.conditional_mode, active);
    else
      gibbs_sweep_gmm(state, vectors, active);
    if (config.recount_interval > 0 && state.sweep % config.recount_interval == 0)
      recount_statistics(state, vectors);
    if (trace) {
      TraceRow row;
      row.sweep = state.sweep;
      row.sizes = state.cluster_sizes();
      if (config.trace_every > 0 && state.sweep % config.trace_every == 0)
        row.log_joint = collapsed_log_joint(state, vectors, config.model);
      trace->push_back(std::move(row));
    }
  }
}

RunResult run(const VectorSet& vectors, const SamplerConfig& config, const Hyperparams& h,
              const std::vector<bool>& include) {
  config.validate();
  RunResult result{init_random(vectors, h, config.seed, include, config.fast_cholesky), {}};
  run_sweeps(result.state, vectors, config, config.sweeps, &result.trace);
  return result;
}

void write_trace_csv(const std::vector<TraceRow>& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  const std::size_t k = trace.empty() ? 0 : trace.front().sizes.size();
  out << "sweep,collapsed_log_joint";
  for (std::size_t c = 0; c < k; ++c) out << ",size_" << c;
  out << '\n';
  char buf[64];
  for (const auto& row : trace) {
    out << row.sweep << ',';
    if (row.log_joint) {
      std::snprintf(buf, sizeof buf, "%.10f", *row.log_joint);
      out << buf;
    }
    for (auto n : row.sizes) out << ',' << n;
    out << '\n';
  }
}

}  // namespace dai
