#include "dai/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "dai/corpus.hpp"
#include "dai/embeddings.hpp"
#include "dai/errors.hpp"
#include "dai/kmeans.hpp"
#include "dai/metrics.hpp"
#include "dai/sampler.hpp"
#include "dai/synth.hpp"

namespace dai::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class EvalMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void require_file(const std::string& path, const char* what) {
  if (path.empty()) throw ConfigError(std::string("missing --") + what);
  if (!fs::is_regular_file(path)) throw ConfigError(std::string(what) + " file not found: " + path);
}

fs::path prepare_out_dir(const std::string& dir) {
  fs::path p(dir.empty() ? "." : dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (!fs::is_directory(p)) throw ConfigError("cannot create output directory '" + p.string() + "'");
  return p;
}

json config_json(const RunConfig& c, const std::optional<Hyperparams>& h) {
  json j;
  j["subcommand"] = c.subcommand;
  j["corpus"] = c.corpus;
  j["embeddings"] = c.embeddings;
  j["vectors"] = c.vectors;
  j["split_file"] = c.split_file;
  j["out_dir"] = c.out_dir;
  j["seed"] = c.seed;
  if (c.subcommand == "vectorize") {
    j["idf_source"] = c.idf_source;
  }
  if (c.subcommand == "train") {
    j["model"] = c.model;
    j["sweeps"] = c.sweeps;
    j["conditional_mode"] = c.conditional_mode;
    j["recount_interval"] = c.recount_interval;
    j["trace_every"] = c.trace_every;
    j["fast_cholesky"] = c.fast_cholesky;
    j["chains"] = c.chains;
    j["fit"] = c.fit;
    j["assign_sweeps"] = c.assign_sweeps;
    j["idf_source"] = c.idf_source;
    j["kmeans_max_iters"] = c.kmeans_max_iters;
  }
  if (c.subcommand == "synth") {
    j["dim"] = c.dim;
    j["dialogues"] = c.dialogues;
    j["min_len"] = c.min_len;
    j["max_len"] = c.max_len;
    j["params_file"] = c.params_file;
    if (c.separation) j["separation"] = *c.separation;
    j["self_prob"] = c.self_prob;
  }
  if (h) {
    j["K"] = h->K;
    j["M"] = h->M;
    j["alpha"] = h->alpha;
    j["nu"] = h->nu;
    j["kappa"] = h->kappa;
    j["kappa_floor"] = h->kappa_floor;
    j["psi_scale"] = c.psi_scale;
    j["dof_mode"] = to_string(h->dof_mode);
  }
  return j;
}

void write_config_echo(const fs::path& dir, const RunConfig& c, const std::optional<Hyperparams>& h) {
  std::ofstream out(dir / "config.json", std::ios::binary);
  out << config_json(c, h).dump(2) << '\n';
}

Hyperparams resolve_hyperparams(const RunConfig& c, int M) {
  if (c.K < 1) throw ConfigError("--k must be >= 1");
  Hyperparams h = Hyperparams::defaults(c.K, M);
  h.alpha = c.alpha.value_or(50.0 / c.K);
  h.nu = c.nu.value_or(static_cast<double>(c.K));
  h.kappa = c.kappa;
  h.kappa_floor = c.kappa_floor;
  if (!(c.psi_scale > 0.0)) throw ConfigError("--psi-scale must be > 0");
  h.psi *= c.psi_scale;
  h.dof_mode = parse_dof_mode(c.dof_mode);
  return h;
}

struct Split {
  std::vector<std::string> train, test;
};

Split load_split(const std::string& path) {
  require_file(path, "split-file");
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid split file: ") + e.what());
  }
  Split s;
  try {
    if (j.contains("train")) s.train = j.at("train").get<std::vector<std::string>>();
    if (j.contains("test")) s.test = j.at("test").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid split file: ") + e.what());
  }
  return s;
}

std::vector<bool> id_mask(const std::vector<std::string>& all_ids, const std::vector<std::string>& wanted) {
  std::map<std::string, std::size_t> index;
  for (std::size_t j = 0; j < all_ids.size(); ++j) index.emplace(all_ids[j], j);
  std::vector<bool> mask(all_ids.size(), false);
  for (const auto& id : wanted) {
    auto it = index.find(id);
    if (it == index.end()) throw ConfigError("split file names unknown dialogue '" + id + "'");
    mask[it->second] = true;
  }
  return mask;
}

std::vector<std::string> corpus_ids(const Corpus& c) {
  std::vector<std::string> ids;
  for (const auto& d : c.dialogues()) ids.push_back(d.id);
  return ids;
}

struct Inputs {
  VectorSet vectors;
  std::optional<Corpus> corpus;
  std::optional<Split> split;
  std::size_t oov = 0;
};

// Corpus + embeddings -> vectors, with IDF from the train split or all data.
VectorizeResult vectorize(const RunConfig& c, const Corpus& corpus, const std::optional<Split>& split) {
  require_file(c.embeddings, "embeddings");
  const auto table = load_embeddings(c.embeddings);
  IdfTable idf;
  if (c.idf_source == "train" && split && !split->train.empty()) {
    idf = compute_idf(corpus.subset(id_mask(corpus_ids(corpus), split->train)));
  } else if (c.idf_source == "train" || c.idf_source == "all") {
    idf = compute_idf(corpus);
  } else {
    throw ConfigError("--idf-source must be train or all");
  }
  return vectorize_corpus(corpus, table, idf);
}

Inputs load_inputs(const RunConfig& c) {
  Inputs in;
  if (!c.split_file.empty()) in.split = load_split(c.split_file);
  if (!c.corpus.empty()) {
    require_file(c.corpus, "corpus");
    in.corpus = load_corpus(c.corpus);
  }
  if (!c.vectors.empty()) {
    require_file(c.vectors, "vectors");
    in.vectors = read_vectors(c.vectors);
    if (in.corpus) {
      for (std::size_t j = 0; j < in.vectors.num_dialogues(); ++j) {
        auto idx = in.corpus->find(in.vectors.dialogue_id(j));
        if (!idx || (*in.corpus)[*idx].utterances.size() != in.vectors.length(j))
          throw ConfigError("vectors file does not align with corpus at dialogue '" +
                            in.vectors.dialogue_id(j) + "'");
      }
    }
  } else if (in.corpus) {
    auto r = vectorize(c, *in.corpus, in.split);
    in.vectors = std::move(r.vectors);
    in.oov = r.oov_utterances;
  } else {
    throw ConfigError("train needs --vectors or --corpus with --embeddings");
  }
  return in;
}

void write_assignments(const fs::path& path, const VectorSet& vs, const std::vector<std::vector<int>>& z) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  for (std::size_t j = 0; j < vs.num_dialogues(); ++j) {
    for (std::size_t i = 0; i < z[j].size(); ++i) out << vs.dialogue_id(j) << '\t' << i << '\t' << z[j][i] << '\n';
  }
}

// Metrics over eval dialogues that carry gold labels. Returns nullopt when no
// gold labels are available.
std::optional<MetricsReport> score(const Inputs& in, const std::vector<std::vector<int>>& z,
                                   const std::vector<bool>& eval_mask) {
  if (!in.corpus) return std::nullopt;
  std::vector<std::string> gold, pred;
  for (std::size_t j = 0; j < in.vectors.num_dialogues(); ++j) {
    if (!eval_mask[j] || z[j].empty()) continue;
    const auto& d = (*in.corpus)[*in.corpus->find(in.vectors.dialogue_id(j))];
    for (std::size_t i = 0; i < z[j].size(); ++i) {
      if (!d.utterances[i].gold_label) continue;
      gold.push_back(*d.utterances[i].gold_label);
      pred.push_back(std::to_string(z[j][i]));
    }
  }
  if (gold.empty()) return std::nullopt;
  return evaluate(gold, pred);
}

struct ChainOutput {
  std::vector<std::vector<int>> assignments;
  std::vector<TraceRow> trace;
  /// Final collapsed log joint (samplers) or negative objective (kmeans).
  double score = 0.0;
};

ChainOutput train_chain(const RunConfig& c, const Inputs& in, const Hyperparams& h, std::uint64_t seed,
                        const std::vector<bool>& fit_mask, const std::vector<bool>& assign_mask) {
  ChainOutput out;
  const auto& vs = in.vectors;
  if (c.model == "kmeans") {
    std::vector<Eigen::Index> cols;
    for (std::size_t j = 0; j < vs.num_dialogues(); ++j) {
      if (!fit_mask[j]) continue;
      for (std::size_t i = 0; i < vs.length(j); ++i) cols.push_back(static_cast<Eigen::Index>(vs.offset(j) + i));
    }
    Eigen::MatrixXd pts(vs.dim(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) pts.col(static_cast<Eigen::Index>(k)) = vs.matrix().col(cols[k]);
    KMeansConfig kc;
    kc.K = h.K;
    kc.seed = seed;
    kc.max_iters = c.kmeans_max_iters;
    const auto r = kmeans(pts, kc);
    out.score = -kmeans_objective(pts, r.assignments, r.centroids);
    out.assignments.resize(vs.num_dialogues());
    std::size_t k = 0;
    for (std::size_t j = 0; j < vs.num_dialogues(); ++j) {
      if (fit_mask[j]) {
        for (std::size_t i = 0; i < vs.length(j); ++i) out.assignments[j].push_back(r.assignments[k++]);
      } else if (assign_mask[j]) {
        for (std::size_t i = 0; i < vs.length(j); ++i)
          out.assignments[j].push_back(nearest_centroid(vs.at(j, i), r.centroids));
      }
    }
    return out;
  }

  SamplerConfig sc;
  sc.model = parse_model(c.model);
  sc.sweeps = c.sweeps;
  sc.seed = seed;
  sc.conditional_mode = parse_conditional_mode(c.conditional_mode);
  sc.recount_interval = c.recount_interval;
  sc.fast_cholesky = c.fast_cholesky;
  sc.trace_every = c.trace_every;
  auto result = run(vs, sc, h, fit_mask);
  bool any_assign = false;
  for (std::size_t j = 0; j < vs.num_dialogues(); ++j) any_assign = any_assign || (assign_mask[j] && !fit_mask[j]);
  if (any_assign) {
    std::vector<bool> fresh(vs.num_dialogues(), false);
    for (std::size_t j = 0; j < vs.num_dialogues(); ++j) fresh[j] = assign_mask[j] && !fit_mask[j];
    include_dialogues(result.state, vs, fresh);
    if (c.assign_sweeps > 0) run_sweeps(result.state, vs, sc, c.assign_sweeps, &result.trace, fresh);
  }
  out.score = collapsed_log_joint(result.state, vs, sc.model);
  out.assignments = std::move(result.state.assignments);
  out.trace = std::move(result.trace);
  return out;
}

void write_chain(const fs::path& dir, const RunConfig& c, const Inputs& in, const ChainOutput& out,
                 const std::vector<bool>& eval_mask) {
  write_assignments(dir / "assignments.tsv", in.vectors, out.assignments);
  if (c.model != "kmeans") write_trace_csv(out.trace, (dir / "trace.csv").string());
  if (auto m = score(in, out.assignments, eval_mask)) {
    std::ofstream mo(dir / "metrics.json", std::ios::binary);
    mo << m->to_json() << '\n';
    std::cout << dir.string() << " metrics: " << m->to_json() << '\n';
  }
}

std::vector<std::string> read_label_column(const std::string& path) {
  require_file(path, "label");
  std::vector<std::string> out;
  std::istringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto tab = line.rfind('\t');
    out.push_back(tab == std::string::npos ? line : line.substr(tab + 1));
  }
  return out;
}

int report_error(const std::exception& e, int code) {
  std::cerr << "error: " << e.what() << '\n';
  return code;
}

}  // namespace

int cmd_vectorize(const RunConfig& c) {
  require_file(c.corpus, "corpus");
  require_file(c.embeddings, "embeddings");
  std::optional<Split> split;
  if (!c.split_file.empty()) split = load_split(c.split_file);
  const auto corpus = load_corpus(c.corpus);
  const auto r = vectorize(c, corpus, split);
  const auto dir = prepare_out_dir(c.out_dir);
  write_vectors(r.vectors, dir / "vectors.tsv");
  write_config_echo(dir, c, std::nullopt);
  std::cout << "vectorized " << r.vectors.num_vectors() << " utterances (M=" << r.vectors.dim() << "), "
            << r.oov_utterances << " entirely out-of-vocabulary\n";
  return kOk;
}

int cmd_train(const RunConfig& c) {
  if (c.model != "ctx" && c.model != "gmm" && c.model != "kmeans")
    throw ConfigError("--model must be ctx, gmm or kmeans");
  if (c.chains < 1) throw ConfigError("--chains must be >= 1");
  if (c.fit != "all" && c.fit != "train") throw ConfigError("--fit must be all or train");
  const Inputs in = load_inputs(c);
  const Hyperparams h = resolve_hyperparams(c, in.vectors.dim());
  if (c.model != "kmeans") {
    h.validate();
    // Surface dof problems before any sampling.
    posterior_params(ClusterStats(h.M), h);
  }

  const std::size_t nd = in.vectors.num_dialogues();
  std::vector<bool> all(nd, true);
  std::vector<bool> eval_mask = all, fit_mask = all, assign_mask = all;
  if (in.split) {
    if (!in.split->test.empty()) eval_mask = id_mask(in.vectors.dialogue_ids(), in.split->test);
    if (c.fit == "train") {
      if (in.split->train.empty()) throw ConfigError("--fit train needs a train list in the split file");
      fit_mask = id_mask(in.vectors.dialogue_ids(), in.split->train);
      for (std::size_t j = 0; j < nd; ++j) assign_mask[j] = fit_mask[j] || eval_mask[j];
    }
  } else if (c.fit == "train") {
    throw ConfigError("--fit train needs --split-file");
  }

  const auto dir = prepare_out_dir(c.out_dir);
  write_config_echo(dir, c, h);
  if (in.oov > 0) std::cout << in.oov << " utterances entirely out-of-vocabulary\n";

  if (c.chains == 1) {
    write_chain(dir, c, in, train_chain(c, in, h, c.seed, fit_mask, assign_mask), eval_mask);
    return kOk;
  }
  std::vector<ChainOutput> outs(static_cast<std::size_t>(c.chains));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(c.chains));
  std::vector<std::thread> workers;
  for (int k = 0; k < c.chains; ++k) {
    workers.emplace_back([&, k] {
      try {
        outs[static_cast<std::size_t>(k)] =
            train_chain(c, in, h, c.seed + static_cast<std::uint64_t>(k), fit_mask, assign_mask);
      } catch (...) {
        errors[static_cast<std::size_t>(k)] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (int k = 0; k < c.chains; ++k) {
    const auto sub = prepare_out_dir((dir / ("chain_" + std::to_string(k))).string());
    write_chain(sub, c, in, outs[static_cast<std::size_t>(k)], eval_mask);
  }
  // The top level holds the chain with the best final score.
  std::size_t best = 0;
  json scores = json::array();
  for (std::size_t k = 0; k < outs.size(); ++k) {
    scores.push_back(outs[k].score);
    if (outs[k].score > outs[best].score) best = k;
  }
  write_chain(dir, c, in, outs[best], eval_mask);
  std::ofstream(dir / "chains.json", std::ios::binary) << json{{"selected", best}, {"scores", scores}}.dump(2) << '\n';
  return kOk;
}

int cmd_eval(const RunConfig& c) {
  std::vector<std::string> gold, pred;
  if (!c.pairs.empty()) {
    require_file(c.pairs, "pairs");
    std::istringstream in(read_file(c.pairs));
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      auto tab = line.find('\t');
      if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos)
        throw EvalMismatch("line " + std::to_string(line_no) + ": expected gold<TAB>predicted");
      gold.push_back(line.substr(0, tab));
      pred.push_back(line.substr(tab + 1));
    }
  } else if (!c.corpus.empty() && !c.pred.empty()) {
    require_file(c.corpus, "corpus");
    const auto corpus = load_corpus(c.corpus);
    std::optional<std::vector<bool>> keep;
    if (!c.split_file.empty()) {
      const auto split = load_split(c.split_file);
      if (!split.test.empty()) keep = id_mask(corpus_ids(corpus), split.test);
    }
    // Predictions as written by `train`: dialogue_id, index, cluster.
    std::map<std::pair<std::string, std::size_t>, std::string> by_pos;
    require_file(c.pred, "pred");
    std::istringstream in(read_file(c.pred));
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::istringstream ls(line);
      std::string id, idx, cl;
      if (!std::getline(ls, id, '\t') || !std::getline(ls, idx, '\t') || !std::getline(ls, cl))
        throw ConfigError("prediction file rows must be dialogue_id, index, cluster");
      by_pos[{id, std::stoul(idx)}] = cl;
    }
    for (std::size_t j = 0; j < corpus.size(); ++j) {
      if (keep && !(*keep)[j]) continue;
      const auto& d = corpus[j];
      for (std::size_t i = 0; i < d.utterances.size(); ++i) {
        if (!d.utterances[i].gold_label) continue;
        auto it = by_pos.find({d.id, i});
        if (it == by_pos.end())
          throw EvalMismatch("no prediction for dialogue '" + d.id + "' utterance " + std::to_string(i));
        gold.push_back(*d.utterances[i].gold_label);
        pred.push_back(it->second);
      }
    }
  } else {
    gold = read_label_column(c.gold);
    pred = read_label_column(c.pred);
  }
  if (gold.size() != pred.size() || gold.empty())
    throw EvalMismatch("gold has " + std::to_string(gold.size()) + " labels, prediction has " +
                       std::to_string(pred.size()));
  const auto report = evaluate(gold, pred);
  std::cout << report.to_json() << '\n';
  if (!c.out_file.empty()) {
    std::ofstream out(c.out_file, std::ios::binary);
    out << report.to_json() << '\n';
  }
  return kOk;
}

int cmd_synth(const RunConfig& c) {
  SynthConfig sc;
  sc.K = c.K;
  sc.M = c.dim;
  sc.dialogues = c.dialogues;
  sc.min_length = c.min_len;
  sc.max_length = c.max_len;
  sc.seed = c.seed;
  std::optional<Hyperparams> h;
  if (!c.params_file.empty()) {
    require_file(c.params_file, "params-file");
    sc.explicit_params = GeneratingParams::from_json(read_file(c.params_file));
  } else if (c.separation) {
    sc.explicit_params = separated_params(c.K, c.dim, *c.separation, c.self_prob);
  } else {
    h = resolve_hyperparams(c, c.dim);
    h->validate();
    sc.prior = h;
  }
  const auto data = generate(sc);
  const auto dir = prepare_out_dir(c.out_dir);
  write_corpus_jsonl(data.corpus(), dir / "corpus.jsonl");
  write_vectors(data.vectors, dir / "vectors.tsv");
  {
    std::ofstream out(dir / "params.json", std::ios::binary);
    out << data.params.to_json() << '\n';
  }
  write_config_echo(dir, c, h);
  std::cout << "generated " << data.vectors.num_vectors() << " vectors in " << data.vectors.num_dialogues()
            << " dialogues (K=" << data.params.K() << ", M=" << data.params.M() << ")\n";
  return kOk;
}

int run(int argc, char** argv) {
  CLI::App app{"Unsupervised dialogue act induction with Gaussian-emission HMMs"};
  app.require_subcommand(1);
  RunConfig c;

  auto add_hyper = [&c](CLI::App* sub) {
    sub->add_option("--k", c.K, "Number of clusters (default 42)");
    sub->add_option("--alpha", c.alpha, "Dirichlet concentration (default 50/K)");
    sub->add_option("--nu", c.nu, "Inverse-Wishart degrees of freedom (default K)");
    sub->add_option("--kappa", c.kappa, "Prior mean strength (default 0, floored internally)");
    sub->add_option("--kappa-floor", c.kappa_floor, "Substitute for kappa = 0");
    sub->add_option("--psi-scale", c.psi_scale, "Inverse-Wishart scale matrix = psi-scale * I");
    sub->add_option("--dof-mode", c.dof_mode, "paper-literal | dimension-corrected");
    sub->add_option("--seed", c.seed, "Random seed");
    sub->add_option("--out-dir", c.out_dir, "Output directory");
  };

  auto* vec = app.add_subcommand("vectorize", "Compose IDF-weighted utterance vectors");
  vec->add_option("--corpus", c.corpus, "Corpus file (.jsonl or .tsv)");
  vec->add_option("--embeddings", c.embeddings, "Word vectors in text format");
  vec->add_option("--split-file", c.split_file, "JSON with train/test dialogue id lists");
  vec->add_option("--idf-source", c.idf_source, "train | all");
  vec->add_option("--out-dir", c.out_dir, "Output directory");

  auto* train = app.add_subcommand("train", "Induce dialogue acts");
  train->add_option("--corpus", c.corpus, "Corpus file (gold labels for metrics)");
  train->add_option("--embeddings", c.embeddings, "Word vectors (when --vectors is not given)");
  train->add_option("--vectors", c.vectors, "Vectors file from `vectorize`");
  train->add_option("--model", c.model, "ctx | gmm | kmeans");
  train->add_option("--conditional-mode", c.conditional_mode, "paper-literal | exact-collapsed");
  train->add_option("--sweeps", c.sweeps, "Gibbs sweeps (default 1000)");
  train->add_option("--split-file", c.split_file, "JSON with train/test dialogue id lists");
  train->add_option("--fit", c.fit, "all (transductive) | train (then assign test)");
  train->add_option("--assign-sweeps", c.assign_sweeps, "Sweeps over held-out dialogues with --fit train");
  train->add_option("--recount-interval", c.recount_interval, "Sweeps between full statistics recounts");
  train->add_option("--trace-every", c.trace_every, "Sweeps between log-joint evaluations (0 = off)");
  train->add_option("--fast-cholesky", c.fast_cholesky, "Rank-1 Cholesky updates (true/false)");
  train->add_option("--chains", c.chains, "Independent chains run in parallel; the best final log joint is also written at the top level");
  train->add_option("--idf-source", c.idf_source, "train | all");
  train->add_option("--max-iters", c.kmeans_max_iters, "k-means iteration cap");
  add_hyper(train);

  auto* eval = app.add_subcommand("eval", "Score predicted clusters against gold labels");
  eval->add_option("--pairs", c.pairs, "Two-column TSV: gold TAB predicted");
  eval->add_option("--gold", c.gold, "One gold label per line (last TSV column)");
  eval->add_option("--pred", c.pred, "One predicted label per line, or assignments.tsv with --corpus");
  eval->add_option("--corpus", c.corpus, "Corpus with gold labels, aligned by dialogue id and index");
  eval->add_option("--split-file", c.split_file, "Restrict to the test list");
  eval->add_option("--out", c.out_file, "Also write the report here");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus from the HMM");
  synth->add_option("--dim", c.dim, "Vector dimension M");
  synth->add_option("--dialogues", c.dialogues, "Number of dialogues");
  synth->add_option("--min-len", c.min_len, "Minimum dialogue length");
  synth->add_option("--max-len", c.max_len, "Maximum dialogue length");
  synth->add_option("--params-file", c.params_file, "Explicit parameters JSON");
  synth->add_option("--separation", c.separation, "Axis-aligned means this far from the origin");
  synth->add_option("--self-prob", c.self_prob, "Self-transition probability with --separation");
  add_hyper(synth);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    if (*vec) {
      c.subcommand = "vectorize";
      return cmd_vectorize(c);
    }
    if (*train) {
      c.subcommand = "train";
      return cmd_train(c);
    }
    if (*eval) {
      c.subcommand = "eval";
      return cmd_eval(c);
    }
    if (*synth) {
      c.subcommand = "synth";
      return cmd_synth(c);
    }
  } catch (const EvalMismatch& e) {
    return report_error(e, kEvalMismatch);
  } catch (const std::exception& e) {
    return report_error(e, kInputError);
  }
  return kInputError;
}

int run(const std::vector<std::string>& args) {
  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.push_back("dainduce");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace dai::cli
