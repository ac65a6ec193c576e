#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dai::cli {

enum ExitCode : int { kOk = 0, kInputError = 2, kEvalMismatch = 3 };

/// Everything a subcommand needs, with defaults resolved.
struct RunConfig {
  std::string subcommand;
  std::string corpus;
  std::string embeddings;
  std::string vectors;
  std::string split_file;
  std::string out_dir = ".";

  std::string model = "ctx";
  int K = 42;
  std::optional<double> alpha;  // default 50/K
  std::optional<double> nu;     // default K
  double kappa = 0.0;
  double kappa_floor = 1e-6;
  double psi_scale = 1.0;
  std::string dof_mode = "paper-literal";
  std::string conditional_mode = "paper-literal";
  int sweeps = 1000;
  std::uint64_t seed = 1;
  int recount_interval = 100;
  int trace_every = 1;
  bool fast_cholesky = true;
  int chains = 1;
  std::string fit = "all";  // all | train
  int assign_sweeps = 50;
  std::string idf_source = "train";  // train | all
  int kmeans_max_iters = 100;

  // eval
  std::string gold;
  std::string pred;
  std::string pairs;
  std::string out_file;

  // synth
  int dim = 10;
  int dialogues = 20;
  int min_len = 50;
  int max_len = 50;
  std::string params_file;
  std::optional<double> separation;
  double self_prob = 0.6;
};

int cmd_vectorize(const RunConfig& cfg);
int cmd_train(const RunConfig& cfg);
int cmd_eval(const RunConfig& cfg);
int cmd_synth(const RunConfig& cfg);

/// Parses arguments and dispatches. Returns the process exit code.
int run(int argc, char** argv);
int run(const std::vector<std::string>& args);

}  // namespace dai::cli
