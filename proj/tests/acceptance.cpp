// Acceptance suite. Prints one line per criterion:
//   criterion N: PASS|FAIL|SKIP - details
// Exit status is nonzero when any criterion fails. Pass criterion numbers as
// arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dai/bayes_core.hpp"
#include "dai/cholesky.hpp"
#include "dai/cli.hpp"
#include "dai/metrics.hpp"
#include "dai/sampler.hpp"
#include "dai/synth.hpp"

using namespace dai;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  enum Status { Pass, Fail, Skip } status;
  std::string detail;
};

Outcome pass_if(bool ok, std::string detail) { return {ok ? Outcome::Pass : Outcome::Fail, std::move(detail)}; }

std::string fmt(double x, int prec = 4) {
  std::ostringstream s;
  s.precision(prec);
  s << x;
  return s.str();
}

Eigen::MatrixXd normal_matrix(int rows, int cols, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Eigen::MatrixXd m(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) m(r, c) = normal(rng);
  return m;
}

Eigen::MatrixXd random_spd(int m, std::mt19937_64& rng) {
  Eigen::MatrixXd b = normal_matrix(m, m, rng);
  return b * b.transpose() + m * Eigen::MatrixXd::Identity(m, m);
}

double log_multigamma(double a, int m) {
  double r = 0.25 * m * (m - 1) * std::log(std::numbers::pi);
  for (int j = 0; j < m; ++j) r += std::lgamma(a - 0.5 * j);
  return r;
}

// Closed-form NIW marginal likelihood with the textbook degrees of freedom.
double niw_log_marginal(const Eigen::MatrixXd& pts, const Hyperparams& h) {
  const int m = static_cast<int>(pts.rows());
  const double n = static_cast<double>(pts.cols());
  const Eigen::VectorXd mean = pts.rowwise().mean();
  const Eigen::MatrixXd centered = pts.colwise() - mean;
  const double kn = h.kappa + n, nn = h.nu + n;
  const Eigen::VectorXd diff = mean - h.mu0;
  const Eigen::MatrixXd psin = h.psi + centered * centered.transpose() + (h.kappa * n / kn) * diff * diff.transpose();
  return -0.5 * n * m * std::log(std::numbers::pi) + log_multigamma(0.5 * nn, m) - log_multigamma(0.5 * h.nu, m) +
         0.5 * h.nu * std::log(h.psi.determinant()) - 0.5 * nn * std::log(psin.determinant()) +
         0.5 * m * (std::log(h.kappa) - std::log(kn));
}

double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
  double tv = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) tv += std::abs(p[i] - q[i]);
  return 0.5 * tv;
}

std::vector<double> softmax(const std::vector<double>& logp) {
  const double mx = *std::max_element(logp.begin(), logp.end());
  std::vector<double> p(logp.size());
  double z = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) z += (p[i] = std::exp(logp[i] - mx));
  for (auto& x : p) x /= z;
  return p;
}

double v1_against(const std::vector<std::vector<int>>& gold, const std::vector<std::vector<int>>& pred) {
  std::vector<std::string> g, p;
  for (std::size_t j = 0; j < gold.size(); ++j) {
    for (std::size_t i = 0; i < gold[j].size(); ++i) {
      g.push_back(std::to_string(gold[j][i]));
      p.push_back(std::to_string(pred[j][i]));
    }
  }
  return evaluate(g, p).V1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  auto p = fs::path(DAI_TEST_TMP) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// ---------------------------------------------------------------------------

Outcome conjugacy_oracle() {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double worst_ratio = 0.0, worst_perm = 0.0, worst_closed = 0.0;
  for (int inst = 0; inst < 100; ++inst) {
    const int m = 1 + static_cast<int>(rng() % 3);
    const int n = 1 + static_cast<int>(rng() % 8);
    Hyperparams h = Hyperparams::defaults(2, m);
    h.dof_mode = DofMode::DimensionCorrected;
    h.kappa = 0.1 + 2.0 * unif(rng);
    h.nu = m + 3.0 * unif(rng);
    h.mu0 = normal_matrix(m, 1, rng).col(0);
    h.psi = random_spd(m, rng) / m;
    const Eigen::MatrixXd pts = normal_matrix(m, n, rng, 1.5);

    const double full = cluster_marginal_loglik(pts, h);
    const double prefix = cluster_marginal_loglik(pts.leftCols(n - 1), h);
    ClusterStats st(m);
    for (int i = 0; i + 1 < n; ++i) st.add(pts.col(i));
    const double pred = log_predictive_t(pts.col(n - 1), posterior_params(st, h));
    worst_ratio = std::max(worst_ratio, std::abs(pred - (full - prefix)));

    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::shuffle(order.begin(), order.end(), rng);
    Eigen::MatrixXd permuted(m, n);
    for (int i = 0; i < n; ++i) permuted.col(i) = pts.col(order[static_cast<std::size_t>(i)]);
    worst_perm = std::max(worst_perm, std::abs(cluster_marginal_loglik(permuted, h) - full));
    worst_closed = std::max(worst_closed, std::abs(niw_log_marginal(pts, h) - full));
  }
  return pass_if(worst_ratio <= 1e-9 && worst_perm <= 1e-8 && worst_closed <= 1e-8,
                 "100 instances; max |predictive - ratio| = " + fmt(worst_ratio, 3) +
                     ", max permutation diff = " + fmt(worst_perm, 3) + ", max closed-form diff = " +
                     fmt(worst_closed, 3));
}

Outcome density_normalization() {
  std::string detail;
  bool ok = true;
  for (double dof : {1.0, 3.0, 10.0}) {
    PosteriorParams p;
    p.kappa_k = 1.0;
    p.dof = dof;
    p.mu_k = Eigen::VectorXd::Constant(1, 0.4);
    p.sigma_k = Eigen::MatrixXd::Constant(1, 1, 0.8);
    const double s = std::sqrt(2.0 * 0.8);
    // Whole real line through x = mu + s tan(t); midpoint rule on (-pi/2, pi/2).
    const int n = 200000;
    const double step = std::numbers::pi / n;
    double mass = 0.0;
    for (int i = 0; i < n; ++i) {
      const double t = -0.5 * std::numbers::pi + (i + 0.5) * step;
      const double c = std::cos(t);
      const double x = 0.4 + s * std::tan(t);
      mass += std::exp(log_predictive_t(Eigen::VectorXd::Constant(1, x), p)) * s / (c * c);
    }
    mass *= step;
    ok = ok && std::abs(mass - 1.0) <= 1e-4;
    detail += "dof " + fmt(dof) + ": " + fmt(mass, 10) + "; ";
    if (dof > 1.0) {
      // Plain Simpson on +-50 scale units.
      const int k = 200000;
      const double a = 0.4 - 50 * s, b = 0.4 + 50 * s, hstep = (b - a) / k;
      double acc = 0.0;
      for (int i = 0; i <= k; ++i) {
        const double w = (i == 0 || i == k) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        acc += w * std::exp(log_predictive_t(Eigen::VectorXd::Constant(1, a + i * hstep), p));
      }
      acc *= hstep / 3.0;
      ok = ok && std::abs(acc - 1.0) <= 1e-4;
      detail += "[+-50s " + fmt(acc, 10) + "]; ";
    }
  }
  return pass_if(ok, detail);
}

// Shared by the two enumeration checks: Gibbs frequencies of `sweep` against
// the normalized collapsed joint over all K^N labelings.
Outcome enumeration_check(const VectorSet& v, const Hyperparams& h, Model model,
                          const std::function<void(SamplerState&)>& sweep) {
  const std::size_t n = v.num_vectors();
  const std::size_t states = std::size_t{1} << n;
  std::vector<double> logp(states);
  for (std::size_t code = 0; code < states; ++code) {
    std::vector<std::vector<int>> z(v.num_dialogues());
    std::size_t bit = 0;
    for (std::size_t j = 0; j < v.num_dialogues(); ++j)
      for (std::size_t i = 0; i < v.length(j); ++i) z[j].push_back(static_cast<int>((code >> bit++) & 1));
    logp[code] = collapsed_log_joint(init_from_assignments(v, h, z, 1), v, model);
  }
  const auto exact = softmax(logp);

  auto state = init_random(v, h, 2024);
  for (int t = 0; t < 2000; ++t) sweep(state);
  const int samples = 50000;
  std::vector<double> freq(states, 0.0);
  for (int t = 0; t < samples; ++t) {
    sweep(state);
    std::size_t code = 0, bit = 0;
    for (int k : state.flat_assignments()) code |= static_cast<std::size_t>(k) << bit++;
    freq[code] += 1.0 / samples;
  }
  const double tv = total_variation(exact, freq);
  const double top = *std::max_element(exact.begin(), exact.end());
  return pass_if(tv <= 0.05, std::to_string(states) + " labelings, " + std::to_string(samples) +
                                 " samples, TV = " + fmt(tv) + " (largest exact mass " + fmt(top, 3) + ")");
}

Hyperparams enumeration_hyper() {
  Hyperparams h = Hyperparams::defaults(2, 2);
  h.kappa = 1.0;
  h.nu = 3.0;
  h.alpha = 1.0;
  h.dof_mode = DofMode::DimensionCorrected;
  return h;
}

Outcome gmm_enumeration() {
  std::mt19937_64 rng(5);
  Eigen::MatrixXd pts = normal_matrix(2, 6, rng, 0.8);
  for (int c = 3; c < 6; ++c) pts(0, c) += 1.5;
  const VectorSet v({"a", "b"}, {3, 3}, pts);
  return enumeration_check(v, enumeration_hyper(), Model::Gmm,
                           [&](SamplerState& s) { gibbs_sweep_gmm(s, v); });
}

Outcome ctx_enumeration() {
  std::mt19937_64 rng(6);
  Eigen::MatrixXd pts = normal_matrix(2, 5, rng, 0.8);
  pts(1, 2) += 1.5;
  pts(1, 3) += 1.5;
  const VectorSet v({"a"}, {5}, pts);
  return enumeration_check(v, enumeration_hyper(), Model::Ctx, [&](SamplerState& s) {
    gibbs_sweep_ctx(s, v, ConditionalMode::ExactCollapsed);
  });
}

SynthData recovery_data(std::uint64_t seed) {
  SynthConfig c;
  c.K = 5;
  c.M = 10;
  c.dialogues = 20;
  c.min_length = c.max_length = 50;
  c.seed = seed;
  c.explicit_params = separated_params(5, 10, 10.0, 0.6);
  return generate(c);
}

// Best of `chains` independent runs by final collapsed log joint.
std::vector<std::vector<int>> best_of_chains(const VectorSet& v, SamplerConfig c, const Hyperparams& h,
                                             std::uint64_t seed, int chains) {
  double best = -std::numeric_limits<double>::infinity();
  std::vector<std::vector<int>> out;
  for (int k = 0; k < chains; ++k) {
    c.seed = seed * 100 + static_cast<std::uint64_t>(k);
    auto r = run(v, c, h);
    const double lj = collapsed_log_joint(r.state, v, c.model);
    if (lj > best) {
      best = lj;
      out = std::move(r.state.assignments);
    }
  }
  return out;
}

Outcome synthetic_recovery() {
  const Hyperparams h = Hyperparams::defaults(5, 10);
  const int chains = 4;
  int ctx_reached = 0, ctx_not_worse = 0, single_reached = 0;
  std::string per_seed;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto data = recovery_data(seed);
    SamplerConfig c;
    c.sweeps = 200;
    c.trace_every = 0;
    c.model = Model::Ctx;
    const double ctx = v1_against(data.states, best_of_chains(data.vectors, c, h, seed, chains));
    c.seed = seed;
    single_reached += v1_against(data.states, run(data.vectors, c, h).state.assignments) >= 0.95;
    c.model = Model::Gmm;
    const double gmm = v1_against(data.states, best_of_chains(data.vectors, c, h, seed, chains));
    ctx_reached += ctx >= 0.95;
    ctx_not_worse += ctx >= gmm;
    per_seed += fmt(ctx, 3) + "/" + fmt(gmm, 3) + " ";
  }
  return pass_if(ctx_reached == 10 && ctx_not_worse >= 8,
                 "best of " + std::to_string(chains) + " chains by log joint: ctx V1 >= 0.95 on " +
                     std::to_string(ctx_reached) + "/10 seeds, ctx >= gmm on " + std::to_string(ctx_not_worse) +
                     "/10 (ctx/gmm V1: " + per_seed + "); single chain reaches 0.95 on " +
                     std::to_string(single_reached) + "/10");
}

Outcome metrics_golden() {
  bool ok = true;
  const std::vector<std::string> gold{"A", "B", "B", "C", "A", "C", "C"};
  const auto maj = evaluate(gold, std::vector<std::string>(gold.size(), "0"));
  ok = ok && maj.CO == 1.0 && maj.CM == 1.0 && maj.HO == 0.0 && maj.V1 == 0.0;
  std::vector<std::string> distinct;
  for (std::size_t i = 0; i < gold.size(); ++i) distinct.push_back(std::to_string(i));
  const auto dis = evaluate(gold, distinct);
  ok = ok && dis.PU == 1.0 && dis.HO == 1.0;
  const auto perfect = evaluate({"A", "A", "B", "B"}, {"1", "1", "2", "2"});
  ok = ok && perfect.PU == 1.0 && perfect.CO == 1.0 && perfect.F1 == 1.0 && perfect.V1 == 1.0;
  const auto crossed = evaluate({"A", "A", "B", "B"}, {"1", "2", "1", "2"});
  ok = ok && crossed.PU == 0.5 && crossed.CO == 0.5 && crossed.F1 == 0.5 && crossed.HO == 0.0 && crossed.CM == 0.0 &&
       crossed.V1 == 0.0;
  return pass_if(ok, "majority " + maj.to_json() + "; distinct " + dis.to_json() + "; crossed " + crossed.to_json());
}

Outcome cholesky_fast_path() {
  std::mt19937_64 rng(77);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const int m = 1 + static_cast<int>(rng() % 20);
    const Eigen::MatrixXd A = random_spd(m, rng);
    const Eigen::VectorXd x = normal_matrix(m, 1, rng).col(0);
    const Eigen::MatrixXd L = A.llt().matrixL();
    const Eigen::MatrixXd up_ref = (A + x * x.transpose()).llt().matrixL();
    const Eigen::MatrixXd up = chol_update(L, x, +1);
    worst = std::max(worst, (up - up_ref).norm() / up_ref.norm());
    const Eigen::MatrixXd down = chol_update(up_ref, x, -1);
    worst = std::max(worst, (down - L).norm() / L.norm());
  }

  const auto data = recovery_data(1);
  const Hyperparams h = Hyperparams::defaults(5, 10);
  SamplerConfig c;
  c.sweeps = 50;
  c.trace_every = 0;
  c.fast_cholesky = true;
  const auto fast = run(data.vectors, c, h);
  c.fast_cholesky = false;
  const auto slow = run(data.vectors, c, h);
  std::string sampler;
  bool sampler_ok;
  if (fast.state.cholesky_fallbacks == 0) {
    sampler_ok = fast.state.assignments == slow.state.assignments;
    sampler = sampler_ok ? "fast/refactor assignments identical" : "fast/refactor assignments differ";
  } else {
    const double a = v1_against(data.states, fast.state.assignments);
    const double b = v1_against(data.states, slow.state.assignments);
    sampler_ok = a >= 0.95 && b >= 0.95;
    sampler = std::to_string(fast.state.cholesky_fallbacks) + " fallbacks; V1 fast " + fmt(a) + ", refactor " + fmt(b);
  }
  return pass_if(worst <= 1e-8 && sampler_ok,
                 "1000 SPD matrices, max relative error " + fmt(worst, 3) + "; " + sampler);
}

Outcome reproduction() {
  const char* corpus = std::getenv("DAI_REPRO_CORPUS");
  const char* embeddings = std::getenv("DAI_REPRO_EMBEDDINGS");
  if (!corpus || !embeddings)
    return {Outcome::Skip, "set DAI_REPRO_CORPUS and DAI_REPRO_EMBEDDINGS (optional DAI_REPRO_SPLIT) to run"};
  const char* split = std::getenv("DAI_REPRO_SPLIT");
  auto dir = scratch("reproduction");
  std::map<std::string, nlohmann::json> m;
  for (std::string model : {"ctx", "gmm"}) {
    std::vector<std::string> args{"train", "--model", model, "--corpus", corpus, "--embeddings", embeddings,
                                  "--out-dir", (dir / model).string(), "--trace-every", "0"};
    if (split) args.insert(args.end(), {"--split-file", split});
    if (cli::run(args) != 0) return {Outcome::Fail, "train " + model + " failed"};
    m[model] = nlohmann::json::parse(slurp(dir / model / "metrics.json"));
  }
  const double ctx_f1 = m["ctx"]["F1"], ctx_v1 = m["ctx"]["V1"], gmm_f1 = m["gmm"]["F1"];
  return pass_if(std::abs(ctx_f1 - 65.7) <= 3.0 && std::abs(ctx_v1 - 41.2) <= 3.0 && std::abs(gmm_f1 - 63.5) <= 3.0,
                 "ctx F1 " + fmt(ctx_f1) + " V1 " + fmt(ctx_v1) + "; gmm F1 " + fmt(gmm_f1));
}

Outcome determinism() {
  auto dir = scratch("determinism");
  if (cli::run({"synth", "--k", "4", "--dim", "5", "--dialogues", "6", "--min-len", "5", "--max-len", "15",
                "--separation", "4", "--seed", "3", "--out-dir", (dir / "data").string()}) != 0)
    return {Outcome::Fail, "synth failed"};
  std::string detail;
  bool ok = true;
  for (std::string model : {"ctx", "gmm", "kmeans"}) {
    std::vector<std::string> outputs;
    for (int rep = 0; rep < 2; ++rep) {
      const auto out = dir / (model + std::to_string(rep));
      if (cli::run({"train", "--model", model, "--k", "4", "--sweeps", "30", "--seed", "9", "--corpus",
                    (dir / "data" / "corpus.jsonl").string(), "--vectors", (dir / "data" / "vectors.tsv").string(),
                    "--out-dir", out.string()}) != 0)
        return {Outcome::Fail, "train " + model + " failed"};
      outputs.push_back(slurp(out / "assignments.tsv"));
    }
    const bool same = !outputs[0].empty() && outputs[0] == outputs[1];
    ok = ok && same;
    detail += model + (same ? " identical; " : " differs; ");
  }
  return pass_if(ok, detail);
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
      {1, conjugacy_oracle}, {2, density_normalization}, {3, gmm_enumeration},
      {4, ctx_enumeration},  {5, synthetic_recovery},    {6, metrics_golden},
      {7, cholesky_fast_path}, {8, reproduction},        {9, determinism}};
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& [id, fn] : criteria) {
    if (!wanted.empty() && !wanted.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {Outcome::Fail, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const char* tag = o.status == Outcome::Pass ? "PASS" : o.status == Outcome::Fail ? "FAIL" : "SKIP";
    failures += o.status == Outcome::Fail;
    std::cout << "criterion " << id << ": " << tag << " - " << o.detail << " (" << fmt(secs, 3) << "s)" << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
