#include "dai/synth.hpp"

#include <cmath>
#include <random>

#include <json.hpp>

#include "dai/errors.hpp"

namespace dai {

using nlohmann::json;

namespace {

Eigen::VectorXd standard_normal(int m, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd z(m);
  for (int d = 0; d < m; ++d) z[d] = normal(rng);
  return z;
}

Eigen::VectorXd sample_dirichlet(int k, double alpha, Rng& rng) {
  std::gamma_distribution<double> gamma(alpha, 1.0);
  Eigen::VectorXd x(k);
  for (int i = 0; i < k; ++i) x[i] = gamma(rng);
  const double s = x.sum();
  if (s > 0.0) return x / s;
  // All draws underflowed (tiny alpha): put the mass on one coordinate.
  x.setZero();
  x[static_cast<Eigen::Index>(uniform_index(rng, static_cast<std::uint64_t>(k)))] = 1.0;
  return x;
}

int sample_discrete(const Eigen::Ref<const Eigen::VectorXd>& p, Rng& rng) {
  const double u = uniform01(rng) * p.sum();
  double acc = 0.0;
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    acc += p[k];
    if (u < acc) return static_cast<int>(k);
  }
  return static_cast<int>(p.size()) - 1;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Eigen::MatrixXd json_matrix(const json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("expected a non-empty matrix");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.front().size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) throw ConfigError("ragged matrix");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

Eigen::VectorXd json_vector(const json& j) {
  if (!j.is_array()) throw ConfigError("expected an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

}  // namespace

void GeneratingParams::validate() const {
  const int k = K();
  const int m = M();
  if (k < 1) throw ConfigError("generating parameters need at least one state");
  if (static_cast<int>(covariances.size()) != k) throw ConfigError("need one covariance per state");
  if (transition.rows() != k || transition.cols() != k) throw ConfigError("transition matrix must be K x K");
  if (start.size() != k) throw ConfigError("start distribution must have K entries");
  for (int s = 0; s < k; ++s) {
    const auto& mu = means[static_cast<std::size_t>(s)];
    const auto& cov = covariances[static_cast<std::size_t>(s)];
    if (mu.size() != m) throw ConfigError("all means must have the same dimension");
    if (cov.rows() != m || cov.cols() != m) throw ConfigError("covariance " + std::to_string(s) + " must be M x M");
    if (!cov.isApprox(cov.transpose(), 1e-12)) throw ConfigError("covariance " + std::to_string(s) + " is not symmetric");
    if (Eigen::LLT<Eigen::MatrixXd>(cov).info() != Eigen::Success)
      throw ConfigError("covariance " + std::to_string(s) + " is not positive definite");
    if ((transition.row(s).array() < 0.0).any() || std::abs(transition.row(s).sum() - 1.0) > 1e-9)
      throw ConfigError("transition row " + std::to_string(s) + " is not a probability distribution");
  }
  if ((start.array() < 0.0).any() || std::abs(start.sum() - 1.0) > 1e-9)
    throw ConfigError("start distribution does not sum to one");
}

std::string GeneratingParams::to_json() const {
  json j;
  j["K"] = K();
  j["M"] = M();
  json ms = json::array(), cs = json::array();
  for (const auto& m : means) ms.push_back(vector_json(m));
  for (const auto& c : covariances) cs.push_back(matrix_json(c));
  j["means"] = std::move(ms);
  j["covariances"] = std::move(cs);
  j["transition"] = matrix_json(transition);
  j["start"] = vector_json(start);
  return j.dump(2);
}

GeneratingParams GeneratingParams::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid parameters JSON: ") + e.what());
  }
  GeneratingParams p;
  try {
    for (const auto& m : j.at("means")) p.means.push_back(json_vector(m));
    for (const auto& c : j.at("covariances")) p.covariances.push_back(json_matrix(c));
    p.transition = json_matrix(j.at("transition"));
    p.start = json_vector(j.at("start"));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid parameters JSON: ") + e.what());
  }
  p.validate();
  return p;
}

Eigen::MatrixXd sample_inverse_wishart(const Eigen::MatrixXd& psi, double nu, Rng& rng) {
  const auto m = psi.rows();
  if (!(nu > static_cast<double>(m) - 1.0))
    throw ConfigError("inverse-Wishart draw requires nu > M - 1 (nu=" + std::to_string(nu) + ", M=" +
                      std::to_string(m) + ")");
  // Sigma^-1 ~ Wishart(psi^-1, nu) = L A Aᵀ Lᵀ with L = chol(psi^-1).
  const Eigen::MatrixXd psi_inv = psi.llt().solve(Eigen::MatrixXd::Identity(m, m));
  const Eigen::MatrixXd L = psi_inv.llt().matrixL();
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    std::chi_squared_distribution<double> chi2(nu - static_cast<double>(i));
    A(i, i) = std::sqrt(chi2(rng));
    for (Eigen::Index c = 0; c < i; ++c) A(i, c) = normal(rng);
  }
  const Eigen::MatrixXd LA = L * A;
  const Eigen::MatrixXd W = LA * LA.transpose();
  Eigen::MatrixXd sigma = W.llt().solve(Eigen::MatrixXd::Identity(m, m));
  return 0.5 * (sigma + sigma.transpose());
}

GeneratingParams sample_params_from_prior(const Hyperparams& h, Rng& rng) {
  if (!(h.kappa > 0.0)) throw ConfigError("sampling means from the prior requires kappa > 0");
  GeneratingParams p;
  p.transition.resize(h.K, h.K);
  for (int k = 0; k < h.K; ++k) {
    Eigen::MatrixXd sigma = sample_inverse_wishart(h.psi, h.nu, rng);
    const Eigen::MatrixXd L = (sigma / h.kappa).llt().matrixL();
    p.means.push_back(h.mu0 + L * standard_normal(h.M, rng));
    p.covariances.push_back(std::move(sigma));
    p.transition.row(k) = sample_dirichlet(h.K, h.alpha, rng).transpose();
  }
  p.start = sample_dirichlet(h.K, h.alpha, rng);
  return p;
}

GeneratingParams separated_params(int K, int M, double separation, double self_prob) {
  if (M < K) throw ConfigError("separated parameters need M >= K");
  if (!(self_prob >= 0.0 && self_prob <= 1.0)) throw ConfigError("self_prob must lie in [0, 1]");
  GeneratingParams p;
  for (int k = 0; k < K; ++k) {
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(M);
    mu[k] = separation;
    p.means.push_back(std::move(mu));
    p.covariances.push_back(Eigen::MatrixXd::Identity(M, M));
  }
  const double off = K > 1 ? (1.0 - self_prob) / (K - 1) : 0.0;
  p.transition = Eigen::MatrixXd::Constant(K, K, off);
  p.transition.diagonal().setConstant(K > 1 ? self_prob : 1.0);
  p.start = Eigen::VectorXd::Constant(K, 1.0 / K);
  return p;
}

SynthData generate(const SynthConfig& config) {
  if (config.dialogues < 1) throw ConfigError("dialogue count must be >= 1");
  if (config.min_length < 1 || config.max_length < config.min_length)
    throw ConfigError("dialogue lengths must satisfy 1 <= min_length <= max_length");
  Rng rng(config.seed);
  SynthData out;
  if (config.explicit_params) {
    out.params = *config.explicit_params;
  } else {
    if (!config.prior) throw ConfigError("synth needs explicit parameters or a prior");
    config.prior->validate();
    out.params = sample_params_from_prior(*config.prior, rng);
  }
  out.params.validate();
  const int M = out.params.M();

  std::vector<Eigen::MatrixXd> chol;
  for (const auto& c : out.params.covariances) chol.push_back(c.llt().matrixL());

  std::vector<std::string> ids;
  std::vector<std::size_t> lengths;
  std::vector<Eigen::VectorXd> cols;
  const auto span = static_cast<std::uint64_t>(config.max_length - config.min_length + 1);
  for (int j = 0; j < config.dialogues; ++j) {
    const int len = config.min_length + static_cast<int>(uniform_index(rng, span));
    std::vector<int> states(static_cast<std::size_t>(len));
    int prev = -1;
    for (int i = 0; i < len; ++i) {
      const int s = prev < 0 ? sample_discrete(out.params.start, rng)
                             : sample_discrete(out.params.transition.row(prev).transpose(), rng);
      states[static_cast<std::size_t>(i)] = s;
      cols.push_back(out.params.means[static_cast<std::size_t>(s)] +
                     chol[static_cast<std::size_t>(s)] * standard_normal(M, rng));
      prev = s;
    }
    ids.push_back("synth-" + std::to_string(j));
    lengths.push_back(static_cast<std::size_t>(len));
    out.states.push_back(std::move(states));
  }
  Eigen::MatrixXd data(M, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) data.col(static_cast<Eigen::Index>(c)) = cols[c];
  out.vectors = VectorSet(std::move(ids), std::move(lengths), std::move(data));
  return out;
}

Corpus SynthData::corpus() const {
  std::vector<Dialogue> dialogues;
  for (std::size_t j = 0; j < states.size(); ++j) {
    Dialogue d;
    d.id = vectors.dialogue_id(j);
    for (int s : states[j]) d.utterances.push_back({"", {}, "s" + std::to_string(s)});
    dialogues.push_back(std::move(d));
  }
  return Corpus(std::move(dialogues));
}

}  // namespace dai
