#include "dai/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

namespace dai {

Contingency contingency(const std::vector<std::string>& gold, const std::vector<std::string>& pred) {
  if (gold.size() != pred.size())
    throw std::invalid_argument("contingency: length mismatch (" + std::to_string(gold.size()) + " gold vs " +
                                std::to_string(pred.size()) + " predicted)");
  if (gold.empty()) throw std::invalid_argument("contingency: empty label sequences");
  std::map<std::string, std::size_t> kidx, cidx;
  for (const auto& p : pred) kidx.emplace(p, 0);
  for (const auto& g : gold) cidx.emplace(g, 0);
  Contingency ct;
  for (auto& [name, i] : kidx) {
    i = ct.clusters.size();
    ct.clusters.push_back(name);
  }
  for (auto& [name, i] : cidx) {
    i = ct.classes.size();
    ct.classes.push_back(name);
  }
  ct.table.assign(ct.clusters.size(), std::vector<std::int64_t>(ct.classes.size(), 0));
  for (std::size_t i = 0; i < gold.size(); ++i) ++ct.table[kidx[pred[i]]][cidx[gold[i]]];
  ct.N = static_cast<std::int64_t>(gold.size());
  return ct;
}

namespace {

double harmonic(double a, double b) { return a + b > 0.0 ? 2.0 * a * b / (a + b) : 0.0; }

double plogp_sum(const std::vector<std::int64_t>& counts, double n) {
  double h = 0.0;
  for (auto c : counts) {
    if (c > 0) {
      const double p = static_cast<double>(c) / n;
      h -= p * std::log(p);
    }
  }
  return h;
}

}  // namespace

PurityScores purity_collocation(const Contingency& ct) {
  const std::size_t nk = ct.clusters.size(), nc = ct.classes.size();
  std::int64_t pu = 0, co = 0;
  for (std::size_t k = 0; k < nk; ++k) pu += *std::max_element(ct.table[k].begin(), ct.table[k].end());
  for (std::size_t c = 0; c < nc; ++c) {
    std::int64_t best = 0;
    for (std::size_t k = 0; k < nk; ++k) best = std::max(best, ct.table[k][c]);
    co += best;
  }
  PurityScores s;
  const double n = static_cast<double>(ct.N);
  s.PU = static_cast<double>(pu) / n;
  s.CO = static_cast<double>(co) / n;
  s.F1 = harmonic(s.PU, s.CO);
  return s;
}

VMeasureScores v_measure(const Contingency& ct) {
  const std::size_t nk = ct.clusters.size(), nc = ct.classes.size();
  const double n = static_cast<double>(ct.N);
  std::vector<std::int64_t> ksum(nk, 0), csum(nc, 0);
  for (std::size_t k = 0; k < nk; ++k) {
    for (std::size_t c = 0; c < nc; ++c) {
      ksum[k] += ct.table[k][c];
      csum[c] += ct.table[k][c];
    }
  }
  const double h_c = plogp_sum(csum, n);
  const double h_k = plogp_sum(ksum, n);
  // H(C|K) and H(K|C) from the joint.
  double h_c_given_k = 0.0, h_k_given_c = 0.0;
  for (std::size_t k = 0; k < nk; ++k) {
    for (std::size_t c = 0; c < nc; ++c) {
      const auto a = ct.table[k][c];
      if (a == 0) continue;
      const double joint = static_cast<double>(a) / n;
      h_c_given_k -= joint * std::log(static_cast<double>(a) / static_cast<double>(ksum[k]));
      h_k_given_c -= joint * std::log(static_cast<double>(a) / static_cast<double>(csum[c]));
    }
  }
  VMeasureScores s;
  s.HO = h_c == 0.0 ? 1.0 : 1.0 - h_c_given_k / h_c;
  s.CM = h_k == 0.0 ? 1.0 : 1.0 - h_k_given_c / h_k;
  s.HO = std::clamp(s.HO, 0.0, 1.0);
  s.CM = std::clamp(s.CM, 0.0, 1.0);
  s.V1 = harmonic(s.HO, s.CM);
  return s;
}

MetricsReport evaluate(const std::vector<std::string>& gold, const std::vector<std::string>& pred) {
  const auto ct = contingency(gold, pred);
  const auto p = purity_collocation(ct);
  const auto v = v_measure(ct);
  return {p.PU, p.CO, p.F1, v.HO, v.CM, v.V1};
}

std::string MetricsReport::to_json() const {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "{\"PU\": %.4f, \"CO\": %.4f, \"F1\": %.4f, \"HO\": %.4f, \"CM\": %.4f, \"V1\": %.4f}",
                100.0 * PU, 100.0 * CO, 100.0 * F1, 100.0 * HO, 100.0 * CM, 100.0 * V1);
  return buf;
}

}  // namespace dai
