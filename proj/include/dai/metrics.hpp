#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dai {

/// Co-occurrence counts of predicted cluster (rows) and gold class (columns).
struct Contingency {
  std::vector<std::string> clusters;
  std::vector<std::string> classes;
  std::vector<std::vector<std::int64_t>> table;  // [cluster][class]
  std::int64_t N = 0;

  std::int64_t at(std::size_t k, std::size_t c) const { return table[k][c]; }
};

/// Throws std::invalid_argument on length mismatch or empty input.
Contingency contingency(const std::vector<std::string>& gold, const std::vector<std::string>& pred);

struct PurityScores {
  double PU = 0, CO = 0, F1 = 0;
};
struct VMeasureScores {
  double HO = 0, CM = 0, V1 = 0;
};

struct MetricsReport {
  double PU = 0, CO = 0, F1 = 0, HO = 0, CM = 0, V1 = 0;
  /// Six fields as percentages with four decimals.
  std::string to_json() const;
};

PurityScores purity_collocation(const Contingency& ct);

/// Natural-log entropies; HO = 1 when H(C) = 0 and CM = 1 when H(K) = 0.
VMeasureScores v_measure(const Contingency& ct);

MetricsReport evaluate(const std::vector<std::string>& gold, const std::vector<std::string>& pred);

}  // namespace dai
