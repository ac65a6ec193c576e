#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace dai {

struct Utterance {
  std::string text;
  std::vector<std::string> tokens;
  std::optional<std::string> gold_label;
};

struct Dialogue {
  std::string id;
  std::vector<Utterance> utterances;
};

/// Ordered dialogues of tokenized utterances. Immutable once built.
class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(std::vector<Dialogue> dialogues);

  const std::vector<Dialogue>& dialogues() const { return dialogues_; }
  std::size_t size() const { return dialogues_.size(); }
  const Dialogue& operator[](std::size_t j) const { return dialogues_[j]; }

  /// Total utterance count N.
  std::size_t num_utterances() const { return num_utterances_; }
  const std::set<std::string>& label_set() const { return label_set_; }
  bool empty() const { return dialogues_.empty(); }

  /// Index of a dialogue by id, if present.
  std::optional<std::size_t> find(std::string_view id) const;

  /// Sub-corpus holding the listed dialogues, in corpus order.
  Corpus subset(const std::vector<bool>& keep) const;

 private:
  std::vector<Dialogue> dialogues_;
  std::size_t num_utterances_ = 0;
  std::set<std::string> label_set_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Lowercase, split on whitespace, strip leading/trailing ASCII punctuation,
/// drop empty tokens.
std::vector<std::string> tokenize(std::string_view text);

/// Reads the JSON-lines corpus format, or the TSV variant when the extension
/// is `.tsv`. Throws ParseError (with line number) on malformed records and on
/// an empty file.
Corpus load_corpus(const std::filesystem::path& path);

/// Parses corpus text directly. `tsv` selects the tab-separated layout.
Corpus parse_corpus(std::string_view content, bool tsv = false);

/// Writes the JSON-lines format.
void write_corpus_jsonl(const Corpus& corpus, const std::filesystem::path& path);

class IdfTable {
 public:
  IdfTable() = default;
  /// Explicit weights; every weight must be > 0.
  IdfTable(std::unordered_map<std::string, double> weights, std::size_t n_docs);

  /// Returns the weight, or nullopt for tokens never seen.
  std::optional<double> get(const std::string& token) const;
  std::size_t n_docs() const { return n_docs_; }
  std::size_t size() const { return weights_.size(); }
  const std::unordered_map<std::string, double>& weights() const { return weights_; }

  /// Multiplies every weight by `c` (c > 0).
  IdfTable scaled(double c) const;

 private:
  friend IdfTable compute_idf(const Corpus&);
  std::unordered_map<std::string, double> weights_;
  std::size_t n_docs_ = 0;
};

/// idf(w) = ln((1 + N) / (1 + df(w))) + 1 where df counts utterances
/// containing w and N is the utterance count.
IdfTable compute_idf(const Corpus& corpus);

}  // namespace dai
