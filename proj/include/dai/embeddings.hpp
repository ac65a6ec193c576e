#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "dai/corpus.hpp"

namespace dai {

/// Pretrained word vectors, all of dimension `dim()`.
class EmbeddingTable {
 public:
  explicit EmbeddingTable(int dim) : dim_(dim) {}

  int dim() const { return dim_; }
  std::size_t size() const { return index_.size(); }

  /// Inserts unless the token is already present. Returns false on duplicate.
  bool insert(const std::string& token, const Eigen::VectorXd& v);
  const double* find(const std::string& token) const;

 private:
  int dim_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<double> data_;
};

/// Standard GloVe text format: token followed by M floats per line, no
/// header. M is taken from the first line unless `expected_dim` is given.
/// Duplicate tokens keep their first occurrence.
EmbeddingTable load_embeddings(const std::filesystem::path& path,
                               std::optional<int> expected_dim = std::nullopt);

/// One M-dimensional vector per utterance, stored column-wise and grouped by
/// dialogue. Column `offset(j) + i` belongs to utterance i of dialogue j.
class VectorSet {
 public:
  VectorSet() = default;
  VectorSet(std::vector<std::string> dialogue_ids, std::vector<std::size_t> lengths,
            Eigen::MatrixXd data);

  int dim() const { return static_cast<int>(data_.rows()); }
  std::size_t num_dialogues() const { return ids_.size(); }
  std::size_t num_vectors() const { return static_cast<std::size_t>(data_.cols()); }
  std::size_t length(std::size_t j) const { return offsets_[j + 1] - offsets_[j]; }
  std::size_t offset(std::size_t j) const { return offsets_[j]; }
  const std::string& dialogue_id(std::size_t j) const { return ids_[j]; }
  const std::vector<std::string>& dialogue_ids() const { return ids_; }

  auto at(std::size_t j, std::size_t i) const { return data_.col(static_cast<Eigen::Index>(offsets_[j] + i)); }
  auto column(std::size_t flat) const { return data_.col(static_cast<Eigen::Index>(flat)); }
  const Eigen::MatrixXd& matrix() const { return data_; }

  /// Keeps the flagged dialogues, preserving order.
  VectorSet subset(const std::vector<bool>& keep) const;

 private:
  std::vector<std::string> ids_;
  std::vector<std::size_t> offsets_{0};
  Eigen::MatrixXd data_;
};

/// IDF-weighted mean of the word vectors of tokens present in both tables.
/// Repeated tokens contribute once per occurrence. Zero vector when nothing
/// qualifies.
Eigen::VectorXd compose_utterance(const std::vector<std::string>& tokens,
                                  const EmbeddingTable& table, const IdfTable& idf);

struct VectorizeResult {
  VectorSet vectors;
  std::size_t oov_utterances = 0;
};

VectorizeResult vectorize_corpus(const Corpus& corpus, const EmbeddingTable& table,
                                 const IdfTable& idf);

/// Vectors file: dialogue_id TAB utterance_index TAB v_1 ... TAB v_M, one row
/// per utterance in corpus order. Values are written with round-trip precision.
void write_vectors(const VectorSet& vs, const std::filesystem::path& path);
VectorSet read_vectors(const std::filesystem::path& path);

}  // namespace dai
