#include "dai/embeddings.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dai/errors.hpp"

namespace dai {

bool EmbeddingTable::insert(const std::string& token, const Eigen::VectorXd& v) {
  if (v.size() != dim_) throw std::invalid_argument("embedding dimension mismatch for '" + token + "'");
  auto [it, inserted] = index_.emplace(token, data_.size() / static_cast<std::size_t>(dim_));
  if (!inserted) return false;
  data_.insert(data_.end(), v.data(), v.data() + dim_);
  return true;
}

const double* EmbeddingTable::find(const std::string& token) const {
  auto it = index_.find(token);
  if (it == index_.end()) return nullptr;
  return data_.data() + it->second * static_cast<std::size_t>(dim_);
}

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

// Splits on runs of spaces/tabs.
void split_fields(std::string_view line, std::vector<std::string_view>& out) {
  out.clear();
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    std::size_t s = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    if (i > s) out.push_back(line.substr(s, i - s));
  }
}

bool parse_double(std::string_view s, double& out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size() && std::isfinite(out);
}

}  // namespace

EmbeddingTable load_embeddings(const std::filesystem::path& path, std::optional<int> expected_dim) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open embeddings file '" + path.string() + "'");

  std::optional<EmbeddingTable> table;
  std::string line;
  std::vector<std::string_view> fields;
  Eigen::VectorXd v;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    split_fields(line, fields);
    if (fields.empty()) continue;
    const int m = static_cast<int>(fields.size()) - 1;
    if (!table) {
      if (m < 1) throw ParseError("embedding line has no values", line_no);
      if (expected_dim && *expected_dim != m)
        throw ParseError("expected dimension " + std::to_string(*expected_dim) + ", found " +
                             std::to_string(m),
                         line_no);
      table.emplace(m);
      v.resize(m);
    } else if (m != table->dim()) {
      throw ParseError("inconsistent dimension: expected " + std::to_string(table->dim()) +
                           ", found " + std::to_string(m),
                       line_no);
    }
    for (int d = 0; d < m; ++d) {
      if (!parse_double(fields[static_cast<std::size_t>(d) + 1], v[d]))
        throw ParseError("invalid float value", line_no);
    }
    table->insert(std::string(fields[0]), v);
  }
  if (!table) throw ParseError("empty embeddings file '" + path.string() + "'");
  return std::move(*table);
}

VectorSet::VectorSet(std::vector<std::string> dialogue_ids, std::vector<std::size_t> lengths,
                     Eigen::MatrixXd data)
    : ids_(std::move(dialogue_ids)), data_(std::move(data)) {
  if (ids_.size() != lengths.size()) throw std::invalid_argument("VectorSet: ids/lengths mismatch");
  for (auto n : lengths) offsets_.push_back(offsets_.back() + n);
  if (offsets_.back() != static_cast<std::size_t>(data_.cols()))
    throw std::invalid_argument("VectorSet: lengths do not match column count");
  if (!data_.allFinite()) throw std::invalid_argument("VectorSet: non-finite entries");
}

VectorSet VectorSet::subset(const std::vector<bool>& keep) const {
  std::vector<std::string> ids;
  std::vector<std::size_t> lengths;
  std::size_t total = 0;
  for (std::size_t j = 0; j < ids_.size(); ++j) {
    if (j < keep.size() && keep[j]) {
      ids.push_back(ids_[j]);
      lengths.push_back(length(j));
      total += length(j);
    }
  }
  Eigen::MatrixXd data(data_.rows(), static_cast<Eigen::Index>(total));
  Eigen::Index c = 0;
  for (std::size_t j = 0; j < ids_.size(); ++j) {
    if (j < keep.size() && keep[j]) {
      auto n = static_cast<Eigen::Index>(length(j));
      data.middleCols(c, n) = data_.middleCols(static_cast<Eigen::Index>(offsets_[j]), n);
      c += n;
    }
  }
  return VectorSet(std::move(ids), std::move(lengths), std::move(data));
}

Eigen::VectorXd compose_utterance(const std::vector<std::string>& tokens,
                                  const EmbeddingTable& table, const IdfTable& idf) {
  const int m = table.dim();
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(m);
  double total = 0.0;
  for (const auto& tok : tokens) {
    const double* e = table.find(tok);
    if (!e) continue;
    auto w = idf.get(tok);
    if (!w) continue;
    acc += *w * Eigen::Map<const Eigen::VectorXd>(e, m);
    total += *w;
  }
  if (total > 0.0) acc /= total;
  return acc;
}

VectorizeResult vectorize_corpus(const Corpus& corpus, const EmbeddingTable& table,
                                 const IdfTable& idf) {
  std::vector<std::string> ids;
  std::vector<std::size_t> lengths;
  Eigen::MatrixXd data(table.dim(), static_cast<Eigen::Index>(corpus.num_utterances()));
  std::size_t oov = 0;
  Eigen::Index c = 0;
  for (const auto& d : corpus.dialogues()) {
    ids.push_back(d.id);
    lengths.push_back(d.utterances.size());
    for (const auto& u : d.utterances) {
      bool any = false;
      for (const auto& t : u.tokens) {
        if (table.find(t) && idf.get(t)) {
          any = true;
          break;
        }
      }
      if (!any) ++oov;
      data.col(c++) = compose_utterance(u.tokens, table, idf);
    }
  }
  return {VectorSet(std::move(ids), std::move(lengths), std::move(data)), oov};
}

void write_vectors(const VectorSet& vs, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  char buf[64];
  for (std::size_t j = 0; j < vs.num_dialogues(); ++j) {
    for (std::size_t i = 0; i < vs.length(j); ++i) {
      out << vs.dialogue_id(j) << '\t' << i;
      auto col = vs.at(j, i);
      for (Eigen::Index d = 0; d < col.size(); ++d) {
        std::snprintf(buf, sizeof buf, "%.17g", col[d]);
        out << '\t' << buf;
      }
      out << '\n';
    }
  }
}

VectorSet read_vectors(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open vectors file '" + path.string() + "'");
  std::vector<std::string> ids;
  std::vector<std::size_t> lengths;
  std::vector<double> values;
  int dim = -1;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string_view> f;
    std::string_view sv(line);
    std::size_t s = 0;
    while (true) {
      auto t = sv.find('\t', s);
      f.push_back(sv.substr(s, t == std::string_view::npos ? std::string_view::npos : t - s));
      if (t == std::string_view::npos) break;
      s = t + 1;
    }
    if (f.size() < 3) throw ParseError("vectors row needs id, index and at least one value", line_no);
    const int m = static_cast<int>(f.size()) - 2;
    if (dim < 0) dim = m;
    if (m != dim) throw ParseError("inconsistent vector dimension", line_no);
    std::size_t index = 0;
    auto [p, ec] = std::from_chars(f[1].data(), f[1].data() + f[1].size(), index);
    if (ec != std::errc() || p != f[1].data() + f[1].size())
      throw ParseError("invalid utterance index", line_no);
    if (ids.empty() || ids.back() != f[0]) {
      ids.emplace_back(f[0]);
      lengths.push_back(0);
    }
    if (index != lengths.back())
      throw ParseError("utterance indices must be contiguous from 0 within a dialogue", line_no);
    ++lengths.back();
    for (int d = 0; d < m; ++d) {
      double x;
      if (!parse_double(f[static_cast<std::size_t>(d) + 2], x)) throw ParseError("invalid float value", line_no);
      values.push_back(x);
    }
  }
  if (ids.empty()) throw ParseError("empty vectors file '" + path.string() + "'");
  Eigen::MatrixXd data =
      Eigen::Map<Eigen::MatrixXd>(values.data(), dim, static_cast<Eigen::Index>(values.size() / static_cast<std::size_t>(dim)));
  return VectorSet(std::move(ids), std::move(lengths), std::move(data));
}

}  // namespace dai
