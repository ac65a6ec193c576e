#include "dai/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "dai/errors.hpp"

namespace dai {

using nlohmann::json;

Corpus::Corpus(std::vector<Dialogue> dialogues) : dialogues_(std::move(dialogues)) {
  for (std::size_t j = 0; j < dialogues_.size(); ++j) {
    const auto& d = dialogues_[j];
    if (d.utterances.empty())
      throw std::invalid_argument("dialogue '" + d.id + "' has no utterances");
    if (!index_.emplace(d.id, j).second)
      throw std::invalid_argument("duplicate dialogue id '" + d.id + "'");
    num_utterances_ += d.utterances.size();
    for (const auto& u : d.utterances) {
      if (u.gold_label) label_set_.insert(*u.gold_label);
    }
  }
}

std::optional<std::size_t> Corpus::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Corpus Corpus::subset(const std::vector<bool>& keep) const {
  std::vector<Dialogue> out;
  for (std::size_t j = 0; j < dialogues_.size(); ++j) {
    if (j < keep.size() && keep[j]) out.push_back(dialogues_[j]);
  }
  return Corpus(std::move(out));
}

namespace {

bool is_ascii_punct(unsigned char c) { return c < 128 && std::ispunct(c); }

Utterance make_utterance(std::string text, std::optional<std::string> label) {
  Utterance u;
  u.tokens = tokenize(text);
  u.text = std::move(text);
  u.gold_label = std::move(label);
  return u;
}

std::optional<std::string> read_label(const json& rec, std::size_t line) {
  auto it = rec.find("gold_label");
  if (it == rec.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw ParseError("gold_label must be a string or null", line);
  auto s = it->get<std::string>();
  if (s.empty()) throw ParseError("gold_label must be non-empty when present", line);
  return s;
}

Corpus parse_jsonl(std::string_view content) {
  std::vector<Dialogue> dialogues;
  std::map<std::string, std::size_t> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= content.size()) {
    std::size_t end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); }))
      continue;

    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
    }
    if (!rec.is_object()) throw ParseError("record is not a JSON object", line_no);
    auto id_it = rec.find("dialogue_id");
    if (id_it == rec.end() || !id_it->is_string())
      throw ParseError("missing string field 'dialogue_id'", line_no);
    auto utt_it = rec.find("utterances");
    if (utt_it == rec.end() || !utt_it->is_array())
      throw ParseError("missing array field 'utterances'", line_no);
    if (utt_it->empty()) throw ParseError("dialogue has no utterances", line_no);

    Dialogue d;
    d.id = id_it->get<std::string>();
    if (!seen.emplace(d.id, line_no).second)
      throw ParseError("duplicate dialogue id '" + d.id + "'", line_no);
    for (const auto& u : *utt_it) {
      if (!u.is_object()) throw ParseError("utterance is not a JSON object", line_no);
      auto text_it = u.find("text");
      if (text_it == u.end() || !text_it->is_string())
        throw ParseError("utterance missing string field 'text'", line_no);
      d.utterances.push_back(make_utterance(text_it->get<std::string>(), read_label(u, line_no)));
    }
    dialogues.push_back(std::move(d));
    if (end == content.size()) break;
  }
  if (dialogues.empty()) throw ParseError("empty corpus");
  return Corpus(std::move(dialogues));
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return fields;
}

Corpus parse_tsv(std::string_view content) {
  struct Pending {
    std::string id;
    std::map<long, Utterance> utts;
  };
  std::vector<Pending> pending;
  std::map<std::string, std::size_t> by_id;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    std::size_t end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;

    auto f = split_tabs(line);
    if (f.size() != 4)
      throw ParseError("expected 4 tab-separated fields, got " + std::to_string(f.size()), line_no);
    if (f[0].empty()) throw ParseError("empty dialogue_id", line_no);
    long index = 0;
    try {
      std::size_t used = 0;
      index = std::stol(std::string(f[1]), &used);
      if (used != f[1].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParseError("utterance_index is not an integer", line_no);
    }
    std::optional<std::string> label;
    if (!f[2].empty()) label = std::string(f[2]);

    std::string id(f[0]);
    auto [it, inserted] = by_id.emplace(id, pending.size());
    if (inserted) pending.push_back({id, {}});
    auto& p = pending[it->second];
    if (!p.utts.emplace(index, make_utterance(std::string(f[3]), std::move(label))).second)
      throw ParseError("duplicate utterance_index in dialogue '" + id + "'", line_no);
  }
  if (pending.empty()) throw ParseError("empty corpus");
  std::vector<Dialogue> dialogues;
  for (auto& p : pending) {
    Dialogue d;
    d.id = std::move(p.id);
    for (auto& [_, u] : p.utts) d.utterances.push_back(std::move(u));
    dialogues.push_back(std::move(d));
  }
  return Corpus(std::move(dialogues));
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t stop = i;
    while (start < stop && is_ascii_punct(static_cast<unsigned char>(text[start]))) ++start;
    while (stop > start && is_ascii_punct(static_cast<unsigned char>(text[stop - 1]))) --stop;
    if (start == stop) continue;
    std::string tok(text.substr(start, stop - start));
    for (auto& c : tok) {
      auto uc = static_cast<unsigned char>(c);
      if (uc < 128) c = static_cast<char>(std::tolower(uc));
    }
    tokens.push_back(std::move(tok));
  }
  return tokens;
}

Corpus parse_corpus(std::string_view content, bool tsv) {
  return tsv ? parse_tsv(content) : parse_jsonl(content);
}

Corpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open corpus file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_corpus(ss.str(), path.extension() == ".tsv");
}

void write_corpus_jsonl(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  for (const auto& d : corpus.dialogues()) {
    json rec;
    rec["dialogue_id"] = d.id;
    json utts = json::array();
    for (const auto& u : d.utterances) {
      json ju;
      ju["text"] = u.text;
      ju["gold_label"] = u.gold_label ? json(*u.gold_label) : json(nullptr);
      utts.push_back(std::move(ju));
    }
    rec["utterances"] = std::move(utts);
    out << rec.dump() << '\n';
  }
}

IdfTable::IdfTable(std::unordered_map<std::string, double> weights, std::size_t n_docs)
    : weights_(std::move(weights)), n_docs_(n_docs) {
  for (const auto& [tok, w] : weights_) {
    if (!(w > 0.0)) throw std::invalid_argument("idf weight for '" + tok + "' must be > 0");
  }
}

std::optional<double> IdfTable::get(const std::string& token) const {
  auto it = weights_.find(token);
  if (it == weights_.end()) return std::nullopt;
  return it->second;
}

IdfTable IdfTable::scaled(double c) const {
  IdfTable out = *this;
  for (auto& [_, w] : out.weights_) w *= c;
  return out;
}

IdfTable compute_idf(const Corpus& corpus) {
  if (corpus.num_utterances() == 0) throw std::invalid_argument("compute_idf: empty corpus");
  std::unordered_map<std::string, std::size_t> df;
  for (const auto& d : corpus.dialogues()) {
    for (const auto& u : d.utterances) {
      std::vector<std::string_view> uniq(u.tokens.begin(), u.tokens.end());
      std::sort(uniq.begin(), uniq.end());
      uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
      for (auto t : uniq) ++df[std::string(t)];
    }
  }
  IdfTable table;
  table.n_docs_ = corpus.num_utterances();
  const double n = static_cast<double>(table.n_docs_);
  for (const auto& [tok, count] : df) {
    table.weights_.emplace(tok, std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
  }
  return table;
}

}  // namespace dai
