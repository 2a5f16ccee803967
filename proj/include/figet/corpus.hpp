#pragma once

// Datasets, pre-trained embeddings and Brown-cluster tables.

#include <algorithm>
#include <array>
#include <charconv>
#include <cstddef>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "figet/error.hpp"
#include "figet/tensor.hpp"

namespace figet {

// Fills context positions that run past the sentence boundary.
inline const std::string kPaddingToken = "<PAD>";
// Fallback row every embedding table must provide.
inline const std::string kUnknownToken = "unk";

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

inline std::optional<double> parse_double(std::string_view s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  return in;
}

}  // namespace detail

// ---------------------------------------------------------------------------

class EmbeddingTable {
 public:
  explicit EmbeddingTable(std::size_t dim = 0) : dim_(dim), zeros_(dim, 0.0) {}

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return rows_.size(); }
  bool contains(const std::string& token) const { return rows_.count(token) != 0; }

  // Adds a row; an existing row for the token is left untouched.
  bool add(const std::string& token, std::span<const double> values) {
    if (values.size() != dim_) {
      throw ShapeError("embedding for '" + token + "' has " + std::to_string(values.size()) +
                       " values, expected " + std::to_string(dim_));
    }
    auto [it, inserted] = rows_.emplace(token, storage_.size() / std::max<std::size_t>(dim_, 1));
    if (inserted) storage_.insert(storage_.end(), values.begin(), values.end());
    return inserted;
  }

  void validate() const {
    if (!contains(kUnknownToken)) throw ValidationError("embedding table has no '" + kUnknownToken + "' row");
  }

  // Total lookup: exact row, zero vector for padding, otherwise the "unk" row.
  std::span<const double> lookup(const std::string& token) const {
    if (token == kPaddingToken) return zeros_;
    auto it = rows_.find(token);
    if (it == rows_.end()) it = rows_.find(kUnknownToken);
    if (it == rows_.end()) throw ValidationError("embedding table has no '" + kUnknownToken + "' row");
    return std::span<const double>(storage_).subspan(it->second * dim_, dim_);
  }

 private:
  std::size_t dim_;
  std::unordered_map<std::string, std::size_t> rows_;
  std::vector<double> storage_;
  std::vector<double> zeros_;
};

inline Tensor embed_token(const EmbeddingTable& table, const std::string& token) {
  auto row = table.lookup(token);
  return Tensor::from(std::vector<double>(row.begin(), row.end()));
}

// Text format: one row per line, token followed by `expected_dim` numbers.
// Case is preserved; the first row for a duplicated token wins.
inline EmbeddingTable load_embedding_table(const std::string& path, std::size_t expected_dim) {
  auto in = detail::open_input(path);
  EmbeddingTable table(expected_dim);
  std::string line;
  std::vector<double> values(expected_dim);
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto fields = detail::split_ws(line);
    if (fields.empty()) continue;
    if (fields.size() != expected_dim + 1) {
      throw FormatError(path, lineno,
                        "expected token and " + std::to_string(expected_dim) + " values, found " +
                            std::to_string(fields.size() - 1) + " values");
    }
    for (std::size_t i = 0; i < expected_dim; ++i) {
      auto v = detail::parse_double(fields[i + 1]);
      if (!v || !std::isfinite(*v)) throw FormatError(path, lineno, "bad number '" + std::string(fields[i + 1]) + "'");
      values[i] = *v;
    }
    table.add(std::string(fields[0]), values);
  }
  table.validate();
  return table;
}

// ---------------------------------------------------------------------------

struct MentionInstance {
  std::vector<std::string> tokens;
  std::size_t mention_start = 0;
  std::size_t mention_end = 0;  // exclusive
  std::vector<std::string> labels;
  std::optional<std::size_t> head_index;  // absolute token index
  std::optional<std::string> dep_role;
  std::optional<std::string> parent_token;
  std::optional<int> doc_topic;

  std::size_t mention_length() const { return mention_end - mention_start; }

  // Annotated head, or the last mention token.
  std::size_t head() const { return head_index.value_or(mention_end - 1); }

  std::vector<std::string> mention_tokens() const {
    return {tokens.begin() + static_cast<std::ptrdiff_t>(mention_start),
            tokens.begin() + static_cast<std::ptrdiff_t>(mention_end)};
  }

  // Empty string when the instance is valid.
  std::string invalid_reason() const {
    if (tokens.empty()) return "no tokens";
    if (!(mention_start < mention_end)) return "mention span is empty";
    if (mention_end > tokens.size()) {
      return "mention end " + std::to_string(mention_end) + " exceeds token count " + std::to_string(tokens.size());
    }
    if (labels.empty()) return "empty label set";
    for (const auto& l : labels) {
      if (l.size() < 2 || l[0] != '/') return "label '" + l + "' is not a type path";
    }
    if (head_index && (*head_index < mention_start || *head_index >= mention_end)) {
      return "head_index " + std::to_string(*head_index) + " outside the mention span";
    }
    return {};
  }

  friend bool operator==(const MentionInstance&, const MentionInstance&) = default;
};

inline nlohmann::json to_json(const MentionInstance& inst) {
  nlohmann::json j;
  j["tokens"] = inst.tokens;
  j["start"] = inst.mention_start;
  j["end"] = inst.mention_end;
  j["labels"] = inst.labels;
  if (inst.head_index) j["head_index"] = *inst.head_index;
  if (inst.dep_role) j["dep_role"] = *inst.dep_role;
  if (inst.parent_token) j["parent_token"] = *inst.parent_token;
  if (inst.doc_topic) j["doc_topic"] = *inst.doc_topic;
  return j;
}

inline MentionInstance parse_mention_record(const std::string& line, const std::string& source, std::size_t lineno) {
  MentionInstance inst;
  try {
    const auto j = nlohmann::json::parse(line);
    if (!j.is_object()) throw FormatError(source, lineno, "record is not an object");
    inst.tokens = j.at("tokens").get<std::vector<std::string>>();
    const auto start = j.at("start").get<long long>();
    const auto end = j.at("end").get<long long>();
    if (start < 0 || end < 0) throw FormatError(source, lineno, "negative span index");
    inst.mention_start = static_cast<std::size_t>(start);
    inst.mention_end = static_cast<std::size_t>(end);
    inst.labels = j.at("labels").get<std::vector<std::string>>();
    if (auto it = j.find("head_index"); it != j.end() && !it->is_null()) {
      const auto h = it->get<long long>();
      if (h < 0) throw FormatError(source, lineno, "negative head_index");
      inst.head_index = static_cast<std::size_t>(h);
    }
    if (auto it = j.find("dep_role"); it != j.end() && !it->is_null()) inst.dep_role = it->get<std::string>();
    if (auto it = j.find("parent_token"); it != j.end() && !it->is_null()) inst.parent_token = it->get<std::string>();
    if (auto it = j.find("doc_topic"); it != j.end() && !it->is_null()) inst.doc_topic = it->get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(source, lineno, std::string("malformed record: ") + e.what());
  }
  if (auto why = inst.invalid_reason(); !why.empty()) throw FormatError(source, lineno, why);
  return inst;
}

// One JSON object per line; blank lines are skipped.
inline std::vector<MentionInstance> load_dataset(const std::string& path) {
  auto in = detail::open_input(path);
  std::vector<MentionInstance> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::split_ws(line).empty()) continue;
    out.push_back(parse_mention_record(line, path, lineno));
  }
  return out;
}

inline void write_dataset(const std::string& path, const std::vector<MentionInstance>& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  for (const auto& inst : data) out << to_json(inst).dump() << '\n';
}

// Drops mentions whose head is a personal pronoun. This is a dataset
// preparation step; metrics never filter.
inline bool is_pronominal(const MentionInstance& inst) {
  static const std::array<std::string_view, 30> pronouns = {
      "i",    "me",   "my",    "mine", "myself", "you",  "your",   "yours",  "yourself", "he",
      "him",  "his",  "himself", "she",  "her",    "hers", "herself", "it",   "its",      "itself",
      "we",   "us",   "our",   "ours", "ourselves", "they", "them", "their", "theirs",   "themselves"};
  std::string head = inst.tokens[inst.head()];
  std::transform(head.begin(), head.end(), head.begin(), [](unsigned char c) { return std::tolower(c); });
  return std::find(pronouns.begin(), pronouns.end(), head) != pronouns.end();
}

inline std::vector<MentionInstance> drop_pronominal(std::vector<MentionInstance> data) {
  std::erase_if(data, [](const MentionInstance& m) { return is_pronominal(m); });
  return data;
}

// ---------------------------------------------------------------------------

class ClusterTable {
 public:
  void add(std::string token, std::string bits) { clusters_.insert_or_assign(std::move(token), std::move(bits)); }

  std::optional<std::string> lookup(const std::string& token) const {
    auto it = clusters_.find(token);
    if (it == clusters_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t size() const noexcept { return clusters_.size(); }

 private:
  std::unordered_map<std::string, std::string> clusters_;
};

// Two columns per line: token and a bit-string over {0,1}.
inline ClusterTable load_cluster_table(const std::string& path) {
  auto in = detail::open_input(path);
  ClusterTable table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto fields = detail::split_ws(line);
    if (fields.empty()) continue;
    if (fields.size() != 2) throw FormatError(path, lineno, "expected 'token<TAB>bitstring'");
    const auto bits = fields[1];
    if (bits.find_first_not_of("01") != std::string_view::npos) {
      throw FormatError(path, lineno, "cluster id '" + std::string(bits) + "' is not a bit-string");
    }
    table.add(std::string(fields[0]), std::string(bits));
  }
  return table;
}

}  // namespace figet
