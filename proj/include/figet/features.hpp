#pragma once

// Hand-crafted mention features and their binary indicator encoding.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "figet/corpus.hpp"
#include "figet/error.hpp"

namespace figet {

namespace detail {

// Splits UTF-8 text into code-point substrings. Invalid lead bytes are
// treated as single-byte characters.
inline std::vector<std::string> utf8_chars(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t len = 1;
    if (c >= 0xF0) len = 4;
    else if (c >= 0xE0) len = 3;
    else if (c >= 0xC0) len = 2;
    len = std::min(len, s.size() - i);
    out.emplace_back(s.substr(i, len));
    i += len;
  }
  return out;
}

inline std::string char_class(const std::string& ch) {
  if (ch.size() == 1) {
    const auto c = static_cast<unsigned char>(ch[0]);
    if (std::isupper(c)) return "A";
    if (std::islower(c)) return "a";
    if (std::isdigit(c)) return "#";
  }
  return ch;
}

inline std::string ascii_lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace detail

// Uppercase -> 'A', lowercase -> 'a', digit -> '#', anything else kept;
// runs of the same class collapse to one character.
inline std::string word_shape(std::string_view token) {
  std::string out;
  std::string prev;
  for (const auto& ch : detail::utf8_chars(token)) {
    auto cls = detail::char_class(ch);
    if (cls != prev) out += cls;
    prev = std::move(cls);
  }
  return out;
}

// Shape of a whole phrase: token shapes joined by single spaces.
inline std::string phrase_shape(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += word_shape(tokens[i]);
  }
  return out;
}

// Trigrams of ":" + lowercase(head) + ":", in order (duplicates kept).
inline std::vector<std::string> char_trigrams(std::string_view head) {
  auto chars = detail::utf8_chars(detail::ascii_lower(std::string(head)));
  chars.insert(chars.begin(), ":");
  chars.push_back(":");
  std::vector<std::string> out;
  for (std::size_t i = 0; i + 2 < chars.size(); ++i) out.push_back(chars[i] + chars[i + 1] + chars[i + 2]);
  return out;
}

struct FeatureOptions {
  std::size_t context_width = 1;
};

// Feature strings are "NAMESPACE=value"; the returned set is sorted.
inline std::set<std::string> extract_feature_strings(const MentionInstance& inst, const ClusterTable* clusters,
                                                    const FeatureOptions& opts = {}) {
  std::set<std::string> out;
  const std::size_t head = inst.head();
  const std::string& head_token = inst.tokens[head];

  out.insert("HEAD=" + head_token);
  for (std::size_t i = inst.mention_start; i < inst.mention_end; ++i) {
    if (i != head) out.insert("NONHEAD=" + inst.tokens[i]);
  }
  if (clusters) {
    if (auto bits = clusters->lookup(head_token)) out.insert("CLUSTER=" + *bits);
  }
  for (const auto& tri : char_trigrams(head_token)) out.insert("CHAR=" + tri);
  out.insert("SHAPE=" + phrase_shape(inst.mention_tokens()));
  if (inst.dep_role) out.insert("ROLE=" + *inst.dep_role);
  for (std::size_t k = 1; k <= opts.context_width; ++k) {
    if (inst.mention_start >= k) out.insert("CTXB=" + inst.tokens[inst.mention_start - k]);
    if (inst.mention_end + k - 1 < inst.tokens.size()) out.insert("CTXA=" + inst.tokens[inst.mention_end + k - 1]);
  }
  if (inst.parent_token) out.insert("PARENT=" + *inst.parent_token);
  if (inst.doc_topic) out.insert("TOPIC=" + std::to_string(*inst.doc_topic));
  return out;
}

// Sorted active coordinates of a binary indicator vector.
struct SparseVector {
  std::vector<std::size_t> indices;

  std::size_t size() const noexcept { return indices.size(); }
  bool empty() const noexcept { return indices.empty(); }
  friend bool operator==(const SparseVector&, const SparseVector&) = default;
};

// String <-> column bijection. Grown from training data, then frozen.
class FeatureIndex {
 public:
  std::size_t dim() const noexcept { return names_.size(); }
  bool frozen() const noexcept { return frozen_; }
  void freeze() { frozen_ = true; }

  std::size_t add(const std::string& feature) {
    if (frozen_) throw Error("feature index is frozen");
    auto [it, inserted] = ids_.emplace(feature, names_.size());
    if (inserted) names_.push_back(feature);
    return it->second;
  }

  std::optional<std::size_t> find(const std::string& feature) const {
    auto it = ids_.find(feature);
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }

  const std::string& name(std::size_t id) const { return names_.at(id); }
  const std::vector<std::string>& names() const noexcept { return names_; }

  static FeatureIndex from_names(std::vector<std::string> names) {
    FeatureIndex idx;
    for (auto& n : names) idx.add(n);
    idx.freeze();
    return idx;
  }

 private:
  std::unordered_map<std::string, std::size_t> ids_;
  std::vector<std::string> names_;
  bool frozen_ = false;
};

inline FeatureIndex build_feature_index(const std::vector<MentionInstance>& train, const ClusterTable* clusters,
                                        const FeatureOptions& opts = {}) {
  FeatureIndex idx;
  for (const auto& inst : train) {
    for (const auto& f : extract_feature_strings(inst, clusters, opts)) idx.add(f);
  }
  idx.freeze();
  return idx;
}

// Features unseen when the index was built are dropped.
inline SparseVector vectorize(const std::set<std::string>& strings, const FeatureIndex& index) {
  SparseVector v;
  for (const auto& s : strings) {
    if (auto id = index.find(s)) v.indices.push_back(*id);
  }
  std::sort(v.indices.begin(), v.indices.end());
  v.indices.erase(std::unique(v.indices.begin(), v.indices.end()), v.indices.end());
  return v;
}

}  // namespace figet
