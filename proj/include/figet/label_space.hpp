#pragma once

// Type paths, the type hierarchy, and flat or hierarchical output weights.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "figet/error.hpp"
#include "figet/tensor.hpp"

namespace figet {

struct TypePath {
  std::vector<std::string> segments;

  std::size_t depth() const noexcept { return segments.size(); }

  std::string str() const {
    std::string s;
    for (const auto& seg : segments) s += "/" + seg;
    return s;
  }

  TypePath prefix(std::size_t n) const {
    return TypePath{{segments.begin(), segments.begin() + static_cast<std::ptrdiff_t>(n)}};
  }

  bool is_prefix_of(const TypePath& other) const {
    return depth() <= other.depth() && std::equal(segments.begin(), segments.end(), other.segments.begin());
  }

  friend auto operator<=>(const TypePath&, const TypePath&) = default;
  friend bool operator==(const TypePath&, const TypePath&) = default;
};

inline TypePath parse_type_path(std::string_view s) {
  if (s.empty() || s.front() != '/') throw ValidationError("type path '" + std::string(s) + "' must start with '/'");
  TypePath p;
  std::size_t pos = 1;
  while (true) {
    const auto next = s.find('/', pos);
    const auto seg = s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos);
    if (seg.empty()) throw ValidationError("type path '" + std::string(s) + "' has an empty segment");
    p.segments.emplace_back(seg);
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return p;
}

// K types (columns) and R hierarchy nodes (rows): every distinct prefix of
// every type, the types themselves included. Both lists are sorted.
class TypeSystem {
 public:
  TypeSystem() = default;

  explicit TypeSystem(const std::vector<std::string>& type_paths) {
    std::set<TypePath> types;
    for (const auto& s : type_paths) types.insert(parse_type_path(s));
    std::set<TypePath> nodes;
    for (const auto& t : types) {
      for (std::size_t d = 1; d <= t.depth(); ++d) nodes.insert(t.prefix(d));
    }
    types_.assign(types.begin(), types.end());
    nodes_.assign(nodes.begin(), nodes.end());
    for (std::size_t k = 0; k < types_.size(); ++k) type_ids_.emplace(types_[k].str(), k);
    std::map<TypePath, std::size_t> node_ids;
    for (std::size_t r = 0; r < nodes_.size(); ++r) node_ids.emplace(nodes_[r], r);
    node_path_.resize(types_.size());
    type_ancestors_.resize(types_.size());
    for (std::size_t k = 0; k < types_.size(); ++k) {
      for (std::size_t d = 1; d <= types_[k].depth(); ++d) {
        const auto pre = types_[k].prefix(d);
        node_path_[k].push_back(node_ids.at(pre));
        if (auto id = find(pre.str()); id && *id != k) type_ancestors_[k].push_back(*id);
      }
    }
  }

  // Distinct labels of a dataset, as the type inventory.
  template <typename Instances>
  static TypeSystem from_instances(const Instances& data) {
    std::vector<std::string> labels;
    for (const auto& inst : data) labels.insert(labels.end(), inst.labels.begin(), inst.labels.end());
    return TypeSystem(labels);
  }

  std::size_t type_count() const noexcept { return types_.size(); }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  const std::vector<TypePath>& types() const noexcept { return types_; }
  const std::vector<TypePath>& nodes() const noexcept { return nodes_; }
  const TypePath& type(std::size_t k) const { return types_.at(k); }

  std::optional<std::size_t> find(const std::string& path) const {
    auto it = type_ids_.find(path);
    if (it == type_ids_.end()) return std::nullopt;
    return it->second;
  }

  // Row indices of the ancestor-or-self nodes of type k, root first.
  const std::vector<std::size_t>& node_path(std::size_t k) const { return node_path_.at(k); }
  // Types in this system that are strict ancestors of type k.
  const std::vector<std::size_t>& type_ancestors(std::size_t k) const { return type_ancestors_.at(k); }

  std::vector<std::string> type_strings() const {
    std::vector<std::string> out;
    for (const auto& t : types_) out.push_back(t.str());
    return out;
  }

 private:
  std::vector<TypePath> types_;
  std::vector<TypePath> nodes_;
  std::map<std::string, std::size_t> type_ids_;
  std::vector<std::vector<std::size_t>> node_path_;
  std::vector<std::vector<std::size_t>> type_ancestors_;
};

// S[r][k] = 1 iff node r is an ancestor-or-self of type k.
inline Tensor build_hierarchy_matrix(const TypeSystem& ts) {
  Tensor s = Tensor::matrix(ts.node_count(), ts.type_count());
  for (std::size_t k = 0; k < ts.type_count(); ++k) {
    for (auto r : ts.node_path(k)) s(r, k) = 1.0;
  }
  return s;
}

enum class LabelMode { flat, hierarchical };

// Flat: W_y (K x D) is learned. Hierarchical: V_y (D x R) is learned and
// W_y^T = V_y * S.
struct LabelWeights {
  LabelMode mode = LabelMode::flat;
  Parameter weights;
  Tensor hierarchy;  // S, R x K; empty in flat mode

  static LabelWeights flat(std::size_t types, std::size_t input_dim) {
    return {LabelMode::flat, Parameter::zeros({types, input_dim}), {}};
  }

  static LabelWeights hierarchical(Tensor s, std::size_t input_dim) {
    const std::size_t nodes = s.rows();
    return {LabelMode::hierarchical, Parameter::zeros({input_dim, nodes}), std::move(s)};
  }

  std::size_t type_count() const { return mode == LabelMode::flat ? weights.value.rows() : hierarchy.cols(); }
  std::size_t input_dim() const { return mode == LabelMode::flat ? weights.value.cols() : weights.value.rows(); }

  void check() const {
    if (mode == LabelMode::hierarchical && weights.value.cols() != hierarchy.rows()) {
      throw ShapeError("V_y has " + std::to_string(weights.value.cols()) + " columns but S has " +
                       std::to_string(hierarchy.rows()) + " rows");
    }
  }
};

// Effective K x D weight matrix.
inline Tensor effective_label_weights(const LabelWeights& lw) {
  lw.check();
  if (lw.mode == LabelMode::flat) return lw.weights.value;
  const auto& v = lw.weights.value;
  const auto& s = lw.hierarchy;
  const std::size_t d = v.rows(), r_count = v.cols(), k_count = s.cols();
  Tensor w = Tensor::matrix(k_count, d);
  for (std::size_t k = 0; k < k_count; ++k) {
    for (std::size_t j = 0; j < d; ++j) {
      double acc = 0.0;
      for (std::size_t r = 0; r < r_count; ++r) acc += v(j, r) * s(r, k);
      w(k, j) = acc;
    }
  }
  return w;
}

// Adds the gradient for the effective weights (K x D) into lw.weights.grad.
inline void accumulate_label_gradient(const Tensor& d_effective, LabelWeights& lw) {
  if (lw.mode == LabelMode::flat) {
    axpy(1.0, d_effective.span(), lw.weights.grad.span());
    return;
  }
  auto& g = lw.weights.grad;
  const auto& s = lw.hierarchy;
  const std::size_t d = g.rows(), r_count = g.cols(), k_count = s.cols();
  for (std::size_t k = 0; k < k_count; ++k) {
    for (std::size_t r = 0; r < r_count; ++r) {
      if (s(r, k) == 0.0) continue;
      for (std::size_t j = 0; j < d; ++j) g(j, r) += s(r, k) * d_effective(k, j);
    }
  }
}

// Gold indicator over the K types. With `expand_ancestors`, every ancestor of
// a gold label that is itself a type is marked too.
inline std::vector<double> encode_gold_vector(const std::vector<std::string>& labels, const TypeSystem& ts,
                                              bool expand_ancestors = true) {
  if (labels.empty()) throw ValidationError("gold label set is empty");
  std::vector<double> t(ts.type_count(), 0.0);
  for (const auto& l : labels) {
    auto k = ts.find(l);
    if (!k) throw ValidationError("label '" + l + "' is not in the type inventory");
    t[*k] = 1.0;
    if (expand_ancestors) {
      for (auto a : ts.type_ancestors(*k)) t[a] = 1.0;
    }
  }
  return t;
}

// Gold labels as strings for scoring. Labels outside the inventory are kept
// (they count as misses); inventory ancestors are added when expanding.
inline std::set<std::string> gold_label_set(const std::vector<std::string>& labels, const TypeSystem& ts,
                                            bool expand_ancestors = true) {
  std::set<std::string> out(labels.begin(), labels.end());
  if (expand_ancestors) {
    for (const auto& l : labels) {
      const auto path = parse_type_path(l);
      for (std::size_t d = 1; d < path.depth(); ++d) {
        auto anc = path.prefix(d).str();
        if (ts.find(anc)) out.insert(std::move(anc));
      }
    }
  }
  return out;
}

}  // namespace figet
