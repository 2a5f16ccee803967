#pragma once

// Strict accuracy and loose macro/micro precision, recall and F1.

#include <algorithm>
#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "figet/error.hpp"

namespace figet {

template <typename T>
struct LabelPair {
  std::set<T> gold;
  std::set<T> predicted;
};

struct PRF {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct EvalResult {
  double strict_accuracy = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  double micro_precision = 0.0;
  double micro_recall = 0.0;
  double micro_f1 = 0.0;
};

// 0 when both are 0.
inline double harmonic_mean(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

namespace detail {

template <typename T>
std::size_t overlap(const std::set<T>& a, const std::set<T>& b) {
  std::size_t n = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) ++i;
    else if (*j < *i) ++j;
    else { ++n; ++i; ++j; }
  }
  return n;
}

template <typename T>
void require_nonempty(std::span<const LabelPair<T>> pairs) {
  if (pairs.empty()) throw ValidationError("cannot score an empty set of predictions");
}

}  // namespace detail

template <typename T>
double strict_accuracy(std::span<const LabelPair<T>> pairs) {
  detail::require_nonempty(pairs);
  std::size_t exact = 0;
  for (const auto& p : pairs) exact += p.gold == p.predicted;
  return static_cast<double>(exact) / static_cast<double>(pairs.size());
}

// Per-mention overlap ratios averaged over mentions. An empty predicted or
// gold set contributes 0 to its ratio.
template <typename T>
PRF loose_macro(std::span<const LabelPair<T>> pairs) {
  detail::require_nonempty(pairs);
  double p_sum = 0.0, r_sum = 0.0;
  for (const auto& p : pairs) {
    const auto both = static_cast<double>(detail::overlap(p.gold, p.predicted));
    if (!p.predicted.empty()) p_sum += both / static_cast<double>(p.predicted.size());
    if (!p.gold.empty()) r_sum += both / static_cast<double>(p.gold.size());
  }
  const double n = static_cast<double>(pairs.size());
  PRF out{p_sum / n, r_sum / n, 0.0};
  out.f1 = harmonic_mean(out.precision, out.recall);
  return out;
}

// Overlap counts pooled over all mentions.
template <typename T>
PRF loose_micro(std::span<const LabelPair<T>> pairs) {
  detail::require_nonempty(pairs);
  std::size_t both = 0, pred = 0, gold = 0;
  for (const auto& p : pairs) {
    both += detail::overlap(p.gold, p.predicted);
    pred += p.predicted.size();
    gold += p.gold.size();
  }
  PRF out;
  out.precision = pred ? static_cast<double>(both) / static_cast<double>(pred) : 0.0;
  out.recall = gold ? static_cast<double>(both) / static_cast<double>(gold) : 0.0;
  out.f1 = harmonic_mean(out.precision, out.recall);
  return out;
}

template <typename T>
EvalResult evaluate_pairs(std::span<const LabelPair<T>> pairs) {
  EvalResult r;
  r.strict_accuracy = strict_accuracy(pairs);
  const auto macro = loose_macro(pairs);
  const auto micro = loose_micro(pairs);
  r.macro_precision = macro.precision;
  r.macro_recall = macro.recall;
  r.macro_f1 = macro.f1;
  r.micro_precision = micro.precision;
  r.micro_recall = micro.recall;
  r.micro_f1 = micro.f1;
  return r;
}

template <typename T>
EvalResult evaluate_pairs(const std::vector<LabelPair<T>>& pairs) {
  return evaluate_pairs(std::span<const LabelPair<T>>(pairs));
}

inline std::vector<std::pair<std::string, double>> metric_fields(const EvalResult& r) {
  return {{"strict_accuracy", r.strict_accuracy}, {"macro_precision", r.macro_precision},
          {"macro_recall", r.macro_recall},       {"macro_f1", r.macro_f1},
          {"micro_precision", r.micro_precision}, {"micro_recall", r.micro_recall},
          {"micro_f1", r.micro_f1}};
}

}  // namespace figet
