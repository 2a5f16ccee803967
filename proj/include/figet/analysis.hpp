#pragma once

// Attention statistics per type and PCA projection of label embeddings.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "figet/label_space.hpp"
#include "figet/model.hpp"

namespace figet {

struct AttentionSummaryRow {
  std::string type;
  std::size_t mentions = 0;
  // Over mentions with a parent_token annotation; absent when there are none.
  std::optional<double> parent_fraction;
  std::size_t parent_eligible = 0;
  double before_fraction = 0.0;
  double after_fraction = 0.0;
  std::vector<std::pair<std::string, std::size_t>> frequent_words;
};

// Position (0..2C-1, left positions first) with the largest attention
// weight; ties go to the lowest position.
inline std::size_t top_attended_position(const AttentionWeights& att) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < att.positions(); ++i) {
    if (att.at(i) > att.at(best)) best = i;
  }
  return best;
}

inline const std::string& token_at(const ContextWindows& w, std::size_t position) {
  return position < w.left.size() ? w.left[position] : w.right[position - w.left.size()];
}

// For every gold type: how often the most attended context token is the
// head's lexical parent, the token right before the mention, or the token
// right after it. Padding can win the argmax (it never matches) but is left
// out of the word tally.
inline std::vector<AttentionSummaryRow> attention_summary(const Model& m, const std::vector<MentionInstance>& data,
                                                          std::size_t top_words = 3) {
  if (m.config.encoder != EncoderKind::attentive) throw ValidationError("attention analysis needs an attentive model");
  struct Tally {
    std::size_t mentions = 0, parent_eligible = 0, parent_hits = 0, before_hits = 0, after_hits = 0;
    std::map<std::string, std::size_t> words;
  };
  std::map<std::string, Tally> tallies;
  const auto preds = predict(m, data);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& inst = data[i];
    const auto windows = build_context_windows(inst, m.config.window);
    const auto& token = token_at(windows, top_attended_position(*preds[i].attention));
    const bool pad = token == kPaddingToken;
    const bool before = !pad && inst.mention_start > 0 && token == inst.tokens[inst.mention_start - 1];
    const bool after = !pad && inst.mention_end < inst.tokens.size() && token == inst.tokens[inst.mention_end];
    for (const auto& type : gold_label_set(inst.labels, m.types, m.config.expand_ancestors)) {
      auto& t = tallies[type];
      ++t.mentions;
      t.before_hits += before;
      t.after_hits += after;
      if (inst.parent_token) {
        ++t.parent_eligible;
        t.parent_hits += !pad && token == *inst.parent_token;
      }
      if (!pad) ++t.words[token];
    }
  }

  std::vector<AttentionSummaryRow> rows;
  for (auto& [type, t] : tallies) {
    AttentionSummaryRow row;
    row.type = type;
    row.mentions = t.mentions;
    row.parent_eligible = t.parent_eligible;
    if (t.parent_eligible) row.parent_fraction = static_cast<double>(t.parent_hits) / static_cast<double>(t.parent_eligible);
    row.before_fraction = static_cast<double>(t.before_hits) / static_cast<double>(t.mentions);
    row.after_fraction = static_cast<double>(t.after_hits) / static_cast<double>(t.mentions);
    row.frequent_words.assign(t.words.begin(), t.words.end());
    std::stable_sort(row.frequent_words.begin(), row.frequent_words.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    if (row.frequent_words.size() > top_words) row.frequent_words.resize(top_words);
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace detail {

inline std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

inline std::string full_precision(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace detail

// "/location 0.319 0.228 0.070 in, at, born"
inline std::string format_attention_row(const AttentionSummaryRow& row) {
  std::string s = row.type + " " + (row.parent_fraction ? detail::fixed3(*row.parent_fraction) : std::string("-")) +
                  " " + detail::fixed3(row.before_fraction) + " " + detail::fixed3(row.after_fraction) + " ";
  for (std::size_t i = 0; i < row.frequent_words.size(); ++i) {
    if (i) s += ", ";
    s += row.frequent_words[i].first;
  }
  return s;
}

inline void write_attention_table(std::ostream& out, const std::vector<AttentionSummaryRow>& rows) {
  out << "Type Parent Before After Frequent-Words\n";
  for (const auto& r : rows) out << format_attention_row(r) << '\n';
}

inline void write_attention_csv(std::ostream& out, const std::vector<AttentionSummaryRow>& rows) {
  out << "type,mentions,parent_fraction,before_fraction,after_fraction,frequent_words\n";
  for (const auto& r : rows) {
    std::string words;
    for (std::size_t i = 0; i < r.frequent_words.size(); ++i) {
      if (i) words += ' ';
      words += r.frequent_words[i].first + ":" + std::to_string(r.frequent_words[i].second);
    }
    out << detail::csv_field(r.type) << ',' << r.mentions << ','
        << (r.parent_fraction ? detail::full_precision(*r.parent_fraction) : std::string()) << ','
        << detail::full_precision(r.before_fraction) << ',' << detail::full_precision(r.after_fraction) << ','
        << detail::csv_field(words) << '\n';
  }
}

// Per-position attention weights, one row per context token.
inline void write_attention_weights_csv(std::ostream& out, const Model& m, const std::vector<MentionInstance>& data) {
  if (m.config.encoder != EncoderKind::attentive) throw ValidationError("attention analysis needs an attentive model");
  const auto preds = predict(m, data);
  out << "mention,side,position,token,weight\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto windows = build_context_windows(data[i], m.config.window);
    const auto& att = *preds[i].attention;
    for (std::size_t p = 0; p < att.positions(); ++p) {
      const bool left = p < windows.left.size();
      out << i << ',' << (left ? "left" : "right") << ',' << (left ? p : p - windows.left.size()) + 1 << ','
          << detail::csv_field(token_at(windows, p)) << ',' << detail::full_precision(att.at(p)) << '\n';
    }
  }
}

// ---------------------------------------------------------------------------

struct PcaPoint {
  std::string type;
  double x = 0.0;
  double y = 0.0;
};

// Projects the centered rows of `rows` (K x D) onto their top two right
// singular directions. Each direction's sign is fixed so that its largest
// magnitude component is positive.
inline std::vector<std::pair<double, double>> pca_project(const Tensor& rows) {
  const auto k = static_cast<Eigen::Index>(rows.rows());
  const auto d = static_cast<Eigen::Index>(rows.cols());
  Eigen::MatrixXd x(k, d);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = rows(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  }
  x.rowwise() -= x.colwise().mean();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinV);
  Eigen::MatrixXd v = svd.matrixV();
  const Eigen::VectorXd& sv = svd.singularValues();
  std::vector<std::pair<double, double>> out(static_cast<std::size_t>(k), {0.0, 0.0});
  const double tol = sv.size() ? sv(0) * 1e-12 * static_cast<double>(std::max(k, d)) : 0.0;
  for (Eigen::Index c = 0; c < std::min<Eigen::Index>(2, v.cols()); ++c) {
    if (!(sv(c) > tol)) continue;  // no variance along this direction
    Eigen::Index arg = 0;
    v.col(c).cwiseAbs().maxCoeff(&arg);
    if (v(arg, c) < 0) v.col(c) *= -1.0;
    const Eigen::VectorXd proj = x * v.col(c);
    for (Eigen::Index i = 0; i < k; ++i) {
      auto& pt = out[static_cast<std::size_t>(i)];
      (c == 0 ? pt.first : pt.second) = proj(i);
    }
  }
  return out;
}

// Label embedding of a type = its row of the effective output weights.
inline std::vector<PcaPoint> pca_label_embeddings(const Model& m) {
  if (m.types.type_count() < 2) throw ValidationError("PCA needs at least two types");
  const auto proj = pca_project(effective_label_weights(m.labels));
  std::vector<PcaPoint> out;
  for (std::size_t k = 0; k < proj.size(); ++k) out.push_back({m.types.type(k).str(), proj[k].first, proj[k].second});
  return out;
}

inline void write_pca_csv(std::ostream& out, const std::vector<PcaPoint>& points) {
  out << "type,x,y\n";
  for (const auto& p : points) {
    out << detail::csv_field(p.type) << ',' << detail::full_precision(p.x) << ',' << detail::full_precision(p.y) << '\n';
  }
}

}  // namespace figet
