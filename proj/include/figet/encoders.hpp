#pragma once

// Mention and context representations: averaging, LSTM and attentive
// encoders, each with its backward pass.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "figet/corpus.hpp"
#include "figet/lstm.hpp"
#include "figet/numerics.hpp"
#include "figet/tensor.hpp"

namespace figet {

enum class EncoderKind { averaging, lstm, attentive, sparse };

inline std::string_view to_string(EncoderKind k) {
  switch (k) {
    case EncoderKind::averaging: return "averaging";
    case EncoderKind::lstm: return "lstm";
    case EncoderKind::attentive: return "attentive";
    case EncoderKind::sparse: return "sparse";
  }
  return "?";
}

inline EncoderKind parse_encoder_kind(std::string_view s) {
  if (s == "averaging") return EncoderKind::averaging;
  if (s == "lstm") return EncoderKind::lstm;
  if (s == "attentive") return EncoderKind::attentive;
  if (s == "sparse") return EncoderKind::sparse;
  throw ValidationError("unknown encoder '" + std::string(s) + "' (averaging|lstm|attentive|sparse)");
}

// Width of v_c. The sparse-feature baseline has no context representation.
inline std::size_t context_dim(EncoderKind k, std::size_t embed_dim, std::size_t hidden) {
  switch (k) {
    case EncoderKind::averaging: return 2 * embed_dim;
    case EncoderKind::lstm:
    case EncoderKind::attentive: return 2 * hidden;
    case EncoderKind::sparse: return 0;
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct ContextWindows {
  std::vector<std::string> left;   // l_1..l_C, ends just before the mention
  std::vector<std::string> right;  // r_1..r_C, starts just after the mention

  std::size_t window() const noexcept { return left.size(); }
};

inline ContextWindows build_context_windows(const MentionInstance& inst, std::size_t window) {
  if (window == 0) throw ValidationError("context window must be at least 1");
  ContextWindows w;
  w.left.reserve(window);
  w.right.reserve(window);
  for (std::size_t k = window; k >= 1; --k) {
    w.left.push_back(inst.mention_start >= k ? inst.tokens[inst.mention_start - k] : kPaddingToken);
  }
  for (std::size_t k = 0; k < window; ++k) {
    const std::size_t i = inst.mention_end + k;
    w.right.push_back(i < inst.tokens.size() ? inst.tokens[i] : kPaddingToken);
  }
  return w;
}

inline Tensor mean_embedding(const std::vector<std::string>& tokens, const EmbeddingTable& table) {
  Tensor out = Tensor::vector(table.dim());
  for (const auto& t : tokens) axpy(1.0, table.lookup(t), out.span());
  const double inv = 1.0 / static_cast<double>(tokens.size());
  for (auto& x : out.span()) x *= inv;
  return out;
}

inline Tensor mention_representation(const std::vector<std::string>& mention, const EmbeddingTable& table) {
  if (mention.empty()) throw ValidationError("mention has no tokens");
  return mean_embedding(mention, table);
}

// Padding embeds to zero and still counts toward the window size.
inline Tensor averaging_context(const ContextWindows& w, const EmbeddingTable& table) {
  const std::size_t d = table.dim();
  Tensor out = Tensor::vector(2 * d);
  const auto left = mean_embedding(w.left, table);
  const auto right = mean_embedding(w.right, table);
  std::copy(left.span().begin(), left.span().end(), out.span().begin());
  std::copy(right.span().begin(), right.span().end(), out.span().begin() + static_cast<std::ptrdiff_t>(d));
  return out;
}

namespace detail {

inline std::vector<std::span<const double>> embed_sequence(const std::vector<std::string>& tokens,
                                                           const EmbeddingTable& table, bool reversed) {
  std::vector<std::span<const double>> out;
  out.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    out.push_back(table.lookup(tokens[reversed ? tokens.size() - 1 - i : i]));
  }
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// LSTM encoder: left context read l_1 -> l_C, right context r_C -> r_1.

struct LstmContextTrace {
  std::vector<LstmStep> left;
  std::vector<LstmStep> right;
};

inline Tensor lstm_context(const ContextWindows& w, const EmbeddingTable& table, const LstmWeights& left_lstm,
                           const LstmWeights& right_lstm, LstmContextTrace* trace = nullptr) {
  const std::size_t dh = left_lstm.hidden_size;
  auto left = lstm_run(detail::embed_sequence(w.left, table, false), left_lstm);
  auto right = lstm_run(detail::embed_sequence(w.right, table, true), right_lstm);
  Tensor out = Tensor::vector(2 * dh);
  std::copy(left.back().h.begin(), left.back().h.end(), out.span().begin());
  std::copy(right.back().h.begin(), right.back().h.end(), out.span().begin() + static_cast<std::ptrdiff_t>(dh));
  if (trace) *trace = {std::move(left), std::move(right)};
  return out;
}

inline void lstm_context_backward(const LstmContextTrace& trace, std::span<const double> dv_c, LstmWeights& left_lstm,
                                  LstmWeights& right_lstm) {
  const std::size_t dh = left_lstm.hidden_size;
  std::vector<std::vector<double>> dl(trace.left.size());
  std::vector<std::vector<double>> dr(trace.right.size());
  dl.back().assign(dv_c.begin(), dv_c.begin() + static_cast<std::ptrdiff_t>(dh));
  dr.back().assign(dv_c.begin() + static_cast<std::ptrdiff_t>(dh), dv_c.end());
  lstm_backward(trace.left, dl, left_lstm);
  lstm_backward(trace.right, dr, right_lstm);
}

// ---------------------------------------------------------------------------
// Attentive encoder. One bi-LSTM and one attention network are shared by
// the left and right contexts; attention is normalized jointly over all 2C
// positions.

struct AttentionWeights {
  std::vector<double> left;
  std::vector<double> right;

  double at(std::size_t position) const {
    return position < left.size() ? left[position] : right[position - left.size()];
  }
  std::size_t positions() const noexcept { return left.size() + right.size(); }
};

struct AttentiveWeights {
  LstmWeights forward;   // reads each context in sentence order
  LstmWeights backward;  // reads each context in reverse
  Parameter W_e;         // attention_dim x 2*hidden
  Parameter W_a;         // 1 x attention_dim

  AttentiveWeights() = default;
  AttentiveWeights(std::size_t embed_dim, std::size_t hidden, std::size_t attention_dim)
      : forward(embed_dim, hidden),
        backward(embed_dim, hidden),
        W_e(Parameter::zeros({attention_dim, 2 * hidden})),
        W_a(Parameter::zeros({1, attention_dim})) {}

  std::size_t hidden_size() const noexcept { return forward.hidden_size; }
  std::size_t attention_size() const noexcept { return W_e.value.rows(); }

  void initialize(Rng& rng, double scale = 0.08) {
    forward.initialize(rng, scale);
    backward.initialize(rng, scale);
    fill_uniform(W_e.value, rng, scale);
    fill_uniform(W_a.value, rng, scale);
  }
};

struct AttentiveTrace {
  // Per side (0 = left, 1 = right).
  std::vector<LstmStep> fwd[2];
  std::vector<LstmStep> bwd[2];
  // Per position, left positions first: stacked bi-LSTM output, hidden
  // layer e_i and attention a_i.
  std::vector<std::vector<double>> states;
  std::vector<std::vector<double>> hidden;
  std::vector<double> attention;
};

inline std::pair<Tensor, AttentionWeights> attentive_context(const ContextWindows& w, const EmbeddingTable& table,
                                                             const AttentiveWeights& p,
                                                             AttentiveTrace* trace = nullptr) {
  const std::size_t dh = p.hidden_size();
  const std::size_t da = p.attention_size();
  const std::size_t c = w.window();
  AttentiveTrace local;
  AttentiveTrace& tr = trace ? *trace : local;
  tr.states.assign(2 * c, std::vector<double>(2 * dh));
  tr.hidden.assign(2 * c, std::vector<double>(da));
  tr.attention.assign(2 * c, 0.0);

  const std::vector<std::string>* sides[2] = {&w.left, &w.right};
  for (int side = 0; side < 2; ++side) {
    tr.fwd[side] = lstm_run(detail::embed_sequence(*sides[side], table, false), p.forward);
    tr.bwd[side] = lstm_run(detail::embed_sequence(*sides[side], table, true), p.backward);
    for (std::size_t i = 0; i < c; ++i) {
      auto& st = tr.states[side * c + i];
      const auto& hf = tr.fwd[side][i].h;
      const auto& hb = tr.bwd[side][c - 1 - i].h;
      std::copy(hf.begin(), hf.end(), st.begin());
      std::copy(hb.begin(), hb.end(), st.begin() + static_cast<std::ptrdiff_t>(dh));
    }
  }

  std::vector<double> scores(2 * c);
  for (std::size_t i = 0; i < 2 * c; ++i) {
    auto& e = tr.hidden[i];
    std::fill(e.begin(), e.end(), 0.0);
    matvec_add(p.W_e.value, tr.states[i], e);
    for (auto& x : e) x = std::tanh(x);
    scores[i] = dot(p.W_a.value.span(), e);
  }
  // exp(score - max) / sum: identical ratios to exp(score) / sum, no overflow.
  const double top = *std::max_element(scores.begin(), scores.end());
  double total = 0.0;
  for (std::size_t i = 0; i < 2 * c; ++i) {
    tr.attention[i] = std::exp(scores[i] - top);
    total += tr.attention[i];
  }
  for (auto& a : tr.attention) a /= total;

  Tensor v_c = Tensor::vector(2 * dh);
  for (std::size_t i = 0; i < 2 * c; ++i) axpy(tr.attention[i], tr.states[i], v_c.span());

  AttentionWeights att;
  att.left.assign(tr.attention.begin(), tr.attention.begin() + static_cast<std::ptrdiff_t>(c));
  att.right.assign(tr.attention.begin() + static_cast<std::ptrdiff_t>(c), tr.attention.end());
  return {std::move(v_c), std::move(att)};
}

inline void attentive_context_backward(const AttentiveTrace& tr, std::span<const double> dv_c, AttentiveWeights& p) {
  const std::size_t dh = p.hidden_size();
  const std::size_t n = tr.attention.size();
  const std::size_t c = n / 2;

  std::vector<std::vector<double>> d_states(n, std::vector<double>(2 * dh, 0.0));
  std::vector<double> d_att(n);
  double weighted = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    axpy(tr.attention[i], dv_c, d_states[i]);
    d_att[i] = dot(tr.states[i], dv_c);
    weighted += tr.attention[i] * d_att[i];
  }
  std::vector<double> d_pre(p.attention_size());
  for (std::size_t i = 0; i < n; ++i) {
    // Softmax backward gives the score gradient.
    const double d_score = tr.attention[i] * (d_att[i] - weighted);
    const auto& e = tr.hidden[i];
    axpy(d_score, e, p.W_a.grad.span());
    for (std::size_t k = 0; k < e.size(); ++k) d_pre[k] = d_score * p.W_a.value[k] * (1.0 - e[k] * e[k]);
    outer_add(d_pre, tr.states[i], p.W_e.grad);
    matTvec_add(p.W_e.value, d_pre, d_states[i]);
  }

  for (std::size_t side = 0; side < 2; ++side) {
    std::vector<std::vector<double>> df(c), db(c);
    for (std::size_t i = 0; i < c; ++i) {
      const auto& ds = d_states[side * c + i];
      df[i].assign(ds.begin(), ds.begin() + static_cast<std::ptrdiff_t>(dh));
      db[c - 1 - i].assign(ds.begin() + static_cast<std::ptrdiff_t>(dh), ds.end());
    }
    lstm_backward(tr.fwd[side], df, p.forward);
    lstm_backward(tr.bwd[side], db, p.backward);
  }
}

}  // namespace figet
