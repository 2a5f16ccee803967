#pragma once

// The full classifier: mention and context encoders, optional projected
// hand-crafted features, and a logistic output layer over K types.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "figet/config.hpp"
#include "figet/corpus.hpp"
#include "figet/encoders.hpp"
#include "figet/features.hpp"
#include "figet/label_space.hpp"
#include "figet/metrics.hpp"
#include "figet/numerics.hpp"

namespace figet {

struct Model {
  ModelConfig config;
  TypeSystem types;
  FeatureIndex features;
  std::shared_ptr<const EmbeddingTable> embeddings;
  std::shared_ptr<const ClusterTable> clusters;
  // Where the tables came from, recorded so a saved model can reload them.
  std::string embeddings_path;
  std::string clusters_path;

  LstmWeights left_lstm;   // lstm encoder
  LstmWeights right_lstm;  // lstm encoder
  AttentiveWeights attentive;
  Parameter W_f;  // feature_proj_size x D_f, hybrid only
  LabelWeights labels;

  std::size_t context_dim() const { return figet::context_dim(config.encoder, config.embedding_dim, config.hidden_size); }

  // Width of the dense part of the output-layer input: [v_m; v_c; v_f].
  std::size_t dense_dim() const {
    if (config.encoder == EncoderKind::sparse) return 0;
    return config.embedding_dim + context_dim() + (config.uses_projection() ? config.feature_proj_size : 0);
  }
  // The sparse baseline feeds f(m) straight into the output layer.
  std::size_t sparse_dim() const { return config.encoder == EncoderKind::sparse ? features.dim() : 0; }
  std::size_t input_dim() const { return dense_dim() + sparse_dim(); }

  // Learnable tensors in a fixed order, with stable names.
  std::vector<std::pair<std::string, Parameter*>> named_parameters() {
    std::vector<std::pair<std::string, Parameter*>> out;
    switch (config.encoder) {
      case EncoderKind::lstm:
        left_lstm.append_parameters("lstm_left", out);
        right_lstm.append_parameters("lstm_right", out);
        break;
      case EncoderKind::attentive:
        attentive.forward.append_parameters("attn_fwd", out);
        attentive.backward.append_parameters("attn_bwd", out);
        out.emplace_back("attn.W_e", &attentive.W_e);
        out.emplace_back("attn.W_a", &attentive.W_a);
        break;
      default:
        break;
    }
    if (config.uses_projection()) out.emplace_back("W_f", &W_f);
    out.emplace_back(labels.mode == LabelMode::flat ? "W_y" : "V_y", &labels.weights);
    return out;
  }

  std::vector<Parameter*> parameters() {
    std::vector<Parameter*> out;
    for (auto& [name, p] : named_parameters()) out.push_back(p);
    return out;
  }

  void zero_grad() {
    for (auto* p : parameters()) p->zero_grad();
  }
};

// Allocates zero-valued parameters with the shapes implied by the config,
// type inventory and feature index.
inline Model make_model(const ModelConfig& config, TypeSystem types, FeatureIndex features,
                        std::shared_ptr<const EmbeddingTable> embeddings,
                        std::shared_ptr<const ClusterTable> clusters = nullptr) {
  config.validate();
  if (types.type_count() == 0) throw ValidationError("type inventory is empty");
  if (embeddings && embeddings->dim() != config.embedding_dim) {
    throw ValidationError("embedding table has dimension " + std::to_string(embeddings->dim()) +
                          " but embedding_dim is " + std::to_string(config.embedding_dim));
  }
  Model m;
  m.config = config;
  m.types = std::move(types);
  m.features = std::move(features);
  m.features.freeze();
  m.embeddings = std::move(embeddings);
  m.clusters = std::move(clusters);
  const auto dm = config.embedding_dim, dh = config.hidden_size;
  switch (config.encoder) {
    case EncoderKind::lstm:
      m.left_lstm = LstmWeights(dm, dh);
      m.right_lstm = LstmWeights(dm, dh);
      break;
    case EncoderKind::attentive:
      m.attentive = AttentiveWeights(dm, dh, config.attention_size);
      break;
    default:
      break;
  }
  if (config.uses_projection()) m.W_f = Parameter::zeros({config.feature_proj_size, m.features.dim()});
  m.labels = config.use_hierarchical ? LabelWeights::hierarchical(build_hierarchy_matrix(m.types), m.input_dim())
                                     : LabelWeights::flat(m.types.type_count(), m.input_dim());
  return m;
}

// Uniform weights in [-init_scale, init_scale]; LSTM forget biases at 1.
inline void initialize_parameters(Model& m, Rng& rng) {
  const double scale = m.config.init_scale;
  switch (m.config.encoder) {
    case EncoderKind::lstm:
      m.left_lstm.initialize(rng, scale);
      m.right_lstm.initialize(rng, scale);
      break;
    case EncoderKind::attentive:
      m.attentive.initialize(rng, scale);
      break;
    default:
      break;
  }
  if (m.config.uses_projection()) fill_uniform(m.W_f.value, rng, scale);
  fill_uniform(m.labels.weights.value, rng, scale);
}

// ---------------------------------------------------------------------------

// Per-instance inputs that do not change during training.
struct Example {
  const MentionInstance* instance = nullptr;
  std::vector<std::string> mention;
  ContextWindows windows;
  SparseVector features;
  std::vector<double> gold;  // empty when labels fall outside the inventory
};

inline Example prepare_example(const Model& m, const MentionInstance& inst, bool need_gold = false) {
  Example ex;
  ex.instance = &inst;
  ex.mention = inst.mention_tokens();
  ex.windows = build_context_windows(inst, m.config.window);
  if (m.config.uses_features()) {
    FeatureOptions opts{m.config.feature_context_width};
    ex.features = vectorize(extract_feature_strings(inst, m.clusters.get(), opts), m.features);
  }
  if (need_gold) ex.gold = encode_gold_vector(inst.labels, m.types, m.config.expand_ancestors);
  return ex;
}

inline std::vector<Example> prepare_examples(const Model& m, const std::vector<MentionInstance>& data,
                                             bool need_gold = false) {
  std::vector<Example> out;
  out.reserve(data.size());
  for (const auto& inst : data) out.push_back(prepare_example(m, inst, need_gold));
  return out;
}

struct ForwardTrace {
  std::vector<double> input;  // dense part of the output-layer input
  std::vector<double> mention_mask;
  std::vector<double> feature_mask;
  LstmContextTrace lstm;
  AttentiveTrace attentive;
  std::optional<AttentionWeights> attention;
  std::vector<double> logits;
  std::vector<double> probabilities;
};

// Forward pass given precomputed effective output weights (K x D).
inline void forward_traced(const Model& m, const Tensor& w_eff, const Example& ex, Mode mode, Rng& rng,
                           ForwardTrace& tr) {
  const auto& cfg = m.config;
  const std::size_t dense = m.dense_dim();
  tr.input.assign(dense, 0.0);
  tr.attention.reset();
  std::size_t off = 0;
  if (cfg.encoder != EncoderKind::sparse) {
    if (!m.embeddings) throw ValidationError("model has no embedding table attached");
    const auto& table = *m.embeddings;
    auto vm = dropout_with_mask(mention_representation(ex.mention, table), cfg.dropout, mode, rng);
    tr.mention_mask = std::move(vm.mask);
    std::copy(vm.output.span().begin(), vm.output.span().end(), tr.input.begin());
    off = cfg.embedding_dim;

    Tensor vc;
    switch (cfg.encoder) {
      case EncoderKind::averaging:
        vc = averaging_context(ex.windows, table);
        break;
      case EncoderKind::lstm:
        vc = lstm_context(ex.windows, table, m.left_lstm, m.right_lstm, &tr.lstm);
        break;
      case EncoderKind::attentive: {
        auto [v, att] = attentive_context(ex.windows, table, m.attentive, &tr.attentive);
        vc = std::move(v);
        tr.attention = std::move(att);
        break;
      }
      default:
        break;
    }
    std::copy(vc.span().begin(), vc.span().end(), tr.input.begin() + static_cast<std::ptrdiff_t>(off));
    off += vc.size();

    if (cfg.uses_projection()) {
      Tensor vf = Tensor::vector(cfg.feature_proj_size);
      const auto& wf = m.W_f.value;
      for (auto j : ex.features.indices) {
        for (std::size_t r = 0; r < vf.size(); ++r) vf[r] += wf(r, j);
      }
      auto d = dropout_with_mask(vf, cfg.dropout, mode, rng);
      tr.feature_mask = std::move(d.mask);
      std::copy(d.output.span().begin(), d.output.span().end(), tr.input.begin() + static_cast<std::ptrdiff_t>(off));
    }
  }

  const std::size_t k_count = w_eff.rows();
  tr.logits.assign(k_count, 0.0);
  matvec_add_prefix(w_eff, tr.input, tr.logits);
  if (m.sparse_dim() > 0) {
    for (auto j : ex.features.indices) {
      for (std::size_t k = 0; k < k_count; ++k) tr.logits[k] += w_eff(k, dense + j);
    }
  }
  tr.probabilities.resize(k_count);
  for (std::size_t k = 0; k < k_count; ++k) tr.probabilities[k] = sigmoid(tr.logits[k]);
}

// ---------------------------------------------------------------------------

// Summed per-type binary cross-entropy of probabilities y against gold t.
inline double bce_loss(std::span<const double> y, std::span<const double> t) {
  if (y.size() != t.size()) throw ShapeError("bce_loss: probability and gold lengths differ");
  double loss = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) {
    if (!(y[k] > 0.0 && y[k] < 1.0)) throw ValidationError("bce_loss: probability outside (0, 1)");
    loss -= t[k] * std::log(y[k]) + (1.0 - t[k]) * std::log(1.0 - y[k]);
  }
  return loss;
}

// Same loss computed from logits; stays finite when the sigmoid saturates.
inline double bce_loss_from_logits(std::span<const double> z, std::span<const double> t) {
  double loss = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) {
    loss += std::max(z[k], 0.0) - t[k] * z[k] + std::log1p(std::exp(-std::abs(z[k])));
  }
  return loss;
}

// argmax (lowest index on ties) plus every type strictly above threshold.
inline std::vector<std::size_t> predict_types(std::span<const double> y, double threshold) {
  if (y.empty()) return {};
  const auto best = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < y.size(); ++k) {
    if (k == best || y[k] > threshold) out.push_back(k);
  }
  return out;
}

struct Prediction {
  std::vector<double> probabilities;
  std::vector<std::size_t> predicted;
  std::optional<AttentionWeights> attention;
};

// Backpropagates d(loss)/d(logits) through one traced forward pass. The
// output-layer gradient goes to d_eff (K x D, effective weights); all other
// gradients go straight into the model's parameters.
inline void backward_traced(Model& m, const Tensor& w_eff, const Example& ex, const ForwardTrace& tr,
                            std::span<const double> d_logits, Tensor& d_eff) {
  const auto& cfg = m.config;
  const std::size_t dense = m.dense_dim();
  outer_add_prefix(d_logits, tr.input, d_eff);
  if (m.sparse_dim() > 0) {
    for (auto j : ex.features.indices) {
      for (std::size_t k = 0; k < d_logits.size(); ++k) d_eff(k, dense + j) += d_logits[k];
    }
  }
  if (cfg.encoder == EncoderKind::sparse) return;

  std::vector<double> d_input(dense, 0.0);
  matTvec_add_prefix(w_eff, d_logits, d_input);
  const std::size_t off_c = cfg.embedding_dim;
  const std::size_t dc = m.context_dim();
  const std::span<const double> d_vc(d_input.data() + off_c, dc);
  switch (cfg.encoder) {
    case EncoderKind::lstm:
      lstm_context_backward(tr.lstm, d_vc, m.left_lstm, m.right_lstm);
      break;
    case EncoderKind::attentive:
      attentive_context_backward(tr.attentive, d_vc, m.attentive);
      break;
    default:
      break;
  }
  if (cfg.uses_projection()) {
    const std::size_t off_f = off_c + dc;
    std::vector<double> d_vf(cfg.feature_proj_size);
    for (std::size_t r = 0; r < d_vf.size(); ++r) d_vf[r] = d_input[off_f + r] * tr.feature_mask[r];
    auto& g = m.W_f.grad;
    for (auto j : ex.features.indices) {
      for (std::size_t r = 0; r < d_vf.size(); ++r) g(r, j) += d_vf[r];
    }
  }
}

// Mean loss over `batch`. With `accumulate`, the batch-mean gradient is added
// to every parameter's grad.
inline double batch_loss(Model& m, std::span<const Example* const> batch, Mode mode, Rng& rng, bool accumulate) {
  const Tensor w_eff = effective_label_weights(m.labels);
  Tensor d_eff(w_eff.shape());
  ForwardTrace tr;
  const double scale = 1.0 / static_cast<double>(batch.size());
  double total = 0.0;
  std::vector<double> d_logits;
  for (const Example* ex : batch) {
    forward_traced(m, w_eff, *ex, mode, rng, tr);
    const double loss = bce_loss_from_logits(tr.logits, ex->gold);
    total += loss;
    if (!accumulate) continue;
    d_logits.resize(tr.probabilities.size());
    for (std::size_t k = 0; k < d_logits.size(); ++k) d_logits[k] = (tr.probabilities[k] - ex->gold[k]) * scale;
    backward_traced(m, w_eff, *ex, tr, d_logits, d_eff);
  }
  if (accumulate) accumulate_label_gradient(d_eff, m.labels);
  return total * scale;
}

inline double batch_loss(Model& m, const std::vector<Example>& batch, Mode mode, Rng& rng, bool accumulate) {
  std::vector<const Example*> ptrs;
  for (const auto& e : batch) ptrs.push_back(&e);
  return batch_loss(m, ptrs, mode, rng, accumulate);
}

// Class probabilities for one mention. Train mode applies dropout.
inline std::vector<double> forward(const Model& m, const MentionInstance& inst, Mode mode, Rng& rng) {
  const Example ex = prepare_example(m, inst);
  ForwardTrace tr;
  forward_traced(m, effective_label_weights(m.labels), ex, mode, rng, tr);
  return tr.probabilities;
}

inline std::vector<double> forward(const Model& m, const MentionInstance& inst) {
  Rng unused(0);
  return forward(m, inst, Mode::eval, unused);
}

// Eval-mode predictions for a dataset.
inline std::vector<Prediction> predict(const Model& m, const std::vector<MentionInstance>& data) {
  const Tensor w_eff = effective_label_weights(m.labels);
  Rng unused(0);
  ForwardTrace tr;
  std::vector<Prediction> out;
  out.reserve(data.size());
  for (const auto& inst : data) {
    const Example ex = prepare_example(m, inst);
    forward_traced(m, w_eff, ex, Mode::eval, unused, tr);
    out.push_back({tr.probabilities, predict_types(tr.probabilities, m.config.threshold), tr.attention});
  }
  return out;
}

inline std::vector<LabelPair<std::string>> label_pairs(const Model& m, const std::vector<MentionInstance>& data,
                                                       const std::vector<Prediction>& preds) {
  std::vector<LabelPair<std::string>> pairs;
  pairs.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    LabelPair<std::string> p;
    p.gold = gold_label_set(data[i].labels, m.types, m.config.expand_ancestors);
    for (auto k : preds[i].predicted) p.predicted.insert(m.types.type(k).str());
    pairs.push_back(std::move(p));
  }
  return pairs;
}

inline EvalResult evaluate_dataset(const Model& m, const std::vector<MentionInstance>& data) {
  if (data.empty()) throw ValidationError("cannot evaluate an empty dataset");
  const auto preds = predict(m, data);
  return evaluate_pairs(label_pairs(m, data, preds));
}

// ---------------------------------------------------------------------------

struct EpochStats {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  EvalResult dev;
};

struct TrainResult {
  Model model;  // snapshot from the epoch with the best dev micro F1
  std::vector<EpochStats> history;
  std::size_t best_epoch = 0;
};

using EpochCallback = std::function<void(const EpochStats&)>;

inline TrainResult train(const ModelConfig& config, const std::vector<MentionInstance>& train_set,
                         const std::vector<MentionInstance>& dev_set, std::shared_ptr<const EmbeddingTable> embeddings,
                         std::shared_ptr<const ClusterTable> clusters = nullptr, const EpochCallback& on_epoch = {}) {
  config.validate();
  if (train_set.empty()) throw ValidationError("training set is empty");
  if (dev_set.empty()) throw ValidationError("development set is empty");
  if (config.encoder != EncoderKind::sparse && !embeddings) throw ValidationError("neural encoders need embeddings");

  FeatureIndex index;
  if (config.uses_features()) {
    index = build_feature_index(train_set, clusters.get(), FeatureOptions{config.feature_context_width});
  }
  Model model = make_model(config, TypeSystem::from_instances(train_set), std::move(index), std::move(embeddings),
                           std::move(clusters));
  Rng rng(config.seed);
  initialize_parameters(model, rng);

  const auto examples = prepare_examples(model, train_set, true);
  const AdamConfig adam{config.learning_rate, config.beta1, config.beta2, config.epsilon};
  std::vector<std::size_t> order(examples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  TrainResult result;
  double best_score = -1.0;
  std::vector<const Example*> batch;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    rng.shuffle(order);
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      batch.clear();
      for (std::size_t i = start; i < end; ++i) batch.push_back(&examples[order[i]]);
      model.zero_grad();
      const double loss = batch_loss(model, batch, Mode::train, rng, true);
      if (!std::isfinite(loss)) {
        throw TrainingError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                            std::to_string(batches + 1) + " (instances " + std::to_string(start) + "-" +
                            std::to_string(end - 1) + " of the shuffled order)");
      }
      for (auto* p : model.parameters()) adam_step(*p, adam);
      loss_sum += loss;
      ++batches;
    }
    EpochStats stats{epoch, loss_sum / static_cast<double>(batches), evaluate_dataset(model, dev_set)};
    result.history.push_back(stats);
    if (on_epoch) on_epoch(stats);
    if (stats.dev.micro_f1 > best_score) {
      best_score = stats.dev.micro_f1;
      result.best_epoch = epoch;
      result.model = model;
    }
  }
  return result;
}

}  // namespace figet
