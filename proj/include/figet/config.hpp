#pragma once

// Model hyperparameters and their key=value text form.

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>

#include "figet/encoders.hpp"
#include "figet/error.hpp"

namespace figet {

struct ModelConfig {
  EncoderKind encoder = EncoderKind::attentive;
  bool use_hand_crafted = false;
  bool use_hierarchical = false;
  std::size_t embedding_dim = 300;    // D_m
  std::size_t hidden_size = 100;      // D_h
  std::size_t attention_size = 100;   // D_a
  std::size_t feature_proj_size = 50; // D_l
  std::size_t window = 10;            // C
  double dropout = 0.5;
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::size_t batch_size = 1000;
  std::size_t epochs = 5;
  double threshold = 0.5;
  std::uint64_t seed = 1;
  double init_scale = 0.08;
  bool expand_ancestors = true;
  std::size_t feature_context_width = 1;

  // The sparse baseline always reads hand-crafted features.
  bool uses_features() const { return use_hand_crafted || encoder == EncoderKind::sparse; }
  bool uses_projection() const { return use_hand_crafted && encoder != EncoderKind::sparse; }

  void validate() const {
    auto positive = [](std::size_t v, const char* name) {
      if (v == 0) throw ValidationError(std::string(name) + " must be positive");
    };
    positive(embedding_dim, "embedding_dim");
    positive(hidden_size, "hidden_size");
    positive(attention_size, "attention_size");
    positive(feature_proj_size, "feature_proj_size");
    positive(window, "window");
    positive(batch_size, "batch_size");
    positive(epochs, "epochs");
    if (!(threshold > 0.0 && threshold < 1.0)) throw ValidationError("threshold must be in (0, 1)");
    if (!(dropout >= 0.0 && dropout < 1.0)) throw ValidationError("dropout must be in [0, 1)");
    if (!(learning_rate > 0.0)) throw ValidationError("learning_rate must be positive");
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
      throw ValidationError("adam betas must be in [0, 1)");
    }
    if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
    if (!(init_scale > 0.0)) throw ValidationError("init_scale must be positive");
  }
};

namespace detail {

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace detail

// Sets one field from its text form. Throws ValidationError for unknown keys
// or unparsable values.
inline void set_config_value(ModelConfig& cfg, const std::string& key, const std::string& value) {
  auto as_size = [&]() -> std::size_t {
    std::size_t v = 0;
    auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || p != value.data() + value.size()) {
      throw ValidationError("config key '" + key + "': expected a non-negative integer, got '" + value + "'");
    }
    return v;
  };
  auto as_double = [&]() -> double {
    double v = 0;
    auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || p != value.data() + value.size()) {
      throw ValidationError("config key '" + key + "': expected a number, got '" + value + "'");
    }
    return v;
  };
  auto as_bool = [&]() -> bool {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw ValidationError("config key '" + key + "': expected true or false, got '" + value + "'");
  };

  if (key == "encoder") cfg.encoder = parse_encoder_kind(value);
  else if (key == "use_hand_crafted") cfg.use_hand_crafted = as_bool();
  else if (key == "use_hierarchical") cfg.use_hierarchical = as_bool();
  else if (key == "embedding_dim") cfg.embedding_dim = as_size();
  else if (key == "hidden_size") cfg.hidden_size = as_size();
  else if (key == "attention_size") cfg.attention_size = as_size();
  else if (key == "feature_proj_size") cfg.feature_proj_size = as_size();
  else if (key == "window") cfg.window = as_size();
  else if (key == "dropout") cfg.dropout = as_double();
  else if (key == "learning_rate") cfg.learning_rate = as_double();
  else if (key == "beta1") cfg.beta1 = as_double();
  else if (key == "beta2") cfg.beta2 = as_double();
  else if (key == "epsilon") cfg.epsilon = as_double();
  else if (key == "batch_size") cfg.batch_size = as_size();
  else if (key == "epochs") cfg.epochs = as_size();
  else if (key == "threshold") cfg.threshold = as_double();
  else if (key == "seed") cfg.seed = as_size();
  else if (key == "init_scale") cfg.init_scale = as_double();
  else if (key == "expand_ancestors") cfg.expand_ancestors = as_bool();
  else if (key == "feature_context_width") cfg.feature_context_width = as_size();
  else throw ValidationError("unknown config key '" + key + "'");
}

// "key = value" lines; '#' starts a comment. Keys not mentioned keep the
// values already in `base`.
inline ModelConfig parse_config_text(const std::string& text, ModelConfig base = {}) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto t = detail::trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ValidationError("config line " + std::to_string(lineno) + ": expected key=value");
    set_config_value(base, detail::trim(std::string_view(t).substr(0, eq)), detail::trim(std::string_view(t).substr(eq + 1)));
  }
  return base;
}

inline ModelConfig load_config_file(const std::string& path, ModelConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), base);
}

inline std::string config_to_text(const ModelConfig& c) {
  const auto b = [](bool v) { return v ? std::string("true") : std::string("false"); };
  std::ostringstream o;
  o << "encoder=" << to_string(c.encoder) << '\n'
    << "use_hand_crafted=" << b(c.use_hand_crafted) << '\n'
    << "use_hierarchical=" << b(c.use_hierarchical) << '\n'
    << "embedding_dim=" << c.embedding_dim << '\n'
    << "hidden_size=" << c.hidden_size << '\n'
    << "attention_size=" << c.attention_size << '\n'
    << "feature_proj_size=" << c.feature_proj_size << '\n'
    << "window=" << c.window << '\n'
    << "dropout=" << detail::format_double(c.dropout) << '\n'
    << "learning_rate=" << detail::format_double(c.learning_rate) << '\n'
    << "beta1=" << detail::format_double(c.beta1) << '\n'
    << "beta2=" << detail::format_double(c.beta2) << '\n'
    << "epsilon=" << detail::format_double(c.epsilon) << '\n'
    << "batch_size=" << c.batch_size << '\n'
    << "epochs=" << c.epochs << '\n'
    << "threshold=" << detail::format_double(c.threshold) << '\n'
    << "seed=" << c.seed << '\n'
    << "init_scale=" << detail::format_double(c.init_scale) << '\n'
    << "expand_ancestors=" << b(c.expand_ancestors) << '\n'
    << "feature_context_width=" << c.feature_context_width << '\n';
  return o.str();
}

}  // namespace figet
