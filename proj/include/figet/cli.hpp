#pragma once

// Command-line front end: train, evaluate, predict, analyze-attention and
// export-label-pca. Exit codes: 0 success, 1 invalid input or usage, 2
// runtime failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "figet/analysis.hpp"
#include "figet/config.hpp"
#include "figet/corpus.hpp"
#include "figet/model.hpp"
#include "figet/model_io.hpp"

namespace figet::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitFailure = 2;

// Config file path, data and table paths, and command-line overrides.
struct RunConfig {
  std::string config_path;
  std::string train_path, dev_path, test_path;
  std::string embeddings_path, clusters_path;
  std::string model_in, model_out;
  std::string report_path, csv_path;
  std::vector<std::string> overrides;  // key=value, applied after the file
  bool drop_pronouns = false;

  void require_inputs(std::initializer_list<const std::string*> paths) const {
    for (const auto* p : paths) {
      if (!p->empty() && !std::filesystem::exists(*p)) throw ValidationError("input file not found: " + *p);
    }
  }

  ModelConfig model_config() const {
    ModelConfig cfg = config_path.empty() ? ModelConfig{} : load_config_file(config_path);
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ValidationError("override '" + kv + "' is not key=value");
      set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    cfg.validate();
    return cfg;
  }
};

namespace detail {

inline std::vector<MentionInstance> read_data(const std::string& path, bool drop_pronouns) {
  auto data = load_dataset(path);
  if (drop_pronouns) data = drop_pronominal(std::move(data));
  if (data.empty()) throw ValidationError(path + " has no mentions");
  return data;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  return out;
}

inline std::string absolute(const std::string& p) {
  return p.empty() ? p : std::filesystem::absolute(p).lexically_normal().string();
}

inline void write_report(std::ostream& out, const EvalResult& r) {
  for (const auto& [k, v] : metric_fields(r)) out << k << '=' << figet::detail::full_precision(v) << '\n';
}

inline Model open_model(const RunConfig& rc) {
  rc.require_inputs({&rc.model_in, &rc.embeddings_path, &rc.clusters_path});
  Model m = load_model(rc.model_in);
  attach_resources(m, rc.embeddings_path, rc.clusters_path);
  return m;
}

}  // namespace detail

inline int run_train(const RunConfig& rc, std::ostream& out, std::ostream& err) {
  rc.require_inputs({&rc.config_path, &rc.train_path, &rc.dev_path, &rc.embeddings_path, &rc.clusters_path});
  const ModelConfig cfg = rc.model_config();
  const auto train_set = detail::read_data(rc.train_path, rc.drop_pronouns);
  const auto dev_set = detail::read_data(rc.dev_path, rc.drop_pronouns);
  std::shared_ptr<const EmbeddingTable> embeddings;
  if (cfg.encoder != EncoderKind::sparse) {
    if (rc.embeddings_path.empty()) throw ValidationError("--embeddings is required for neural encoders");
    embeddings = std::make_shared<const EmbeddingTable>(load_embedding_table(rc.embeddings_path, cfg.embedding_dim));
  }
  std::shared_ptr<const ClusterTable> clusters;
  if (!rc.clusters_path.empty()) clusters = std::make_shared<const ClusterTable>(load_cluster_table(rc.clusters_path));

  auto result = train(cfg, train_set, dev_set, embeddings, clusters, [&](const EpochStats& s) {
    err << "epoch " << s.epoch << " loss=" << figet::detail::full_precision(s.train_loss)
        << " dev_micro_f1=" << figet::detail::full_precision(s.dev.micro_f1) << '\n';
  });
  result.model.embeddings_path = detail::absolute(rc.embeddings_path);
  result.model.clusters_path = detail::absolute(rc.clusters_path);
  save_model(result.model, rc.model_out);
  out << "best_epoch=" << result.best_epoch << '\n';
  return kExitOk;
}

inline int run_evaluate(const RunConfig& rc, std::ostream& out, std::ostream&) {
  rc.require_inputs({&rc.test_path});
  const Model m = detail::open_model(rc);
  const auto data = detail::read_data(rc.test_path, rc.drop_pronouns);
  const auto result = evaluate_dataset(m, data);
  if (!rc.report_path.empty()) {
    auto f = detail::open_output(rc.report_path);
    detail::write_report(f, result);
  }
  if (!rc.csv_path.empty()) {
    auto f = detail::open_output(rc.csv_path);
    f << "metric,value\n";
    for (const auto& [k, v] : metric_fields(result)) f << k << ',' << figet::detail::full_precision(v) << '\n';
  }
  detail::write_report(out, result);
  return kExitOk;
}

// One CSV row per mention: predicted set then every type's probability.
inline int run_predict(const RunConfig& rc, std::ostream& out, std::ostream&) {
  rc.require_inputs({&rc.test_path});
  const Model m = detail::open_model(rc);
  const auto data = detail::read_data(rc.test_path, rc.drop_pronouns);
  const auto preds = predict(m, data);
  std::ofstream file;
  if (!rc.report_path.empty()) file = detail::open_output(rc.report_path);
  std::ostream& o = rc.report_path.empty() ? out : file;
  o << "mention,predicted";
  for (const auto& t : m.types.type_strings()) o << ",p" << t;
  o << '\n';
  for (std::size_t i = 0; i < preds.size(); ++i) {
    std::string set;
    for (auto k : preds[i].predicted) set += (set.empty() ? "" : " ") + m.types.type(k).str();
    o << i << ',' << figet::detail::csv_field(set);
    for (double p : preds[i].probabilities) o << ',' << figet::detail::full_precision(p);
    o << '\n';
  }
  return kExitOk;
}

inline int run_attention(const RunConfig& rc, const std::string& table_path, const std::string& weights_path,
                         std::size_t top, std::ostream& out, std::ostream&) {
  rc.require_inputs({&rc.test_path});
  const Model m = detail::open_model(rc);
  const auto data = detail::read_data(rc.test_path, rc.drop_pronouns);
  const auto rows = attention_summary(m, data, top);
  if (!rc.report_path.empty()) {
    auto f = detail::open_output(rc.report_path);
    write_attention_csv(f, rows);
  }
  if (!table_path.empty()) {
    auto f = detail::open_output(table_path);
    write_attention_table(f, rows);
  }
  if (!weights_path.empty()) {
    auto f = detail::open_output(weights_path);
    write_attention_weights_csv(f, m, data);
  }
  write_attention_table(out, rows);
  return kExitOk;
}

inline int run_pca(const RunConfig& rc, std::ostream& out, std::ostream&) {
  rc.require_inputs({&rc.model_in});
  const Model m = load_model(rc.model_in);
  const auto points = pca_label_embeddings(m);
  if (rc.report_path.empty()) {
    write_pca_csv(out, points);
  } else {
    auto f = detail::open_output(rc.report_path);
    write_pca_csv(f, points);
  }
  return kExitOk;
}

inline int dispatch(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Fine-grained entity type classification"};
  app.name("figet");
  app.require_subcommand(1);

  RunConfig rc;
  std::string table_path, weights_path;
  std::size_t top_words = 3;

  auto add_model_inputs = [&](CLI::App* sub) {
    sub->add_option("--model", rc.model_in, "Trained model file")->required();
    sub->add_option("--embeddings", rc.embeddings_path, "Embedding table (default: path recorded in the model)");
    sub->add_option("--clusters", rc.clusters_path, "Cluster table (default: path recorded in the model)");
    sub->add_flag("--drop-pronouns", rc.drop_pronouns, "Skip mentions headed by a personal pronoun");
  };

  auto* train_cmd = app.add_subcommand("train", "Train a model and keep the best epoch on the dev set");
  train_cmd->add_option("--config", rc.config_path, "key=value model config file");
  train_cmd->add_option("--train", rc.train_path, "Training mentions (JSON lines)")->required();
  train_cmd->add_option("--dev", rc.dev_path, "Development mentions (JSON lines)")->required();
  train_cmd->add_option("--embeddings", rc.embeddings_path, "Pre-trained word vectors (text)");
  train_cmd->add_option("--clusters", rc.clusters_path, "Brown clusters: token<TAB>bits");
  train_cmd->add_option("--out", rc.model_out, "Where to write the model")->required();
  train_cmd->add_option("--set", rc.overrides, "Config override key=value (repeatable)");
  train_cmd->add_flag("--drop-pronouns", rc.drop_pronouns, "Skip mentions headed by a personal pronoun");
  std::map<std::string, std::string> flag_values;
  for (const auto& [flag, key] : std::vector<std::pair<std::string, std::string>>{
           {"--encoder", "encoder"},
           {"--epochs", "epochs"},
           {"--batch-size", "batch_size"},
           {"--learning-rate", "learning_rate"},
           {"--dropout", "dropout"},
           {"--window", "window"},
           {"--seed", "seed"},
           {"--threshold", "threshold"}}) {
    train_cmd->add_option(flag, flag_values[key], "Overrides config key " + key);
  }
  bool hand_crafted = false, hierarchical = false;
  train_cmd->add_flag("--hand-crafted", hand_crafted, "Add projected hand-crafted features");
  train_cmd->add_flag("--hierarchical", hierarchical, "Use hierarchical label encoding");

  auto* eval_cmd = app.add_subcommand("evaluate", "Score a model on labelled mentions");
  add_model_inputs(eval_cmd);
  eval_cmd->add_option("--test", rc.test_path, "Mentions to score")->required();
  eval_cmd->add_option("--report", rc.report_path, "key=value report file");
  eval_cmd->add_option("--csv", rc.csv_path, "metric,value CSV file");

  auto* predict_cmd = app.add_subcommand("predict", "Type probabilities and predicted sets per mention");
  add_model_inputs(predict_cmd);
  predict_cmd->add_option("--test", rc.test_path, "Mentions to type")->required();
  predict_cmd->add_option("--out", rc.report_path, "CSV output (default: stdout)");

  auto* att_cmd = app.add_subcommand("analyze-attention", "Per-type statistics of the most attended context word");
  add_model_inputs(att_cmd);
  att_cmd->add_option("--data", rc.test_path, "Labelled mentions")->required();
  att_cmd->add_option("--out", rc.report_path, "Summary CSV");
  att_cmd->add_option("--table", table_path, "Human-readable summary table");
  att_cmd->add_option("--weights", weights_path, "Per-token attention weights CSV");
  att_cmd->add_option("--top", top_words, "Frequent words per type");

  auto* pca_cmd = app.add_subcommand("export-label-pca", "2-D PCA of the label embeddings");
  pca_cmd->add_option("--model", rc.model_in, "Trained model file")->required();
  pca_cmd->add_option("--out", rc.report_path, "CSV output (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitInvalid;
  }

  try {
    if (*train_cmd) {
      for (const auto& [key, value] : flag_values) {
        if (!value.empty()) rc.overrides.push_back(key + "=" + value);
      }
      if (hand_crafted) rc.overrides.push_back("use_hand_crafted=true");
      if (hierarchical) rc.overrides.push_back("use_hierarchical=true");
      return run_train(rc, out, err);
    }
    if (*eval_cmd) return run_evaluate(rc, out, err);
    if (*predict_cmd) return run_predict(rc, out, err);
    if (*att_cmd) return run_attention(rc, table_path, weights_path, top_words, out, err);
    if (*pca_cmd) return run_pca(rc, out, err);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitInvalid;
}

}  // namespace figet::cli
