#pragma once

// Generator for a small synthetic typing corpus. The coarse type of a mention
// comes from its head word and the fine type from a single trigger word
// somewhere in the context window, so both must be read to get the label
// set right. Word vectors are clustered by word group, the way pre-trained
// embeddings cluster by meaning.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "figet/corpus.hpp"
#include "figet/tensor.hpp"

namespace figet::synthetic {

struct Options {
  std::size_t mentions = 2000;
  std::size_t embedding_dim = 16;
  std::size_t window = 5;       // triggers are placed within this distance
  std::size_t heads_per_class = 40;
  std::size_t triggers_per_group = 10;
  std::size_t modifiers = 20;
  std::size_t fillers = 80;
  std::size_t max_side_length = 7;
  double group_spread = 0.6;    // word-vector noise around the group centre
  double filler_scale = 0.3;    // filler vectors are N(0, filler_scale^2), near the origin
  std::uint64_t seed = 7;
};

struct Corpus {
  std::vector<MentionInstance> mentions;
  std::vector<std::string> vocabulary;  // excludes "unk"
  std::vector<std::vector<double>> vectors;
  std::vector<std::size_t> trigger_token;  // index into mention tokens, per mention
  std::size_t dim = 0;

  std::shared_ptr<const EmbeddingTable> embeddings() const {
    auto table = std::make_shared<EmbeddingTable>(dim);
    for (std::size_t i = 0; i < vocabulary.size(); ++i) table->add(vocabulary[i], vectors[i]);
    table->add(kUnknownToken, std::vector<double>(dim, 0.0));
    return table;
  }

  void write_embeddings(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out.precision(17);
    auto row = [&](const std::string& tok, const std::vector<double>& v) {
      out << tok;
      for (double x : v) out << ' ' << x;
      out << '\n';
    };
    for (std::size_t i = 0; i < vocabulary.size(); ++i) row(vocabulary[i], vectors[i]);
    row(kUnknownToken, std::vector<double>(dim, 0.0));
  }
};

inline const std::vector<std::string>& type_inventory() {
  static const std::vector<std::string> types = {"/location", "/location/city", "/location/country",
                                                 "/person",   "/person/artist", "/person/athlete"};
  return types;
}

inline Corpus generate(const Options& opt) {
  Rng rng(opt.seed);
  Corpus c;
  c.dim = opt.embedding_dim;

  auto centre = [&] {
    std::vector<double> v(opt.embedding_dim);
    for (auto& x : v) x = rng.normal();
    return v;
  };
  auto add_group = [&](const std::string& prefix, std::size_t n, const std::vector<double>* mid,
                       double scale = 1.0) {
    std::vector<std::size_t> ids;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> v(opt.embedding_dim);
      for (std::size_t d = 0; d < v.size(); ++d) {
        v[d] = mid ? (*mid)[d] + opt.group_spread * rng.normal() : scale * rng.normal();
      }
      ids.push_back(c.vocabulary.size());
      c.vocabulary.push_back(prefix + std::to_string(i));
      c.vectors.push_back(std::move(v));
    }
    return ids;
  };

  const auto person_mid = centre(), location_mid = centre(), trig_a_mid = centre(), trig_b_mid = centre(),
             modifier_mid = centre();
  const auto person = add_group("pers", opt.heads_per_class, &person_mid);
  const auto location = add_group("loc", opt.heads_per_class, &location_mid);
  const auto trig_a = add_group("trigA", opt.triggers_per_group, &trig_a_mid);
  const auto trig_b = add_group("trigB", opt.triggers_per_group, &trig_b_mid);
  const auto modifier = add_group("mod", opt.modifiers, &modifier_mid);
  const auto filler = add_group("w", opt.fillers, nullptr, opt.filler_scale);

  auto pick = [&](const std::vector<std::size_t>& group) { return c.vocabulary[group[rng.index(group.size())]]; };

  for (std::size_t n = 0; n < opt.mentions; ++n) {
    const bool is_person = rng.index(2) == 0;
    const bool group_a = rng.index(2) == 0;
    const bool trigger_left = rng.index(2) == 0;

    std::size_t left_len = rng.index(opt.max_side_length + 1);
    std::size_t right_len = rng.index(opt.max_side_length + 1);
    if (trigger_left && left_len == 0) left_len = 1;
    if (!trigger_left && right_len == 0) right_len = 1;

    MentionInstance inst;
    for (std::size_t i = 0; i < left_len; ++i) inst.tokens.push_back(pick(filler));
    inst.mention_start = inst.tokens.size();
    if (rng.index(2) == 0) inst.tokens.push_back(pick(modifier));
    inst.tokens.push_back(pick(is_person ? person : location));
    inst.mention_end = inst.tokens.size();
    inst.head_index = inst.mention_end - 1;
    for (std::size_t i = 0; i < right_len; ++i) inst.tokens.push_back(pick(filler));

    const std::size_t side_len = trigger_left ? left_len : right_len;
    const std::size_t distance = 1 + rng.index(std::min(side_len, opt.window));
    const std::size_t at = trigger_left ? inst.mention_start - distance : inst.mention_end + distance - 1;
    inst.tokens[at] = pick(group_a ? trig_a : trig_b);
    c.trigger_token.push_back(at);

    const std::string coarse = is_person ? "/person" : "/location";
    const std::string fine = is_person ? (group_a ? "/person/artist" : "/person/athlete")
                                       : (group_a ? "/location/city" : "/location/country");
    inst.labels = {coarse, fine};
    inst.parent_token = inst.tokens[at];
    inst.dep_role = trigger_left ? "obj" : "subj";
    c.mentions.push_back(std::move(inst));
  }
  return c;
}

}  // namespace figet::synthetic
