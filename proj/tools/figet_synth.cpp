// Writes a synthetic train/dev/test corpus and matching embeddings.

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "figet/corpus.hpp"
#include "figet/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate a synthetic entity typing corpus"};
  figet::synthetic::Options opt;
  std::string dir = ".";
  std::size_t dev = 200, test = 200;
  app.add_option("--dir", dir, "Output directory");
  app.add_option("--mentions", opt.mentions, "Total mentions");
  app.add_option("--dev", dev, "Mentions held out for dev");
  app.add_option("--test", test, "Mentions held out for test");
  app.add_option("--dim", opt.embedding_dim, "Embedding dimension");
  app.add_option("--seed", opt.seed, "Generator seed");
  app.add_option("--filler-scale", opt.filler_scale, "Scale of filler word vectors");
  CLI11_PARSE(app, argc, argv);

  if (dev + test >= opt.mentions) {
    std::cerr << "error: --dev + --test must be smaller than --mentions\n";
    return 1;
  }
  const auto corpus = figet::synthetic::generate(opt);
  const auto& all = corpus.mentions;
  const auto train_end = all.size() - dev - test;
  auto slice = [&](std::size_t a, std::size_t b) {
    return std::vector<figet::MentionInstance>(all.begin() + static_cast<std::ptrdiff_t>(a),
                                               all.begin() + static_cast<std::ptrdiff_t>(b));
  };
  try {
    std::filesystem::create_directories(dir);
    figet::write_dataset(dir + "/train.jsonl", slice(0, train_end));
    figet::write_dataset(dir + "/dev.jsonl", slice(train_end, train_end + dev));
    figet::write_dataset(dir + "/test.jsonl", slice(train_end + dev, all.size()));
    corpus.write_embeddings(dir + "/embeddings.txt");
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
