#include <gtest/gtest.h>

#include "figet/figet.hpp"

using namespace figet;

namespace {

using Pairs = std::vector<LabelPair<std::string>>;

const Pairs& worked() {
  static const Pairs p = {{{"p", "a"}, {"p"}}, {{"l"}, {"l", "c"}}};
  return p;
}

// Naive re-derivation from the definitions.
struct Oracle {
  double strict, macro_p, macro_r, micro_p, micro_r;
};

Oracle brute(const std::vector<LabelPair<int>>& pairs) {
  double exact = 0, mp = 0, mr = 0, both = 0, pred = 0, gold = 0;
  for (const auto& p : pairs) {
    double inter = 0;
    for (int x : p.predicted) inter += p.gold.count(x);
    exact += (p.gold == p.predicted) ? 1 : 0;
    if (!p.predicted.empty()) mp += inter / static_cast<double>(p.predicted.size());
    if (!p.gold.empty()) mr += inter / static_cast<double>(p.gold.size());
    both += inter;
    pred += static_cast<double>(p.predicted.size());
    gold += static_cast<double>(p.gold.size());
  }
  const double n = static_cast<double>(pairs.size());
  return {exact / n, mp / n, mr / n, pred ? both / pred : 0.0, gold ? both / gold : 0.0};
}

std::set<int> random_set(Rng& rng, int types, bool allow_empty) {
  std::set<int> s;
  do {
    for (int t = 0; t < types; ++t) {
      if (rng.uniform() < 0.15) s.insert(t);
    }
  } while (!allow_empty && s.empty());
  return s;
}

}  // namespace

TEST(Metrics, WorkedExample) {
  const auto r = evaluate_pairs(worked());
  EXPECT_EQ(r.strict_accuracy, 0.0);
  EXPECT_EQ(r.macro_precision, 0.75);
  EXPECT_EQ(r.macro_recall, 0.75);
  EXPECT_EQ(r.macro_f1, 0.75);
  EXPECT_DOUBLE_EQ(r.micro_precision, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.micro_recall, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.micro_f1, 2.0 / 3.0);
}

TEST(Metrics, StrictAccuracyExamples) {
  const Pairs half = {{{"p", "a"}, {"p"}}, {{"l"}, {"l"}}};
  EXPECT_EQ(strict_accuracy<std::string>(half), 0.5);
  const Pairs none = {{{"p"}, {"l"}}};
  EXPECT_EQ(strict_accuracy<std::string>(none), 0.0);
}

TEST(Metrics, StrictCanExceedMicroF1) {
  // One exact single-type match plus one mention with many gold types.
  const Pairs p = {{{"a"}, {"a"}}, {{"b", "c", "d", "e", "f", "g", "h", "i", "j", "k"}, {"z"}}};
  const auto r = evaluate_pairs(p);
  EXPECT_EQ(r.strict_accuracy, 0.5);
  EXPECT_LT(r.micro_f1, r.strict_accuracy);
  EXPECT_GE(r.macro_f1, r.strict_accuracy);
}

TEST(Metrics, SinglePair) {
  const Pairs p = {{{"a", "b"}, {"a"}}};
  const auto r = evaluate_pairs(p);
  EXPECT_DOUBLE_EQ(r.macro_precision, 1.0);
  EXPECT_DOUBLE_EQ(r.macro_recall, 0.5);
  EXPECT_DOUBLE_EQ(r.micro_precision, 1.0);
  EXPECT_DOUBLE_EQ(r.micro_recall, 0.5);
  EXPECT_DOUBLE_EQ(r.strict_accuracy, 0.0);
}

TEST(Metrics, EmptyInputRejected) {
  const Pairs none;
  EXPECT_THROW(evaluate_pairs(none), ValidationError);
}

TEST(Metrics, HarmonicMeanOfZeros) {
  EXPECT_EQ(harmonic_mean(0.0, 0.0), 0.0);
  const Pairs p = {{{"a"}, {"b"}}};
  const auto r = evaluate_pairs(p);
  EXPECT_EQ(r.micro_f1, 0.0);
  EXPECT_EQ(r.macro_f1, 0.0);
}

TEST(Metrics, PermutationInvariant) {
  Rng rng(9);
  std::vector<LabelPair<int>> pairs;
  for (int i = 0; i < 40; ++i) pairs.push_back({random_set(rng, 8, false), random_set(rng, 8, false)});
  const auto a = evaluate_pairs(pairs);
  rng.shuffle(pairs);
  const auto b = evaluate_pairs(pairs);
  EXPECT_NEAR(a.macro_f1, b.macro_f1, 1e-15);
  EXPECT_EQ(a.micro_f1, b.micro_f1);
  EXPECT_EQ(a.strict_accuracy, b.strict_accuracy);
}

TEST(Metrics, PerfectPredictionsScoreOne) {
  Rng rng(3);
  std::vector<LabelPair<int>> pairs;
  for (int i = 0; i < 50; ++i) {
    auto g = random_set(rng, 10, false);
    pairs.push_back({g, g});
  }
  const auto r = evaluate_pairs(pairs);
  for (const auto& [name, value] : metric_fields(r)) EXPECT_EQ(value, 1.0) << name;
}

TEST(Metrics, MatchesBruteForceOracle) {
  Rng rng(2024);
  std::vector<LabelPair<int>> pairs;
  for (int i = 0; i < 1000; ++i) pairs.push_back({random_set(rng, 20, false), random_set(rng, 20, true)});
  const auto r = evaluate_pairs(pairs);
  const auto o = brute(pairs);
  EXPECT_NEAR(r.strict_accuracy, o.strict, 1e-12);
  EXPECT_NEAR(r.macro_precision, o.macro_p, 1e-12);
  EXPECT_NEAR(r.macro_recall, o.macro_r, 1e-12);
  EXPECT_NEAR(r.micro_precision, o.micro_p, 1e-12);
  EXPECT_NEAR(r.micro_recall, o.micro_r, 1e-12);
  EXPECT_NEAR(r.micro_f1, harmonic_mean(o.micro_p, o.micro_r), 1e-12);
  EXPECT_NEAR(r.macro_f1, harmonic_mean(o.macro_p, o.macro_r), 1e-12);
}

TEST(Metrics, BoundsAndOrdering) {
  Rng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<LabelPair<int>> pairs;
    const auto n = 1 + rng.index(30);
    for (std::size_t i = 0; i < n; ++i) pairs.push_back({random_set(rng, 6, false), random_set(rng, 6, true)});
    const auto r = evaluate_pairs(pairs);
    for (const auto& [name, v] : metric_fields(r)) {
      ASSERT_GE(v, 0.0) << name;
      ASSERT_LE(v, 1.0) << name;
    }
    ASSERT_LE(r.strict_accuracy, r.macro_recall + 1e-15);
    ASSERT_LE(r.strict_accuracy, r.macro_precision + 1e-15);
    ASSERT_LE(r.strict_accuracy, r.macro_f1 + 1e-15);
  }
}
