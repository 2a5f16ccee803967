#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace figet;

namespace {

MentionInstance mention(std::vector<std::string> tokens, std::size_t start, std::size_t end, std::string label,
                        std::optional<std::string> parent) {
  MentionInstance m;
  m.tokens = std::move(tokens);
  m.mention_start = start;
  m.mention_end = end;
  m.labels = {std::move(label)};
  m.parent_token = std::move(parent);
  return m;
}

// Window 1 and a zero scoring vector: both positions tie and the argmax
// falls on the left neighbour.
Model uniform_attention_model() {
  auto cfg = figet::testing::toy_config(EncoderKind::attentive, false, false);
  cfg.window = 1;
  auto m = make_model(cfg, TypeSystem({"/location", "/person"}), FeatureIndex{},
                      figet::testing::random_table({"in", "Paris", "met", "Obama", "."}, 4, 1));
  Rng rng(2);
  initialize_parameters(m, rng);
  m.attentive.W_a.value.fill(0.0);
  return m;
}

}  // namespace

TEST(AttentionSummary, TiesGoToTheWordBeforeTheMention) {
  const auto m = uniform_attention_model();
  const std::vector<MentionInstance> data = {
      mention({"in", "Paris", "."}, 1, 2, "/location", std::string("in")),
      mention({"met", "Obama", "."}, 1, 2, "/person", std::string("met")),
      mention({"in", "Paris"}, 1, 2, "/location", std::string(".")),
  };
  const auto rows = attention_summary(m, data);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].type, "/location");
  EXPECT_EQ(rows[0].mentions, 2u);
  EXPECT_DOUBLE_EQ(rows[0].before_fraction, 1.0);
  EXPECT_DOUBLE_EQ(rows[0].after_fraction, 0.0);
  EXPECT_DOUBLE_EQ(*rows[0].parent_fraction, 0.5);
  ASSERT_EQ(rows[0].frequent_words.size(), 1u);
  EXPECT_EQ(rows[0].frequent_words[0], (std::pair<std::string, std::size_t>{"in", 2}));
  EXPECT_EQ(rows[1].type, "/person");
  EXPECT_DOUBLE_EQ(*rows[1].parent_fraction, 1.0);
  EXPECT_EQ(format_attention_row(rows[1]), "/person 1.000 1.000 0.000 met");
}

TEST(AttentionSummary, MissingParentsAreReportedAsAbsent) {
  const auto m = uniform_attention_model();
  const std::vector<MentionInstance> data = {mention({"in", "Paris"}, 1, 2, "/location", std::nullopt)};
  const auto rows = attention_summary(m, data);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_FALSE(rows[0].parent_fraction.has_value());
  EXPECT_EQ(format_attention_row(rows[0]), "/location - 1.000 0.000 in");
  std::ostringstream csv;
  write_attention_csv(csv, rows);
  EXPECT_EQ(csv.str(), "type,mentions,parent_fraction,before_fraction,after_fraction,frequent_words\n"
                       "/location,1,,1,0,in:1\n");
}

TEST(AttentionSummary, RequiresAttentiveModel) {
  auto m = figet::testing::toy_model(figet::testing::toy_config(EncoderKind::lstm, false, false));
  EXPECT_THROW(attention_summary(m, figet::testing::toy_instances()), ValidationError);
}

TEST(AttentionWeightsCsv, OneRowPerPosition) {
  const auto m = uniform_attention_model();
  std::ostringstream out;
  write_attention_weights_csv(out, m, {mention({"in", "Paris"}, 1, 2, "/location", std::nullopt)});
  EXPECT_EQ(out.str(), "mention,side,position,token,weight\n0,left,1,in,0.5\n0,right,1,<PAD>,0.5\n");
}

TEST(Pca, RankOneData) {
  Tensor rows({4, 3}, {1, 2, 2,  //
                       2, 4, 4,  //
                       -1, -2, -2,  //
                       0, 0, 0});
  const auto p = pca_project(rows);
  // Direction (1,2,2)/3, scores t * 3 around the mean t = 0.5.
  const double ts[] = {1, 2, -1, 0};
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_NEAR(p[i].first, (ts[i] - 0.5) * 3.0, 1e-12);
    EXPECT_NEAR(p[i].second, 0.0, 1e-12);
  }
}

TEST(Pca, IdenticalRowsCollapseToOrigin) {
  Tensor rows({3, 2}, {1.5, -2, 1.5, -2, 1.5, -2});
  for (const auto& [x, y] : pca_project(rows)) {
    EXPECT_EQ(x, 0.0);
    EXPECT_EQ(y, 0.0);
  }
}

TEST(Pca, TwoDimensionalClosedForm) {
  const double pts[3][2] = {{0, 0}, {4, 1}, {1, 3}};
  Tensor rows({3, 2}, {0, 0, 4, 1, 1, 3});
  double mx = 0, my = 0;
  for (auto& q : pts) mx += q[0] / 3, my += q[1] / 3;
  double a = 0, b = 0, c = 0;
  for (auto& q : pts) {
    a += (q[0] - mx) * (q[0] - mx);
    b += (q[0] - mx) * (q[1] - my);
    c += (q[1] - my) * (q[1] - my);
  }
  const double l1 = (a + c) / 2 + std::sqrt((a - c) * (a - c) / 4 + b * b);
  const double l2 = (a + c) / 2 - std::sqrt((a - c) * (a - c) / 4 + b * b);
  auto unit = [](double x, double y) {
    const double n = std::hypot(x, y);
    x /= n, y /= n;
    if (std::abs(y) > std::abs(x) ? y < 0 : x < 0) x = -x, y = -y;
    return std::pair{x, y};
  };
  const auto v1 = unit(b, l1 - a);
  const auto v2 = unit(b, l2 - a);
  const auto p = pca_project(rows);
  for (std::size_t i = 0; i < 3; ++i) {
    const double dx = pts[i][0] - mx, dy = pts[i][1] - my;
    EXPECT_NEAR(p[i].first, dx * v1.first + dy * v1.second, 1e-12);
    EXPECT_NEAR(p[i].second, dx * v2.first + dy * v2.second, 1e-12);
  }
}

TEST(Pca, InvariantToRotationUpToSign) {
  Rng rng(31);
  Tensor rows({6, 2});
  fill_uniform(rows, rng, 3.0);
  const double th = 0.7;
  Tensor rotated({6, 2});
  for (std::size_t i = 0; i < 6; ++i) {
    rotated(i, 0) = std::cos(th) * rows(i, 0) - std::sin(th) * rows(i, 1);
    rotated(i, 1) = std::sin(th) * rows(i, 0) + std::cos(th) * rows(i, 1);
  }
  const auto a = pca_project(rows), b = pca_project(rotated);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_NEAR(std::abs(a[i].first), std::abs(b[i].first), 1e-10);
    EXPECT_NEAR(std::abs(a[i].second), std::abs(b[i].second), 1e-10);
  }
}

TEST(Pca, LabelEmbeddingsOfModel) {
  auto m = figet::testing::toy_model(figet::testing::toy_config(EncoderKind::averaging, false, true));
  const auto pts = pca_label_embeddings(m);
  ASSERT_EQ(pts.size(), 4u);
  EXPECT_EQ(pts[0].type, "/location");
  double sx = 0;
  for (const auto& p : pts) sx += p.x;
  EXPECT_NEAR(sx, 0.0, 1e-12);
  std::ostringstream out;
  write_pca_csv(out, pts);
  EXPECT_EQ(out.str().substr(0, 9), "type,x,y\n");

  auto single = make_model(figet::testing::toy_config(EncoderKind::averaging, false, false), TypeSystem({"/a"}),
                           FeatureIndex{}, m.embeddings);
  EXPECT_THROW(pca_label_embeddings(single), ValidationError);
}
