#include <set>
#include <string>

#include <gtest/gtest.h>

#include <algorithm>

#include "figet/figet.hpp"
#include "test_util.hpp"

using namespace figet;

namespace {

MentionInstance obama() {
  MentionInstance m;
  m.tokens = {"who", "Barack", "H.", "Obama", "first", "picked"};
  m.mention_start = 1;
  m.mention_end = 4;
  m.labels = {"/person"};
  m.head_index = 3;
  m.dep_role = "subj";
  m.parent_token = "picked";
  m.doc_topic = 13;
  return m;
}

}  // namespace

TEST(WordShape, Examples) {
  EXPECT_EQ(phrase_shape({"Barack", "H.", "Obama"}), "Aa A. Aa");
  EXPECT_EQ(word_shape("2016"), "#");
  EXPECT_EQ(word_shape("iPhone7"), "aAa#");
  EXPECT_EQ(word_shape("..."), ".");
  EXPECT_EQ(word_shape("U.S.A."), "A.A.A.");
}

TEST(WordShape, NoAdjacentRepeats) {
  Rng rng(12);
  const std::string alphabet = "aZ9.-xQ3";
  for (int i = 0; i < 2000; ++i) {
    std::string w;
    const auto n = 1 + rng.index(12);
    for (std::size_t k = 0; k < n; ++k) w += alphabet[rng.index(alphabet.size())];
    const auto s = word_shape(w);
    for (std::size_t k = 1; k < s.size(); ++k) ASSERT_NE(s[k], s[k - 1]) << w << " -> " << s;
  }
}

TEST(CharTrigrams, Examples) {
  EXPECT_EQ(char_trigrams("Obama"), (std::vector<std::string>{":ob", "oba", "bam", "ama", "ma:"}));
  EXPECT_EQ(char_trigrams("a"), (std::vector<std::string>{":a:"}));
  EXPECT_EQ(char_trigrams("Ng"), (std::vector<std::string>{":ng", "ng:"}));
}

TEST(CharTrigrams, CountEqualsLength) {
  Rng rng(4);
  for (int i = 0; i < 500; ++i) {
    std::string w;
    const auto n = 1 + rng.index(15);
    for (std::size_t k = 0; k < n; ++k) w += static_cast<char>('A' + rng.index(26));
    ASSERT_EQ(char_trigrams(w).size(), w.size());
  }
  // Multi-byte characters count once.
  EXPECT_EQ(char_trigrams("S\xc3\xa3o").size(), 3u);
}

TEST(ExtractFeatures, WorkedExample) {
  ClusterTable clusters;
  clusters.add("Obama", "1110");
  const auto got = extract_feature_strings(obama(), &clusters);
  const std::set<std::string> expected = {
      "HEAD=Obama",  "NONHEAD=Barack", "NONHEAD=H.",   "CLUSTER=1110",   "CHAR=:ob",
      "CHAR=oba",    "CHAR=bam",       "CHAR=ama",     "CHAR=ma:",       "SHAPE=Aa A. Aa",
      "ROLE=subj",   "CTXB=who",       "CTXA=first",   "PARENT=picked",  "TOPIC=13"};
  EXPECT_EQ(got, expected);
}

TEST(ExtractFeatures, SentenceBoundaries) {
  MentionInstance m;
  m.tokens = {"Paris", "is"};
  m.mention_start = 0;
  m.mention_end = 1;
  m.labels = {"/location"};
  auto f = extract_feature_strings(m, nullptr);
  EXPECT_EQ(f.count("CTXA=is"), 1u);
  for (const auto& s : f) EXPECT_NE(s.rfind("CTXB=", 0), 0u) << s;
  m.tokens = {"Paris"};
  f = extract_feature_strings(m, nullptr);
  for (const auto& s : f) EXPECT_NE(s.rfind("CTX", 0), 0u) << s;
}

TEST(ExtractFeatures, NoAnnotationsOnlyLexicalFeatures) {
  auto m = obama();
  m.head_index.reset();
  m.dep_role.reset();
  m.parent_token.reset();
  m.doc_topic.reset();
  for (const auto& s : extract_feature_strings(m, nullptr)) {
    const auto ns = s.substr(0, s.find('='));
    EXPECT_TRUE(ns == "HEAD" || ns == "NONHEAD" || ns == "CHAR" || ns == "SHAPE" || ns == "CTXB" || ns == "CTXA") << s;
  }
  // Last mention token is the fallback head.
  EXPECT_EQ(extract_feature_strings(m, nullptr).count("HEAD=Obama"), 1u);
}

TEST(ExtractFeatures, AnnotationMonotone) {
  ClusterTable clusters;
  clusters.add("Obama", "1110");
  auto bare = obama();
  bare.dep_role.reset();
  bare.parent_token.reset();
  bare.doc_topic.reset();
  const auto base = extract_feature_strings(bare, &clusters);
  auto richer = bare;
  richer.doc_topic = 4;
  const auto more = extract_feature_strings(richer, &clusters);
  EXPECT_TRUE(std::includes(more.begin(), more.end(), base.begin(), base.end()));
  EXPECT_EQ(more.size(), base.size() + 1);
  EXPECT_EQ(extract_feature_strings(bare, &clusters), base);
}

TEST(ExtractFeatures, WiderContext) {
  const auto f = extract_feature_strings(obama(), nullptr, FeatureOptions{2});
  EXPECT_EQ(f.count("CTXA=first"), 1u);
  EXPECT_EQ(f.count("CTXA=picked"), 1u);
  EXPECT_EQ(f.count("CTXB=who"), 1u);
}

TEST(Vectorize, KnownAndUnknown) {
  auto idx = FeatureIndex::from_names({"HEAD=Obama", "CTXB=who", "SHAPE=Aa"});
  EXPECT_TRUE(vectorize({}, idx).empty());
  const auto all = vectorize({"HEAD=Obama", "CTXB=who", "SHAPE=Aa"}, idx);
  EXPECT_EQ(all.indices, (std::vector<std::size_t>{0, 1, 2}));
  const auto mixed = vectorize({"HEAD=Obama", "HEAD=Trump", "SHAPE=Aa"}, idx);
  EXPECT_EQ(mixed.indices, (std::vector<std::size_t>{0, 2}));
  EXPECT_LE(mixed.size(), 3u);
}

TEST(FeatureIndex, FrozenAfterBuild) {
  auto idx = build_feature_index(figet::testing::toy_instances(), nullptr);
  EXPECT_TRUE(idx.frozen());
  EXPECT_GT(idx.dim(), 0u);
  EXPECT_THROW(idx.add("HEAD=new"), Error);
  for (std::size_t i = 0; i < idx.dim(); ++i) EXPECT_EQ(*idx.find(idx.name(i)), i);
}
