/*
 * Copyright 2026 The CBOS Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "cbos/subword.h"

#include <gtest/gtest.h>

#include <random>

#include "cbos/error.h"
#include "oracles.h"

namespace cbos {
namespace {

using Strings = std::vector<std::string>;

TEST(ExtractNgrams, HandEnumeratedCases) {
  EXPECT_EQ(extract_ngrams("ab", 3, 6), (Strings{"<ab", "ab>"}));
  EXPECT_TRUE(extract_ngrams("a", 3, 6).empty());
  EXPECT_EQ(extract_ngrams("paper", 3, 3),
            (Strings{"<pa", "pap", "ape", "per", "er>"}));
  EXPECT_TRUE(extract_ngrams("", 3, 6).empty());
}

TEST(ExtractNgrams, StartMajorShortestFirst) {
  EXPECT_EQ(extract_ngrams("abc", 2, 3),
            (Strings{"<a", "<ab", "ab", "abc", "bc", "bc>", "c>"}));
}

TEST(ExtractNgrams, CountsCodePointsNotBytes) {
  // "αβ" is 4 bytes but 2 code points; wrapped length 4.
  EXPECT_EQ(extract_ngrams("αβ", 3, 6), (Strings{"<αβ", "αβ>"}));
}

TEST(ExtractNgrams, DisabledOrInvalidRanges) {
  EXPECT_TRUE(extract_ngrams("paper", 0, 0).empty());
  EXPECT_THROW(extract_ngrams("paper", 4, 3), std::invalid_argument);
  EXPECT_THROW(extract_ngrams("paper", 0, 3), std::invalid_argument);
}

TEST(ExtractNgrams, CountFormulaAndOracleOnRandomWords) {
  const Strings alphabet = {"a", "b", "c", "é", "λ", "ж"};
  std::mt19937 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    std::string word;
    const int len = 1 + static_cast<int>(rng() % 10);
    for (int i = 0; i < len; ++i) word += alphabet[rng() % alphabet.size()];
    const int minn = 1 + static_cast<int>(rng() % 4);
    const int maxn = minn + static_cast<int>(rng() % 4);

    const auto got = extract_ngrams(word, minn, maxn);
    EXPECT_EQ(got, oracle::ngrams(word, minn, maxn)) << word;

    const int wrapped = len + 2;
    int expected = 0;
    for (int n = minn; n <= maxn; ++n) expected += std::max(0, wrapped - n + 1);
    if (minn <= wrapped && wrapped <= maxn) --expected;
    EXPECT_EQ(static_cast<int>(got.size()), expected) << word;
  }
}

TEST(HashNgram, MatchesReferenceFnv1a) {
  // Frozen from an independent FNV-1a script.
  EXPECT_EQ(oracle::fnv1a("<pa"), 1333240080u);
  EXPECT_EQ(fnv1a_hash("<pa"), 1333240080u);
  EXPECT_EQ(hash_ngram("<pa", 2'000'000), 1240080);
  EXPECT_EQ(hash_ngram("per>", 2'000'000), 1983726);
  for (const char* s : {"", "a", "hello", "<paper>", "xyz>"}) {
    EXPECT_EQ(fnv1a_hash(s), oracle::fnv1a(s)) << s;
  }
}

TEST(HashNgram, NonAsciiFollowsFastTextSignExtension) {
  // fastText xors the sign-extended byte; the textbook hash differs.
  EXPECT_EQ(fnv1a_hash("<αβ"), 3299996586u);
  EXPECT_NE(fnv1a_hash("<αβ"), oracle::fnv1a("<αβ"));
  EXPECT_EQ(hash_ngram("<αβ", 2'000'000), 1996586);
}

TEST(HashNgram, BucketOneAndDeterminism) {
  EXPECT_EQ(hash_ngram("anything", 1), 0);
  EXPECT_EQ(hash_ngram("pap", 97), hash_ngram("pap", 97));
  EXPECT_THROW(hash_ngram("pap", 0), std::invalid_argument);
}

Vocab small_vocab() {
  VocabOptions o;
  o.negative_table_size = 0;
  const Strings tokens = {"paper", "a", "paper", "word"};
  return build_vocab(tokens, o);
}

TEST(SubwordIds, InVocabularyWord) {
  const auto vocab = small_vocab();
  const SubwordConfig cfg{3, 3, 1000};
  const auto ids = subword_ids("paper", vocab, cfg);
  ASSERT_TRUE(ids.word_id);
  EXPECT_EQ(*ids.word_id, 0);
  ASSERT_EQ(ids.ngram_ids.size(), 5u);
  const Strings grams = {"<pa", "pap", "ape", "per", "er>"};
  for (std::size_t i = 0; i < grams.size(); ++i) {
    EXPECT_EQ(ids.ngram_ids[i],
              vocab.size() + static_cast<std::int32_t>(oracle::fnv1a(grams[i]) % 1000));
  }
  EXPECT_EQ(ids.all().size(), 1 + extract_ngrams("paper", 3, 3).size());
}

TEST(SubwordIds, ShortWordHasOnlyItsRow) {
  const auto vocab = small_vocab();
  const auto ids = subword_ids("a", vocab, SubwordConfig{3, 6, 1000});
  EXPECT_EQ(ids.all(), (std::vector<std::int32_t>{*vocab.lookup("a")}));
  EXPECT_TRUE(subword_ids("xy", vocab, SubwordConfig{5, 6, 1000}).ngram_ids.empty());
}

TEST(SubwordIds, OovWordGetsOnlyNgrams) {
  const auto vocab = small_vocab();
  const SubwordConfig cfg{3, 6, 50};
  const auto ids = subword_ids("papers", vocab, cfg);
  EXPECT_FALSE(ids.word_id);
  const auto grams = oracle::ngrams("papers", 3, 6);
  ASSERT_EQ(ids.ngram_ids.size(), grams.size());
  for (std::size_t i = 0; i < grams.size(); ++i) {
    EXPECT_EQ(ids.ngram_ids[i], vocab.size() + static_cast<std::int32_t>(
                                                   oracle::fnv1a(grams[i]) % 50));
  }
}

TEST(SubwordIds, RowsStayInsideInputMatrix) {
  const auto vocab = small_vocab();
  const SubwordConfig cfg{1, 6, 7};
  const SubwordTable table(vocab, cfg);
  for (std::int32_t w = 0; w < vocab.size(); ++w) {
    const auto ids = table.ids(w);
    ASSERT_FALSE(ids.empty());
    EXPECT_EQ(ids[0], w);
    EXPECT_EQ(std::vector<std::int32_t>(ids.begin(), ids.end()),
              subword_ids(vocab.word(w), vocab, cfg).all());
    for (std::size_t i = 1; i < ids.size(); ++i) {
      EXPECT_GE(ids[i], vocab.size());
      EXPECT_LT(ids[i], vocab.size() + 7);
    }
  }
}

TEST(SubwordConfig, Validation) {
  EXPECT_NO_THROW((SubwordConfig{3, 6, 10}.validate()));
  EXPECT_NO_THROW((SubwordConfig{0, 0, 0}.validate()));
  EXPECT_THROW((SubwordConfig{4, 3, 10}.validate()), ConfigError);
  EXPECT_THROW((SubwordConfig{3, 6, 0}.validate()), ConfigError);
  EXPECT_FALSE((SubwordConfig{0, 0, 2'000'000}.enabled()));
}

}  // namespace
}  // namespace cbos
