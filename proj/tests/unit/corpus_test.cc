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

#include "cbos/corpus.h"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "cbos/error.h"
#include "oracles.h"
#include "test_util.h"

namespace cbos {
namespace {

TEST(NormalizeText, LowercasesAndStripsPunctuation) {
  EXPECT_EQ(normalize_text("I am Reading!"), "i am reading ");
  EXPECT_EQ(normalize_text(""), "");
  EXPECT_EQ(normalize_text("a,b;c"), "a b c");
}

TEST(NormalizeText, KeepsDigitsWhitespaceAndNewlines) {
  EXPECT_EQ(normalize_text("Route 66\tTo\nLA"), "route 66\tto\nla");
}

TEST(NormalizeText, HandlesGreekAndSymbols) {
  // Diacritics are preserved; guillemets and the euro sign are P*/S*.
  EXPECT_EQ(normalize_text("Η ΑΘΗΝΑ «Ελλάδα» 5€"), "η αθηνα  ελλάδα  5 ");
  EXPECT_EQ(normalize_text("ΆΈΉ"), "άέή");
}

TEST(NormalizeText, ReportsByteOffsetOfBadUtf8) {
  try {
    normalize_text("ab\xC3(", 100);
    FAIL() << "expected DecodeError";
  } catch (const DecodeError& e) {
    EXPECT_EQ(e.offset(), 102u);
  }
  EXPECT_THROW(normalize_text("\xFF"), DecodeError);
  EXPECT_THROW(normalize_text("x\xE2\x82"), DecodeError);     // truncated
  EXPECT_THROW(normalize_text("\xC0\xAF"), DecodeError);      // overlong
  EXPECT_THROW(normalize_text("\xED\xA0\x80"), DecodeError);  // surrogate
}

TEST(NormalizeText, IdempotentOnRandomText) {
  const std::vector<std::string> pieces = {
      "A", "b", "Z", " ", "\n", "!", "?", ".", "9", "É", "ß", "Σ", "ς", "ά",
      "Ω", "€", "\u2014", "“", "x", "İ", "Ǆ", "\t", "-", "'", "文", "😀"};
  std::mt19937 rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    std::string s;
    const int len = static_cast<int>(rng() % 40);
    for (int i = 0; i < len; ++i) s += pieces[rng() % pieces.size()];
    const auto once = normalize_text(s);
    EXPECT_EQ(normalize_text(once), once) << s;
  }
}

TEST(Tokenize, SplitsOnWhitespace) {
  EXPECT_EQ(tokenize("i am reading"),
            (std::vector<std::string>{"i", "am", "reading"}));
  EXPECT_EQ(tokenize("  a  b "), (std::vector<std::string>{"a", "b"}));
  EXPECT_TRUE(tokenize("").empty());
}

TEST(Tokenize, NewlineEndsSentence) {
  const auto s = split_sentences("a\nb c");
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0], (std::vector<std::string>{"a"}));
  EXPECT_EQ(s[1], (std::vector<std::string>{"b", "c"}));
}

VocabOptions plain(std::int64_t min_count) {
  VocabOptions o;
  o.min_count = min_count;
  o.negative_table_size = 100;
  return o;
}

TEST(BuildVocab, CountsAndOrders) {
  const std::vector<std::string> tokens = {"a", "b", "a"};
  const auto v = build_vocab(tokens, plain(1));
  ASSERT_EQ(v.size(), 2);
  EXPECT_EQ(v.entry(0), (VocabEntry{"a", 2, 0}));
  EXPECT_EQ(v.entry(1), (VocabEntry{"b", 1, 1}));
  EXPECT_EQ(v.total_tokens(), 3);

  const auto filtered = build_vocab(tokens, plain(2));
  ASSERT_EQ(filtered.size(), 1);
  EXPECT_EQ(filtered.entry(0), (VocabEntry{"a", 2, 0}));
  EXPECT_EQ(filtered.total_tokens(), 2);
  EXPECT_FALSE(filtered.lookup("b"));
}

TEST(BuildVocab, EmptyStreamIsAnError) {
  EXPECT_THROW(build_vocab({}, plain(1)), EmptyVocabError);
  const std::vector<std::string> rare = {"x", "y"};
  EXPECT_THROW(build_vocab(rare, plain(2)), EmptyVocabError);
}

TEST(BuildVocab, TiesKeepFirstOccurrence) {
  const std::vector<std::string> tokens = {"c", "b", "a", "b", "c", "a"};
  const auto v = build_vocab(tokens, plain(1));
  EXPECT_EQ(v.word(0), "c");
  EXPECT_EQ(v.word(1), "b");
  EXPECT_EQ(v.word(2), "a");
}

TEST(BuildVocab, ZipfSampleMatchesIndependentCount) {
  // 1000 draws from a Zipf(1) law over 60 words using an inline LCG.
  std::vector<double> cdf;
  double z = 0;
  for (int r = 1; r <= 60; ++r) z += 1.0 / r;
  double acc = 0;
  for (int r = 1; r <= 60; ++r) cdf.push_back(acc += 1.0 / r / z);
  std::uint64_t state = 12345;
  std::vector<std::string> tokens;
  for (int i = 0; i < 1000; ++i) {
    state = state * 6364136223846793005ull + 1442695040888963407ull;
    const double u = static_cast<double>(state >> 11) / 9007199254740992.0;
    const auto rank = std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
    tokens.push_back("w" + std::to_string(rank));
  }

  const auto v = build_vocab(tokens, plain(5));
  const auto expected = oracle::ranked_counts(tokens, 5);
  ASSERT_EQ(v.size(), static_cast<std::int32_t>(expected.size()));
  std::int64_t total = 0;
  for (std::int32_t i = 0; i < v.size(); ++i) {
    EXPECT_EQ(v.word(i), expected[i].first);
    EXPECT_EQ(v.count(i), expected[i].second);
    EXPECT_EQ(v.lookup(v.word(i)), i);
    EXPECT_GE(v.count(i), 5);
    if (i > 0) EXPECT_GE(v.count(i - 1), v.count(i));
    total += expected[i].second;
  }
  EXPECT_EQ(v.total_tokens(), total);
}

TEST(BuildVocab, FromFileAndTsvDump) {
  testing::TempDir dir;
  testing::write_file(dir / "c.txt", "b a\na  b b\n\nc\n");
  const auto v = build_vocab_from_file(dir / "c.txt", plain(1));
  std::ostringstream out;
  v.dump_tsv(out);
  EXPECT_EQ(out.str(), "b\t3\t0\na\t2\t1\nc\t1\t2\n");
  EXPECT_THROW(build_vocab_from_file(dir / "missing.txt", plain(1)), Error);
}

TEST(DiscardProbability, MatchesClosedForm) {
  EXPECT_DOUBLE_EQ(discard_probability(1e-4, 1e-4), 0.0);
  EXPECT_NEAR(1.0 - discard_probability(1e-2, 1e-4), 0.11, 1e-12);
  EXPECT_NEAR(1.0 - discard_probability(1.0, 1e-4), 0.0101, 1e-12);
  EXPECT_THROW(discard_probability(0.0, 1e-4), std::domain_error);
  EXPECT_THROW(discard_probability(-0.5, 1e-4), std::domain_error);
}

TEST(DiscardProbability, MonotoneAboveThreshold) {
  const double t = 1e-4;
  // keep = sqrt(t/f) + t/f reaches 1 near f = 2.6t; nothing is discarded below.
  EXPECT_EQ(discard_probability(2 * t, t), 0.0);
  double prev = discard_probability(t, t);
  for (double f = 3 * t; f <= 1.0; f *= 1.37) {
    const double d = discard_probability(f, t);
    EXPECT_GT(d, prev) << f;
    EXPECT_GE(d, 0.0);
    EXPECT_LE(d, 1.0);
    prev = d;
  }
}

TEST(NegativeTable, ProportionalShares) {
  const std::int64_t power1[] = {8, 1};
  const auto t1 = build_negative_table(power1, 1.0, 9);
  EXPECT_EQ(std::count(t1.begin(), t1.end(), 0), 8);
  EXPECT_EQ(std::count(t1.begin(), t1.end(), 1), 1);

  // 16^0.75 = 8, so the exact shares are 17*8/9 and 17/9.
  const std::int64_t skewed[] = {16, 1};
  const auto t2 = build_negative_table(skewed, 0.75, 17);
  ASSERT_EQ(t2.size(), 17u);
  const auto a = std::count(t2.begin(), t2.end(), 0);
  EXPECT_NEAR(static_cast<double>(a), 17.0 * 8 / 9, 1.0);

  const std::int64_t single[] = {42};
  const auto t3 = build_negative_table(single, 0.75, 10);
  EXPECT_EQ(t3, std::vector<std::int32_t>(10, 0));
}

TEST(NegativeTable, RejectsBadArguments) {
  EXPECT_THROW(build_negative_table({}, 0.75, 10), EmptyVocabError);
  const std::int64_t c[] = {1, 2, 3};
  EXPECT_THROW(build_negative_table(c, 0.75, 2), std::invalid_argument);
  EXPECT_THROW(build_negative_table(c, 0.0, 10), std::invalid_argument);
  EXPECT_THROW(build_negative_table(c, 1.5, 10), std::invalid_argument);
}

TEST(NegativeTable, SamplingMatchesPowerLaw) {
  const std::vector<std::string> tokens = [] {
    std::vector<std::string> t(81, "a");
    t.push_back("b");  // counts 81 : 1, so 81^0.75 = 27
    return t;
  }();
  VocabOptions opts;
  opts.min_count = 1;
  const auto v = build_vocab(tokens, opts);
  const auto table = v.negative_table();
  ASSERT_EQ(table.size(), kDefaultNegativeTableSize);

  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::size_t> pick(0, table.size() - 1);
  const int draws = 1'000'000;
  int a = 0;
  for (int i = 0; i < draws; ++i) a += table[pick(rng)] == 0;
  const double expected = 27.0 / 28.0;
  EXPECT_NEAR(static_cast<double>(a) / draws, expected, 0.01);
  for (auto id : table) ASSERT_TRUE(id == 0 || id == 1);
}

TEST(Vocab, DiscardProbabilitiesInRange) {
  std::vector<std::string> tokens;
  for (int i = 0; i < 500; ++i) tokens.push_back("the");
  for (int i = 0; i < 3; ++i) tokens.push_back("rare");
  auto opts = plain(1);
  opts.sample_threshold = 1e-3;
  const auto v = build_vocab(tokens, opts);
  for (auto d : v.discard_probs()) {
    EXPECT_GE(d, 0.0);
    EXPECT_LE(d, 1.0);
  }
  EXPECT_GT(v.discard_prob(0), v.discard_prob(1));
}

}  // namespace
}  // namespace cbos
