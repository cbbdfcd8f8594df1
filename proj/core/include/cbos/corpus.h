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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cbos {

// ---------------------------------------------------------------------------
// Text normalization and tokenization
// ---------------------------------------------------------------------------

/// Lowercases every cased letter and replaces each punctuation or symbol
/// code point (Unicode categories P* and S*) with a single ASCII space.
/// Everything else, including whitespace and newlines, is copied through.
///
/// Throws DecodeError on malformed UTF-8. `base_offset` is added to the
/// reported byte offset so callers streaming line by line can report
/// positions relative to the whole file.
std::string normalize_text(std::string_view raw, std::uint64_t base_offset = 0);

/// Per-code-point lowercase mapping only; punctuation is left alone.
std::string lowercase(std::string_view text);

/// True for the ASCII whitespace bytes the tokenizer splits on.
constexpr bool is_space(char c) noexcept {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
         c == '\f';
}

/// Splits one line on whitespace. Runs of whitespace collapse.
std::vector<std::string> tokenize(std::string_view line);

/// Splits text into sentences (one per line) of whitespace tokens. Empty
/// lines yield empty sentences so line numbers are preserved.
std::vector<std::vector<std::string>> split_sentences(std::string_view text);

// ---------------------------------------------------------------------------
// Vocabulary
// ---------------------------------------------------------------------------

struct VocabEntry {
  std::string word;
  std::int64_t count = 0;
  std::int32_t id = 0;

  friend bool operator==(const VocabEntry&, const VocabEntry&) = default;
};

inline constexpr std::size_t kDefaultNegativeTableSize = 10'000'000;
inline constexpr double kNegativePower = 0.75;

struct VocabOptions {
  std::int64_t min_count = 1;
  /// Subsampling threshold t. Zero disables subsampling.
  double sample_threshold = 1e-4;
  double negative_power = kNegativePower;
  /// Zero skips building the negative table (enough for evaluation).
  std::size_t negative_table_size = kDefaultNegativeTableSize;
};

/// Immutable word inventory. Safe to share across threads once built.
class Vocab {
 public:
  Vocab() = default;

  /// `counts` must be in first-occurrence order; entries below
  /// `options.min_count` are dropped and ids are assigned by descending
  /// count, ties keeping their first-occurrence order.
  static Vocab from_counts(
      std::vector<std::pair<std::string, std::int64_t>> counts,
      const VocabOptions& options);

  std::int32_t size() const noexcept {
    return static_cast<std::int32_t>(entries_.size());
  }
  bool empty() const noexcept { return entries_.empty(); }

  std::span<const VocabEntry> entries() const noexcept { return entries_; }
  const VocabEntry& entry(std::int32_t id) const { return entries_.at(id); }
  const std::string& word(std::int32_t id) const { return entries_.at(id).word; }
  std::int64_t count(std::int32_t id) const { return entries_.at(id).count; }

  std::optional<std::int32_t> lookup(std::string_view word) const;

  std::int64_t total_tokens() const noexcept { return total_tokens_; }

  double discard_prob(std::int32_t id) const { return discard_.at(id); }
  std::span<const double> discard_probs() const noexcept { return discard_; }
  std::span<const std::int32_t> negative_table() const noexcept {
    return negative_table_;
  }

  /// Writes `word<TAB>count<TAB>id` lines in id order.
  void dump_tsv(std::ostream& out) const;

  /// Equality on the word inventory (entries and totals); derived tables
  /// are not compared.
  friend bool operator==(const Vocab& a, const Vocab& b) {
    return a.entries_ == b.entries_ && a.total_tokens_ == b.total_tokens_;
  }

 private:
  struct StringHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
      return std::hash<std::string_view>{}(s);
    }
  };

  std::vector<VocabEntry> entries_;
  std::unordered_map<std::string, std::int32_t, StringHash, std::equal_to<>>
      index_;
  std::int64_t total_tokens_ = 0;
  std::vector<double> discard_;
  std::vector<std::int32_t> negative_table_;
};

/// Streaming token counter feeding Vocab::from_counts.
class VocabBuilder {
 public:
  void add(std::string_view token);
  void add_line(std::string_view line);
  std::int64_t tokens_seen() const noexcept { return tokens_seen_; }

  /// Throws EmptyVocabError if nothing was added or everything was
  /// filtered by min_count.
  Vocab build(const VocabOptions& options) &&;

 private:
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::pair<std::string, std::int64_t>> counts_;
  std::int64_t tokens_seen_ = 0;
};

Vocab build_vocab(std::span<const std::string> tokens,
                  const VocabOptions& options);

/// Counts whitespace tokens of a text file.
Vocab build_vocab_from_file(const std::filesystem::path& path,
                            const VocabOptions& options);

/// Probability of discarding a token whose relative frequency is `freq`
/// under subsampling threshold `threshold`:
///   keep = min(1, sqrt(t/f) + t/f),  discard = 1 - keep.
/// Throws std::domain_error unless 0 < freq <= 1 and threshold > 0.
double discard_probability(double freq, double threshold);

/// Table of word ids where id w fills a share of `table_size` slots
/// proportional to counts[w]^power. Shares are floored and the leftover
/// slots go to the largest fractional remainders (lower id first on ties),
/// so the table has exactly `table_size` entries.
std::vector<std::int32_t> build_negative_table(
    std::span<const std::int64_t> counts, double power,
    std::size_t table_size);

}  // namespace cbos
