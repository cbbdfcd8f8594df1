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

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cbos/corpus.h"

namespace cbos {

/// Character n-gram settings. maxn == 0 disables subwords entirely.
struct SubwordConfig {
  int minn = 3;
  int maxn = 6;
  std::int64_t bucket = 2'000'000;

  bool enabled() const noexcept { return maxn > 0 && bucket > 0; }

  /// Throws ConfigError on an inconsistent combination.
  void validate() const;

  friend bool operator==(const SubwordConfig&, const SubwordConfig&) = default;
};

/// Character n-grams of "<word>" with lengths in [minn, maxn], measured in
/// code points. Ordered by start position, shortest first at each start.
/// The complete wrapped word is never emitted.
std::vector<std::string> extract_ngrams(std::string_view word, int minn,
                                        int maxn);

/// 32-bit FNV-1a as fastText computes it: each byte is sign-extended before
/// the xor, so non-ASCII bytes hash identically to fastText's dictionary.
std::uint32_t fnv1a_hash(std::string_view bytes) noexcept;

/// fnv1a_hash(ngram) mod bucket.
std::int64_t hash_ngram(std::string_view ngram, std::int64_t bucket);

struct SubwordIds {
  std::optional<std::int32_t> word_id;
  /// Input-matrix rows in [V, V + bucket).
  std::vector<std::int32_t> ngram_ids;

  /// word_id (if any) followed by the n-gram rows.
  std::vector<std::int32_t> all() const;
};

SubwordIds subword_ids(std::string_view word, const Vocab& vocab,
                       const SubwordConfig& config);

/// Flattened input-row lists for every vocabulary word, precomputed once
/// per training run.
class SubwordTable {
 public:
  SubwordTable() = default;
  SubwordTable(const Vocab& vocab, const SubwordConfig& config);

  std::span<const std::int32_t> ids(std::int32_t word_id) const {
    return {rows_.data() + offsets_[word_id],
            rows_.data() + offsets_[word_id + 1]};
  }
  std::int32_t size() const noexcept {
    return static_cast<std::int32_t>(offsets_.empty() ? 0 : offsets_.size() - 1);
  }

 private:
  std::vector<std::int32_t> rows_;
  std::vector<std::size_t> offsets_;
};

}  // namespace cbos
