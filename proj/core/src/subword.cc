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

#include <stdexcept>

#include "cbos/error.h"

namespace cbos {

namespace {

bool is_continuation(char c) {
  return (static_cast<unsigned char>(c) & 0xC0) == 0x80;
}

}  // namespace

void SubwordConfig::validate() const {
  if (maxn == 0) return;
  if (minn < 1 || minn > maxn) {
    throw ConfigError("n-gram lengths must satisfy 1 <= minn <= maxn");
  }
  if (bucket < 1) throw ConfigError("bucket must be >= 1 when subwords are on");
}

std::vector<std::string> extract_ngrams(std::string_view word, int minn,
                                        int maxn) {
  std::vector<std::string> ngrams;
  if (word.empty() || maxn <= 0) return ngrams;
  if (minn < 1 || minn > maxn) {
    throw std::invalid_argument("n-gram lengths must satisfy 1 <= minn <= maxn");
  }

  std::string wrapped;
  wrapped.reserve(word.size() + 2);
  wrapped.push_back('<');
  wrapped.append(word);
  wrapped.push_back('>');

  for (std::size_t i = 0; i < wrapped.size(); ++i) {
    if (is_continuation(wrapped[i])) continue;
    std::size_t j = i;
    for (int n = 1; n <= maxn && j < wrapped.size(); ++n) {
      // Advance j past one full code point.
      ++j;
      while (j < wrapped.size() && is_continuation(wrapped[j])) ++j;
      if (n < minn) continue;
      if (i == 0 && j == wrapped.size()) continue;
      ngrams.emplace_back(wrapped.substr(i, j - i));
    }
  }
  return ngrams;
}

std::uint32_t fnv1a_hash(std::string_view bytes) noexcept {
  std::uint32_t h = 2166136261u;
  for (char c : bytes) {
    h ^= static_cast<std::uint32_t>(static_cast<std::int8_t>(c));
    h *= 16777619u;
  }
  return h;
}

std::int64_t hash_ngram(std::string_view ngram, std::int64_t bucket) {
  if (bucket < 1) throw std::invalid_argument("bucket must be >= 1");
  return static_cast<std::int64_t>(fnv1a_hash(ngram) %
                                   static_cast<std::uint64_t>(bucket));
}

std::vector<std::int32_t> SubwordIds::all() const {
  std::vector<std::int32_t> ids;
  ids.reserve(ngram_ids.size() + 1);
  if (word_id) ids.push_back(*word_id);
  ids.insert(ids.end(), ngram_ids.begin(), ngram_ids.end());
  return ids;
}

SubwordIds subword_ids(std::string_view word, const Vocab& vocab,
                       const SubwordConfig& config) {
  SubwordIds out;
  out.word_id = vocab.lookup(word);
  if (!config.enabled()) return out;
  const std::int64_t base = vocab.size();
  for (const auto& g : extract_ngrams(word, config.minn, config.maxn)) {
    out.ngram_ids.push_back(
        static_cast<std::int32_t>(base + hash_ngram(g, config.bucket)));
  }
  return out;
}

SubwordTable::SubwordTable(const Vocab& vocab, const SubwordConfig& config) {
  offsets_.reserve(static_cast<std::size_t>(vocab.size()) + 1);
  offsets_.push_back(0);
  for (const auto& e : vocab.entries()) {
    rows_.push_back(e.id);
    if (config.enabled()) {
      for (const auto& g : extract_ngrams(e.word, config.minn, config.maxn)) {
        rows_.push_back(static_cast<std::int32_t>(
            vocab.size() + hash_ngram(g, config.bucket)));
      }
    }
    offsets_.push_back(rows_.size());
  }
}

}  // namespace cbos
