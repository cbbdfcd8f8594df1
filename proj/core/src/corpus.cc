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

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "cbos/error.h"

namespace cbos {

namespace {

// Strict UTF-8 decode of one code point starting at s[i]. Rejects overlong
// forms, surrogates and values above U+10FFFF. Advances i on success.
char32_t decode_utf8(std::string_view s, std::size_t& i,
                     std::uint64_t base_offset) {
  const auto lead = static_cast<unsigned char>(s[i]);
  if (lead < 0x80) {
    ++i;
    return lead;
  }
  int extra = 0;
  char32_t cp = 0;
  char32_t min = 0;
  if ((lead & 0xE0) == 0xC0) {
    extra = 1;
    cp = lead & 0x1F;
    min = 0x80;
  } else if ((lead & 0xF0) == 0xE0) {
    extra = 2;
    cp = lead & 0x0F;
    min = 0x800;
  } else if ((lead & 0xF8) == 0xF0) {
    extra = 3;
    cp = lead & 0x07;
    min = 0x10000;
  } else {
    throw DecodeError(base_offset + i, "invalid UTF-8 lead byte");
  }
  if (i + extra >= s.size()) {
    throw DecodeError(base_offset + i, "truncated UTF-8 sequence");
  }
  for (int k = 1; k <= extra; ++k) {
    const auto byte = static_cast<unsigned char>(s[i + k]);
    if ((byte & 0xC0) != 0x80) {
      throw DecodeError(base_offset + i, "invalid UTF-8 continuation byte");
    }
    cp = (cp << 6) | (byte & 0x3F);
  }
  if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
    throw DecodeError(base_offset + i, "invalid UTF-8 code point");
  }
  i += extra + 1;
  return cp;
}

void append_utf8(std::string& out, char32_t cp) {
  char buf[U8_MAX_LENGTH];
  std::int32_t len = 0;
  U8_APPEND_UNSAFE(buf, len, static_cast<UChar32>(cp));
  out.append(buf, static_cast<std::size_t>(len));
}

template <typename Map>
std::string map_code_points(std::string_view text, std::uint64_t base_offset,
                            Map&& map) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const auto byte = static_cast<unsigned char>(text[i]);
    if (byte < 0x80) {
      // ASCII fast path.
      const char32_t mapped = map(static_cast<char32_t>(byte));
      out.push_back(static_cast<char>(mapped));
      ++i;
      continue;
    }
    append_utf8(out, map(decode_utf8(text, i, base_offset)));
  }
  return out;
}

char32_t normalize_code_point(char32_t cp) {
  const auto c = static_cast<UChar32>(cp);
  if (U_GET_GC_MASK(c) & (U_GC_P_MASK | U_GC_S_MASK)) return U' ';
  return static_cast<char32_t>(u_tolower(c));
}

}  // namespace

std::string normalize_text(std::string_view raw, std::uint64_t base_offset) {
  return map_code_points(raw, base_offset, normalize_code_point);
}

std::string lowercase(std::string_view text) {
  return map_code_points(text, 0, [](char32_t cp) {
    return static_cast<char32_t>(u_tolower(static_cast<UChar32>(cp)));
  });
}

std::vector<std::string> tokenize(std::string_view line) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    const std::size_t start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    if (i > start) tokens.emplace_back(line.substr(start, i - start));
  }
  return tokens;
}

std::vector<std::vector<std::string>> split_sentences(std::string_view text) {
  std::vector<std::vector<std::string>> sentences;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      if (start < text.size()) {
        sentences.push_back(tokenize(text.substr(start)));
      }
      break;
    }
    sentences.push_back(tokenize(text.substr(start, nl - start)));
    start = nl + 1;
  }
  return sentences;
}

// ---------------------------------------------------------------------------

Vocab Vocab::from_counts(
    std::vector<std::pair<std::string, std::int64_t>> counts,
    const VocabOptions& options) {
  if (options.min_count < 1) {
    throw std::invalid_argument("min_count must be >= 1");
  }
  std::erase_if(counts,
                [&](const auto& wc) { return wc.second < options.min_count; });
  if (counts.empty()) {
    throw EmptyVocabError("vocabulary is empty after min_count filter");
  }
  std::stable_sort(counts.begin(), counts.end(),
                   [](const auto& a, const auto& b) {
                     return a.second > b.second;
                   });

  Vocab vocab;
  vocab.entries_.reserve(counts.size());
  vocab.index_.reserve(counts.size());
  for (auto& [word, count] : counts) {
    const auto id = static_cast<std::int32_t>(vocab.entries_.size());
    vocab.index_.emplace(word, id);
    vocab.total_tokens_ += count;
    vocab.entries_.push_back(VocabEntry{std::move(word), count, id});
  }

  vocab.discard_.resize(vocab.entries_.size(), 0.0);
  if (options.sample_threshold > 0) {
    const auto total = static_cast<double>(vocab.total_tokens_);
    for (const auto& e : vocab.entries_) {
      vocab.discard_[e.id] = discard_probability(
          static_cast<double>(e.count) / total, options.sample_threshold);
    }
  }

  if (options.negative_table_size > 0) {
    std::vector<std::int64_t> raw(vocab.entries_.size());
    for (const auto& e : vocab.entries_) raw[e.id] = e.count;
    vocab.negative_table_ = build_negative_table(
        raw, options.negative_power,
        std::max(options.negative_table_size, vocab.entries_.size()));
  }
  return vocab;
}

std::optional<std::int32_t> Vocab::lookup(std::string_view word) const {
  auto it = index_.find(word);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void Vocab::dump_tsv(std::ostream& out) const {
  for (const auto& e : entries_) {
    out << e.word << '\t' << e.count << '\t' << e.id << '\n';
  }
}

void VocabBuilder::add(std::string_view token) {
  ++tokens_seen_;
  auto [it, inserted] = index_.try_emplace(std::string(token), counts_.size());
  if (inserted) {
    counts_.emplace_back(it->first, 1);
  } else {
    ++counts_[it->second].second;
  }
}

void VocabBuilder::add_line(std::string_view line) {
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    const std::size_t start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    if (i > start) add(line.substr(start, i - start));
  }
}

Vocab VocabBuilder::build(const VocabOptions& options) && {
  if (counts_.empty()) throw EmptyVocabError("empty token stream");
  index_.clear();
  return Vocab::from_counts(std::move(counts_), options);
}

Vocab build_vocab(std::span<const std::string> tokens,
                  const VocabOptions& options) {
  VocabBuilder builder;
  for (const auto& t : tokens) builder.add(t);
  return std::move(builder).build(options);
}

Vocab build_vocab_from_file(const std::filesystem::path& path,
                            const VocabOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open corpus " + path.string());
  VocabBuilder builder;
  std::string line;
  while (std::getline(in, line)) builder.add_line(line);
  if (in.bad()) throw Error("error reading corpus " + path.string());
  return std::move(builder).build(options);
}

double discard_probability(double freq, double threshold) {
  if (!(freq > 0.0) || freq > 1.0) {
    throw std::domain_error("word frequency must lie in (0, 1]");
  }
  if (!(threshold > 0.0)) {
    throw std::domain_error("subsampling threshold must be positive");
  }
  const double ratio = threshold / freq;
  const double keep = std::min(1.0, std::sqrt(ratio) + ratio);
  return 1.0 - keep;
}

std::vector<std::int32_t> build_negative_table(
    std::span<const std::int64_t> counts, double power,
    std::size_t table_size) {
  if (counts.empty()) throw EmptyVocabError("negative table needs a vocabulary");
  if (!(power > 0.0) || power > 1.0) {
    throw std::invalid_argument("negative sampling power must lie in (0, 1]");
  }
  if (table_size < counts.size()) {
    throw std::invalid_argument("negative table smaller than vocabulary");
  }

  std::vector<double> weight(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    weight[i] = std::pow(static_cast<double>(counts[i]), power);
  }
  const double z = std::accumulate(weight.begin(), weight.end(), 0.0);

  std::vector<std::size_t> share(counts.size());
  std::vector<double> remainder(counts.size());
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double exact = static_cast<double>(table_size) * weight[i] / z;
    share[i] = static_cast<std::size_t>(std::floor(exact));
    remainder[i] = exact - static_cast<double>(share[i]);
    assigned += share[i];
  }
  // Rounding can leave assigned marginally above table_size; trim from the
  // largest shares in that case.
  while (assigned > table_size) {
    auto it = std::max_element(share.begin(), share.end());
    --*it;
    --assigned;
  }
  if (assigned < table_size) {
    std::vector<std::size_t> order(counts.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                       return remainder[a] > remainder[b];
                     });
    for (std::size_t k = 0; assigned < table_size; k = (k + 1) % order.size()) {
      ++share[order[k]];
      ++assigned;
    }
  }

  std::vector<std::int32_t> table;
  table.reserve(table_size);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    table.insert(table.end(), share[i], static_cast<std::int32_t>(i));
  }
  return table;
}

}  // namespace cbos
