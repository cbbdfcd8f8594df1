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
#include <optional>
#include <string>
#include <string_view>

#include "cbos/corpus.h"
#include "cbos/subword.h"

namespace cbos {

enum class ModelKind : std::uint8_t { kCbow = 0, kSkipgram = 1, kCbos = 2 };

/// CBOS second-phase schedules. kBaseline is the random-target bag.
enum class Variant : std::uint8_t {
  kBaseline = 0,
  kNextWord = 1,
  kCentralWord = 2,
  kNonRandom = 3,
  kVariableWindow = 4,
  kNonRepeated = 5,
};

std::string_view to_string(ModelKind kind) noexcept;
std::string_view to_string(Variant variant) noexcept;

/// Accepts "cbow", "skipgram" (or "skip-gram"), "cbos".
std::optional<ModelKind> parse_model_kind(std::string_view name) noexcept;
/// Accepts hyphenated names ("next-word") and underscores ("next_word").
std::optional<Variant> parse_variant(std::string_view name) noexcept;

struct TrainConfig {
  ModelKind model = ModelKind::kCbos;
  /// Only meaningful for kCbos; unset means kBaseline.
  std::optional<Variant> variant;
  int dim = 100;
  int ws = 5;
  int epochs = 5;
  double lr0 = 0.05;
  int negatives = 5;
  std::int64_t min_count = 5;
  double t = 1e-4;
  int minn = 3;
  int maxn = 6;
  std::int64_t bucket = 2'000'000;
  int workers = 12;
  std::uint64_t seed = 0;
  std::size_t negative_table_size = kDefaultNegativeTableSize;

  Variant effective_variant() const noexcept {
    return variant.value_or(Variant::kBaseline);
  }
  SubwordConfig subwords() const noexcept {
    return SubwordConfig{minn, maxn, maxn > 0 ? bucket : 0};
  }
  VocabOptions vocab_options() const noexcept {
    return VocabOptions{min_count, t, kNegativePower, negative_table_size};
  }

  /// Throws ConfigError when an invariant is violated.
  void validate() const;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

}  // namespace cbos
