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

#include "cbos/config.h"

#include "cbos/error.h"

namespace cbos {

std::string_view to_string(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::kCbow: return "cbow";
    case ModelKind::kSkipgram: return "skipgram";
    case ModelKind::kCbos: return "cbos";
  }
  return "unknown";
}

std::string_view to_string(Variant variant) noexcept {
  switch (variant) {
    case Variant::kBaseline: return "baseline";
    case Variant::kNextWord: return "next-word";
    case Variant::kCentralWord: return "central-word";
    case Variant::kNonRandom: return "non-random";
    case Variant::kVariableWindow: return "variable-window";
    case Variant::kNonRepeated: return "non-repeated";
  }
  return "unknown";
}

std::optional<ModelKind> parse_model_kind(std::string_view name) noexcept {
  if (name == "cbow") return ModelKind::kCbow;
  if (name == "skipgram" || name == "skip-gram") return ModelKind::kSkipgram;
  if (name == "cbos") return ModelKind::kCbos;
  return std::nullopt;
}

std::optional<Variant> parse_variant(std::string_view name) noexcept {
  std::string key(name);
  for (auto& c : key) {
    if (c == '_') c = '-';
  }
  for (auto v : {Variant::kBaseline, Variant::kNextWord, Variant::kCentralWord,
                 Variant::kNonRandom, Variant::kVariableWindow,
                 Variant::kNonRepeated}) {
    if (key == to_string(v)) return v;
  }
  return std::nullopt;
}

void TrainConfig::validate() const {
  if (variant && model != ModelKind::kCbos) {
    throw ConfigError("a CBOS variant requires model cbos");
  }
  if (dim < 1) throw ConfigError("dim must be >= 1");
  if (ws < 1) throw ConfigError("ws must be >= 1");
  if (epochs < 1) throw ConfigError("epoch must be >= 1");
  if (!(lr0 > 0)) throw ConfigError("lr must be > 0");
  if (negatives < 0) throw ConfigError("neg must be >= 0");
  if (min_count < 1) throw ConfigError("minCount must be >= 1");
  if (t < 0) throw ConfigError("t must be >= 0");
  if (workers < 1) throw ConfigError("thread must be >= 1");
  if (negative_table_size < 1) throw ConfigError("negative table must be non-empty");
  subwords().validate();
}

}  // namespace cbos
