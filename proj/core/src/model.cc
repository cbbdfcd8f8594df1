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

#include "cbos/model.h"

#include <limits>
#include <random>

#include "cbos/error.h"

namespace cbos {

EmbeddingModel init_model(std::int32_t vocab_size, std::int64_t bucket,
                          int dim, std::uint64_t seed) {
  if (dim < 1) throw ConfigError("embedding dimension must be >= 1");
  if (vocab_size < 0 || bucket < 0) {
    throw ConfigError("vocabulary size and bucket must be non-negative");
  }
  if (vocab_size + bucket > std::numeric_limits<std::int32_t>::max()) {
    throw ConfigError("vocabulary plus bucket rows exceed 32-bit row ids");
  }

  EmbeddingModel model{Matrix(vocab_size + bucket, dim), Matrix(vocab_size, dim)};
  std::mt19937_64 rng(seed);
  const float bound = 1.0f / static_cast<float>(dim);
  std::uniform_real_distribution<float> uniform(-bound, bound);
  for (auto& x : model.input.data()) x = uniform(rng);
  return model;
}

}  // namespace cbos
