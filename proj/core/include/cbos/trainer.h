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
#include <fstream>
#include <iosfwd>
#include <mutex>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "cbos/config.h"
#include "cbos/corpus.h"
#include "cbos/model.h"
#include "cbos/subword.h"

namespace cbos {

using Rng = std::mt19937_64;

// ---------------------------------------------------------------------------
// Instrumentation
// ---------------------------------------------------------------------------

enum class Phase : std::uint8_t { kSkipgram, kBag };

std::string_view to_string(Phase phase) noexcept;

/// One ns_update call. `input_ids` are the vocabulary ids of the words whose
/// subword rows formed the hidden vector (after any de-duplication);
/// `input_positions` / `target_position` index into the subsampled sentence.
struct TraceEvent {
  Phase phase = Phase::kSkipgram;
  std::vector<std::int32_t> input_ids;
  std::int32_t target_id = 0;
  std::size_t position = 0;
  Variant variant = Variant::kBaseline;
  std::vector<std::size_t> input_positions;
  std::size_t target_position = 0;
};

class TraceSink {
 public:
  virtual ~TraceSink() = default;
  /// May be called concurrently from several workers.
  virtual void record(const TraceEvent& event) = 0;
};

class VectorTraceSink final : public TraceSink {
 public:
  void record(const TraceEvent& event) override;
  const std::vector<TraceEvent>& events() const noexcept { return events_; }
  void clear() { events_.clear(); }

 private:
  std::mutex mu_;
  std::vector<TraceEvent> events_;
};

/// Newline-delimited JSON objects with fields phase, input_ids, target_id,
/// position and variant.
class JsonLinesTraceSink final : public TraceSink {
 public:
  explicit JsonLinesTraceSink(const std::filesystem::path& path);
  void record(const TraceEvent& event) override;

 private:
  std::mutex mu_;
  std::ofstream out_;
};

// ---------------------------------------------------------------------------
// Per-worker step machinery
// ---------------------------------------------------------------------------

/// Everything one worker needs to issue predictions: shared model and
/// tables plus its own rng and scratch buffers.
class StepContext {
 public:
  StepContext(EmbeddingModel& model, const SubwordTable& subwords,
              std::span<const std::int32_t> negative_table, int negatives,
              std::uint64_t seed);

  Rng& rng() noexcept { return rng_; }
  EmbeddingModel& model() noexcept { return *model_; }

  void set_trace(TraceSink* sink, Variant variant) noexcept {
    trace_ = sink;
    variant_ = variant;
  }

  /// Mean of the subword rows of the words at `bag` predicts the word at
  /// `target`. With `dedup`, repeated words contribute once.
  double predict(std::span<const std::int32_t> sentence,
                 std::span<const std::size_t> bag, std::size_t target,
                 std::size_t center, Phase phase, float lr, bool dedup = false);

  std::int64_t updates() const noexcept { return updates_; }

 private:
  void sample_negatives(std::int32_t target);

  EmbeddingModel* model_;
  const SubwordTable* subwords_;
  std::span<const std::int32_t> negative_table_;
  int negatives_;
  Rng rng_;
  TraceSink* trace_ = nullptr;
  Variant variant_ = Variant::kBaseline;
  std::int64_t updates_ = 0;

  Hidden hidden_;
  std::vector<float> grad_;
  std::vector<std::int32_t> rows_;
  std::vector<std::int32_t> bag_words_;
  std::vector<std::int32_t> negative_ids_;
};

/// Uniform draw from {1, ..., ws}.
int sample_window(int ws, Rng& rng);

/// Positions in [pos - b, pos + b] inside the sentence, excluding pos,
/// left to right.
std::vector<std::size_t> context_positions(std::size_t sentence_size,
                                           std::size_t pos, int b);

double skipgram_step(StepContext& ctx, std::span<const std::int32_t> sentence,
                     std::size_t pos, int b, float lr);

double cbow_step(StepContext& ctx, std::span<const std::int32_t> sentence,
                 std::size_t pos, int b, float lr);

/// Skip-gram phase followed by the bag phase of `variant`. For the
/// baseline and non-repeated bags `forced_target` fixes the predicted
/// context position instead of drawing it; it must be a context position.
double cbos_step(StepContext& ctx, std::span<const std::int32_t> sentence,
                 std::size_t pos, int b, float lr, Variant variant,
                 std::optional<std::size_t> forced_target = std::nullopt);

/// The bag phase alone for a non-baseline variant.
double cbos_variant_step(StepContext& ctx,
                         std::span<const std::int32_t> sentence,
                         std::size_t pos, int b, float lr, Variant variant);

/// lr0 * (1 - done/total), floored at 1e-6.
double lr_schedule(double lr0, std::int64_t tokens_done,
                   std::int64_t tokens_total);

inline constexpr double kMinLearningRate = 1e-6;

// ---------------------------------------------------------------------------
// Training driver
// ---------------------------------------------------------------------------

struct TrainedModel {
  TrainConfig config;
  Vocab vocab;
  EmbeddingModel model;
};

struct TrainStats {
  std::int64_t tokens = 0;
  std::int64_t updates = 0;
  double average_loss = 0;
  double seconds = 0;
  double tokens_per_second = 0;
};

struct TrainOptions {
  TraceSink* trace = nullptr;
  /// Receives `progress: ...` lines at least once per second when set.
  std::ostream* progress = nullptr;
};

struct TrainResult {
  TrainedModel trained;
  TrainStats stats;
};

/// Builds the vocabulary from `corpus`, then runs config.epochs passes with
/// config.workers threads sharing the model without locks. Each worker
/// owns one byte range of the file per epoch. Only workers == 1 is
/// reproducible.
TrainResult train(const TrainConfig& config,
                  const std::filesystem::path& corpus,
                  const TrainOptions& options = {});

/// As above with a prebuilt vocabulary.
TrainResult train(const TrainConfig& config, Vocab vocab,
                  const std::filesystem::path& corpus,
                  const TrainOptions& options = {});

}  // namespace cbos
