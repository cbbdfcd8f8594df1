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

#include "cbos/trainer.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>

#include "cbos/error.h"
#include "json.hpp"

namespace cbos {

std::string_view to_string(Phase phase) noexcept {
  return phase == Phase::kSkipgram ? "skipgram" : "bag";
}

void VectorTraceSink::record(const TraceEvent& event) {
  std::lock_guard lock(mu_);
  events_.push_back(event);
}

JsonLinesTraceSink::JsonLinesTraceSink(const std::filesystem::path& path)
    : out_(path) {
  if (!out_) throw Error("cannot open trace file " + path.string());
}

void JsonLinesTraceSink::record(const TraceEvent& event) {
  nlohmann::json j = {
      {"phase", to_string(event.phase)},
      {"input_ids", event.input_ids},
      {"target_id", event.target_id},
      {"position", event.position},
      {"variant", to_string(event.variant)},
  };
  std::lock_guard lock(mu_);
  out_ << j.dump() << '\n';
}

// ---------------------------------------------------------------------------

StepContext::StepContext(EmbeddingModel& model, const SubwordTable& subwords,
                         std::span<const std::int32_t> negative_table,
                         int negatives, std::uint64_t seed)
    : model_(&model),
      subwords_(&subwords),
      negative_table_(negative_table),
      negatives_(negatives),
      rng_(seed) {}

void StepContext::sample_negatives(std::int32_t target) {
  constexpr int kMaxRedraws = 10;
  negative_ids_.clear();
  if (negative_table_.empty()) return;
  std::uniform_int_distribution<std::size_t> pick(0, negative_table_.size() - 1);
  for (int i = 0; i < negatives_; ++i) {
    for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
      const auto id = negative_table_[pick(rng_)];
      if (id != target) {
        negative_ids_.push_back(id);
        break;
      }
    }
  }
}

double StepContext::predict(std::span<const std::int32_t> sentence,
                            std::span<const std::size_t> bag,
                            std::size_t target, std::size_t center,
                            Phase phase, float lr, bool dedup) {
  bag_words_.clear();
  rows_.clear();
  std::vector<std::size_t> used_positions;
  if (trace_) used_positions.reserve(bag.size());
  for (auto p : bag) {
    const auto w = sentence[p];
    if (dedup && std::find(bag_words_.begin(), bag_words_.end(), w) !=
                     bag_words_.end()) {
      continue;
    }
    bag_words_.push_back(w);
    if (trace_) used_positions.push_back(p);
    const auto ids = subwords_->ids(w);
    rows_.insert(rows_.end(), ids.begin(), ids.end());
  }
  if (rows_.empty()) return 0;

  compute_hidden(std::span<const std::int32_t>(rows_), *model_, hidden_);
  const auto target_id = sentence[target];
  sample_negatives(target_id);
  const double loss =
      ns_update(hidden_, target_id, std::span<const std::int32_t>(negative_ids_),
                lr, *model_, grad_);
  ++updates_;

  if (trace_) {
    TraceEvent ev;
    ev.phase = phase;
    ev.input_ids = bag_words_;
    ev.target_id = target_id;
    ev.position = center;
    ev.variant = variant_;
    ev.input_positions = std::move(used_positions);
    ev.target_position = target;
    trace_->record(ev);
  }
  return loss;
}

int sample_window(int ws, Rng& rng) {
  if (ws < 1) throw std::invalid_argument("window size must be >= 1");
  return std::uniform_int_distribution<int>(1, ws)(rng);
}

std::vector<std::size_t> context_positions(std::size_t sentence_size,
                                           std::size_t pos, int b) {
  std::vector<std::size_t> ctx;
  const auto reach = static_cast<std::size_t>(std::max(b, 0));
  const std::size_t lo = pos >= reach ? pos - reach : 0;
  const std::size_t hi = std::min(sentence_size, pos + reach + 1);
  ctx.reserve(hi - lo);
  for (std::size_t j = lo; j < hi; ++j) {
    if (j != pos) ctx.push_back(j);
  }
  return ctx;
}

double skipgram_step(StepContext& ctx, std::span<const std::int32_t> sentence,
                     std::size_t pos, int b, float lr) {
  double loss = 0;
  const std::size_t center[] = {pos};
  for (auto j : context_positions(sentence.size(), pos, b)) {
    loss += ctx.predict(sentence, center, j, pos, Phase::kSkipgram, lr);
  }
  return loss;
}

double cbow_step(StepContext& ctx, std::span<const std::int32_t> sentence,
                 std::size_t pos, int b, float lr) {
  const auto context = context_positions(sentence.size(), pos, b);
  if (context.empty()) return 0;
  return ctx.predict(sentence, context, pos, pos, Phase::kBag, lr);
}

namespace {

// Context minus one chosen position predicts that position. Needs at least
// two context words so the bag is non-empty.
double random_target_bag(StepContext& ctx,
                         std::span<const std::int32_t> sentence,
                         const std::vector<std::size_t>& context,
                         std::size_t pos, float lr, bool dedup,
                         std::optional<std::size_t> forced_target) {
  if (context.size() < 2) return 0;
  std::size_t chosen = 0;
  if (forced_target) {
    auto it = std::find(context.begin(), context.end(), *forced_target);
    if (it == context.end()) {
      throw std::invalid_argument("forced target is not a context position");
    }
    chosen = static_cast<std::size_t>(it - context.begin());
  } else {
    chosen = std::uniform_int_distribution<std::size_t>(0, context.size() - 1)(
        ctx.rng());
  }
  std::vector<std::size_t> bag;
  bag.reserve(context.size() - 1);
  for (std::size_t i = 0; i < context.size(); ++i) {
    if (i != chosen) bag.push_back(context[i]);
  }
  return ctx.predict(sentence, bag, context[chosen], pos, Phase::kBag, lr, dedup);
}

}  // namespace

double cbos_variant_step(StepContext& ctx,
                         std::span<const std::int32_t> sentence,
                         std::size_t pos, int b, float lr, Variant variant) {
  const auto context = context_positions(sentence.size(), pos, b);
  const std::span<const std::size_t> all(context);
  double loss = 0;
  switch (variant) {
    case Variant::kBaseline:
      return random_target_bag(ctx, sentence, context, pos, lr, false,
                               std::nullopt);
    case Variant::kNonRepeated:
      return random_target_bag(ctx, sentence, context, pos, lr, true,
                               std::nullopt);
    case Variant::kNextWord:
      for (std::size_t i = 1; i < context.size(); ++i) {
        loss += ctx.predict(sentence, all.first(i), context[i], pos,
                            Phase::kBag, lr);
      }
      return loss;
    case Variant::kCentralWord:
      for (std::size_t i = 1; i <= context.size(); ++i) {
        loss += ctx.predict(sentence, all.first(i), pos, pos, Phase::kBag, lr);
      }
      return loss;
    case Variant::kNonRandom:
      if (context.empty()) return 0;
      return ctx.predict(sentence, all, pos, pos, Phase::kBag, lr);
    case Variant::kVariableWindow: {
      constexpr int kMaxVariableWindow = 5;
      const int redrawn = sample_window(kMaxVariableWindow, ctx.rng());
      return random_target_bag(ctx, sentence,
                               context_positions(sentence.size(), pos, redrawn),
                               pos, lr, false, std::nullopt);
    }
  }
  return loss;
}

double cbos_step(StepContext& ctx, std::span<const std::int32_t> sentence,
                 std::size_t pos, int b, float lr, Variant variant,
                 std::optional<std::size_t> forced_target) {
  double loss = skipgram_step(ctx, sentence, pos, b, lr);
  if (forced_target &&
      (variant == Variant::kBaseline || variant == Variant::kNonRepeated)) {
    loss += random_target_bag(ctx, sentence,
                              context_positions(sentence.size(), pos, b), pos,
                              lr, variant == Variant::kNonRepeated,
                              forced_target);
  } else {
    loss += cbos_variant_step(ctx, sentence, pos, b, lr, variant);
  }
  return loss;
}

double lr_schedule(double lr0, std::int64_t tokens_done,
                   std::int64_t tokens_total) {
  if (tokens_total <= 0) return lr0;
  const double progress =
      std::min(1.0, static_cast<double>(tokens_done) /
                        static_cast<double>(tokens_total));
  return std::max(kMinLearningRate, lr0 * (1.0 - progress));
}

// ---------------------------------------------------------------------------

namespace {

struct alignas(64) WorkerStats {
  std::atomic<double> loss{0};
  std::atomic<std::int64_t> predictions{0};
};

class CorpusSlice {
 public:
  CorpusSlice(const std::filesystem::path& path, std::uint64_t begin,
              std::uint64_t end)
      : in_(path, std::ios::binary), offset_(begin), end_(end) {
    if (!in_) throw Error("cannot open corpus " + path.string());
    if (begin > 0) {
      // A line starting exactly at `begin` belongs to this slice; otherwise
      // skip the partial line owned by the previous slice.
      in_.seekg(static_cast<std::streamoff>(begin - 1));
      std::string partial;
      std::getline(in_, partial);
      offset_ = begin - 1 + partial.size() + 1;
    }
  }

  bool next(std::string& line) {
    if (offset_ >= end_) return false;
    if (!std::getline(in_, line)) return false;
    offset_ += line.size() + 1;
    return true;
  }

 private:
  std::ifstream in_;
  std::uint64_t offset_;
  std::uint64_t end_;
};

void print_progress(std::ostream& out, double fraction, double lr, double loss,
                    double tokens_per_sec) {
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "progress: %5.1f%% lr: %.6f loss: %.6f tokens/sec: %.0f\n",
                100.0 * fraction, lr, loss, tokens_per_sec);
  out << buf << std::flush;
}

}  // namespace

TrainResult train(const TrainConfig& config,
                  const std::filesystem::path& corpus,
                  const TrainOptions& options) {
  config.validate();
  return train(config, build_vocab_from_file(corpus, config.vocab_options()),
               corpus, options);
}

TrainResult train(const TrainConfig& config, Vocab vocab,
                  const std::filesystem::path& corpus,
                  const TrainOptions& options) {
  config.validate();
  if (vocab.empty()) throw EmptyVocabError();
  std::error_code ec;
  const auto file_size = std::filesystem::file_size(corpus, ec);
  if (ec) throw Error("cannot read corpus " + corpus.string() + ": " + ec.message());

  const auto subwords = config.subwords();
  TrainResult result{TrainedModel{config, std::move(vocab), {}}, {}};
  auto& trained = result.trained;
  trained.model =
      init_model(trained.vocab.size(), subwords.bucket, config.dim, config.seed);
  const SubwordTable table(trained.vocab, subwords);
  const Vocab& vocab_ref = trained.vocab;
  EmbeddingModel& model = trained.model;

  const int workers = config.workers;
  const std::int64_t total =
      static_cast<std::int64_t>(config.epochs) * vocab_ref.total_tokens();
  std::atomic<std::int64_t> progress{0};
  std::atomic<std::int64_t> updates{0};
  std::vector<WorkerStats> stats(static_cast<std::size_t>(workers));
  std::exception_ptr failure;
  std::mutex failure_mu;

  auto worker = [&](int w) {
    try {
      StepContext ctx(model, table, vocab_ref.negative_table(),
                      config.negatives, config.seed + static_cast<std::uint64_t>(w));
      ctx.set_trace(options.trace, config.effective_variant());
      std::uniform_real_distribution<double> coin(0.0, 1.0);
      const std::uint64_t begin = file_size * w / workers;
      const std::uint64_t end = file_size * (w + 1) / workers;

      std::string line;
      std::vector<std::int32_t> sentence;
      double loss_sum = 0;
      std::int64_t predictions = 0;
      for (int epoch = 0; epoch < config.epochs; ++epoch) {
        CorpusSlice slice(corpus, begin, end);
        while (slice.next(line)) {
          sentence.clear();
          std::int64_t seen = 0;
          std::size_t i = 0;
          while (i < line.size()) {
            while (i < line.size() && is_space(line[i])) ++i;
            const std::size_t start = i;
            while (i < line.size() && !is_space(line[i])) ++i;
            if (i == start) continue;
            const auto id =
                vocab_ref.lookup(std::string_view(line).substr(start, i - start));
            if (!id) continue;
            ++seen;
            if (coin(ctx.rng()) >= vocab_ref.discard_prob(*id)) {
              sentence.push_back(*id);
            }
          }

          const auto lr = static_cast<float>(
              lr_schedule(config.lr0, progress.load(std::memory_order_relaxed),
                          total));
          const std::int64_t before = ctx.updates();
          for (std::size_t pos = 0; pos < sentence.size(); ++pos) {
            const int b = sample_window(config.ws, ctx.rng());
            switch (config.model) {
              case ModelKind::kSkipgram:
                loss_sum += skipgram_step(ctx, sentence, pos, b, lr);
                break;
              case ModelKind::kCbow:
                loss_sum += cbow_step(ctx, sentence, pos, b, lr);
                break;
              case ModelKind::kCbos:
                loss_sum += cbos_step(ctx, sentence, pos, b, lr,
                                      config.effective_variant());
                break;
            }
          }
          predictions += ctx.updates() - before;
          progress.fetch_add(seen, std::memory_order_relaxed);
          auto& mine = stats[static_cast<std::size_t>(w)];
          mine.loss.store(loss_sum, std::memory_order_relaxed);
          mine.predictions.store(predictions, std::memory_order_relaxed);
        }
      }
      updates.fetch_add(ctx.updates(), std::memory_order_relaxed);
    } catch (...) {
      std::lock_guard lock(failure_mu);
      if (!failure) failure = std::current_exception();
    }
  };

  auto average_loss = [&] {
    double loss = 0;
    std::int64_t n = 0;
    for (const auto& s : stats) {
      loss += s.loss.load(std::memory_order_relaxed);
      n += s.predictions.load(std::memory_order_relaxed);
    }
    return n > 0 ? loss / static_cast<double>(n) : 0.0;
  };

  const auto started = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         started)
        .count();
  };

  std::mutex done_mu;
  std::condition_variable done_cv;
  bool done = false;
  std::thread reporter;
  if (options.progress) {
    reporter = std::thread([&] {
      std::unique_lock lock(done_mu);
      while (!done_cv.wait_for(lock, std::chrono::seconds(1),
                               [&] { return done; })) {
        const auto tokens = progress.load(std::memory_order_relaxed);
        const double secs = elapsed();
        print_progress(*options.progress,
                       total > 0 ? static_cast<double>(tokens) / total : 1.0,
                       lr_schedule(config.lr0, tokens, total), average_loss(),
                       secs > 0 ? tokens / secs : 0.0);
      }
    });
  }

  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) threads.emplace_back(worker, w);
  for (auto& t : threads) t.join();
  const double seconds = elapsed();

  {
    std::lock_guard lock(done_mu);
    done = true;
  }
  done_cv.notify_all();
  if (reporter.joinable()) reporter.join();
  if (failure) std::rethrow_exception(failure);

  auto& s = result.stats;
  s.tokens = progress.load();
  s.updates = updates.load();
  s.average_loss = average_loss();
  s.seconds = seconds;
  s.tokens_per_second = seconds > 0 ? static_cast<double>(s.tokens) / seconds : 0;
  if (options.progress) {
    print_progress(*options.progress, 1.0, kMinLearningRate, s.average_loss,
                   s.tokens_per_second);
  }
  return result;
}

}  // namespace cbos
