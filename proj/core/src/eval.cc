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

#include "cbos/eval.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "cbos/error.h"
#include "json.hpp"

namespace cbos {

namespace {

double norm(std::span<const float> v) {
  double s = 0;
  for (float x : v) s += static_cast<double>(x) * x;
  return std::sqrt(s);
}

}  // namespace

std::vector<float> word_vector(const EmbeddingModel& model, const Vocab& vocab,
                               const SubwordConfig& subwords,
                               std::string_view word) {
  const auto ids = subword_ids(word, vocab, subwords).all();
  if (ids.empty()) {
    throw Error("no vector for '" + std::string(word) +
                "': out of vocabulary and no character n-grams");
  }
  return compute_hidden(std::span<const std::int32_t>(ids), model).vector;
}

VectorSpace::VectorSpace(const EmbeddingModel& model, const Vocab& vocab,
                         const SubwordConfig& subwords)
    : raw_(vocab.size(), model.dim()),
      model_(&model),
      vocab_(&vocab),
      subwords_(subwords) {
  const SubwordTable table(vocab, subwords);
  Hidden h;
  words_.reserve(static_cast<std::size_t>(vocab.size()));
  for (const auto& e : vocab.entries()) {
    words_.push_back(e.word);
    compute_hidden(table.ids(e.id), model, h);
    std::copy(h.vector.begin(), h.vector.end(), raw_.row(e.id).begin());
  }
  index_and_normalize();
}

VectorSpace::VectorSpace(std::vector<std::string> words, Matrix vectors)
    : words_(std::move(words)), raw_(std::move(vectors)) {
  if (static_cast<std::int64_t>(words_.size()) != raw_.rows()) {
    throw std::invalid_argument("word list and vector rows differ in length");
  }
  index_and_normalize();
}

void VectorSpace::index_and_normalize() {
  index_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    index_.emplace(words_[i], static_cast<std::int32_t>(i));
  }
  unit_ = Matrix(raw_.rows(), raw_.cols());
  degenerate_.assign(words_.size(), 0);
  for (std::int64_t i = 0; i < raw_.rows(); ++i) {
    const auto src = raw_.row(i);
    const double n = norm(src);
    if (n < kMinVectorNorm) {
      degenerate_[static_cast<std::size_t>(i)] = 1;
      continue;
    }
    auto dst = unit_.row(i);
    for (std::size_t k = 0; k < src.size(); ++k) {
      dst[k] = static_cast<float>(src[k] / n);
    }
  }
}

std::optional<std::int32_t> VectorSpace::id(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::vector<float>> VectorSpace::vector(
    std::string_view word) const {
  if (auto i = id(word)) {
    const auto row = raw_.row(*i);
    return std::vector<float>(row.begin(), row.end());
  }
  if (model_ && subwords_.enabled()) {
    const auto ids = subword_ids(word, *vocab_, subwords_).all();
    if (!ids.empty()) {
      return compute_hidden(std::span<const std::int32_t>(ids), *model_).vector;
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

AnalogyDataset parse_analogies(std::istream& in) {
  AnalogyDataset data;
  std::string line;
  std::string category;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tokens = tokenize(line);
    if (tokens.empty()) continue;
    if (tokens[0].starts_with(':')) {
      // ": name" or ":name".
      std::string name = tokens[0].substr(1);
      if (name.empty() && tokens.size() > 1) name = tokens[1];
      if (name.empty()) {
        throw FormatError("line " + std::to_string(line_no) +
                          ": category header without a name");
      }
      category = std::move(name);
      if (std::find(data.categories.begin(), data.categories.end(), category) ==
          data.categories.end()) {
        data.categories.push_back(category);
      }
      continue;
    }
    if (tokens.size() != 4) {
      throw FormatError("line " + std::to_string(line_no) + ": expected 4 words, got " +
                        std::to_string(tokens.size()));
    }
    if (category.empty()) {
      category = "uncategorized";
      data.categories.push_back(category);
    }
    data.questions.push_back(AnalogyQuestion{lowercase(tokens[0]),
                                             lowercase(tokens[1]),
                                             lowercase(tokens[2]),
                                             lowercase(tokens[3]), category});
  }
  return data;
}

AnalogyDataset load_analogy_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open analogy file " + path.string());
  return parse_analogies(in);
}

std::optional<Prediction> analogy_predict(const VectorSpace& space,
                                          std::string_view a,
                                          std::string_view b,
                                          std::string_view c) {
  const std::string_view words[] = {a, b, c};
  std::vector<double> unit[3];
  std::optional<std::int32_t> exclude[3];
  for (int i = 0; i < 3; ++i) {
    exclude[i] = space.id(words[i]);
    auto v = space.vector(words[i]);
    if (!v) return std::nullopt;
    const double n = norm(*v);
    if (n < kMinVectorNorm) return std::nullopt;
    unit[i].resize(v->size());
    for (std::size_t k = 0; k < v->size(); ++k) unit[i][k] = (*v)[k] / n;
  }

  const auto dim = static_cast<std::size_t>(space.dim());
  std::vector<double> query(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    query[k] = unit[1][k] - unit[0][k] + unit[2][k];
  }
  const double qn = std::sqrt(
      std::inner_product(query.begin(), query.end(), query.begin(), 0.0));

  Prediction best;
  double best_dot = -std::numeric_limits<double>::infinity();
  for (std::int32_t x = 0; x < space.size(); ++x) {
    if (x == exclude[0] || x == exclude[1] || x == exclude[2]) continue;
    if (space.degenerate(x)) continue;
    const auto row = space.unit_row(x);
    double dot = 0;
    for (std::size_t k = 0; k < dim; ++k) dot += query[k] * row[k];
    if (dot > best_dot) {
      best_dot = dot;
      best.id = x;
    }
  }
  if (best.id < 0) return std::nullopt;
  best.cosine = qn > 0 ? best_dot / qn : 0.0;
  return best;
}

// ---------------------------------------------------------------------------

CategorySplit CategorySplit::parse_tsv(std::istream& in) {
  CategorySplit split;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tokens = tokenize(line);
    if (tokens.empty() || tokens[0].starts_with('#')) continue;
    if (tokens.size() != 2) {
      throw FormatError("split line " + std::to_string(line_no) +
                        ": expected category<TAB>semantic|syntactic");
    }
    std::string name = tokens[0];
    if (name.starts_with(':')) name.erase(0, 1);
    const auto kind = lowercase(tokens[1]);
    if (kind == "semantic") {
      split.overrides_[name] = Split::kSemantic;
    } else if (kind == "syntactic") {
      split.overrides_[name] = Split::kSyntactic;
    } else {
      throw FormatError("split line " + std::to_string(line_no) +
                        ": unknown split '" + tokens[1] + "'");
    }
  }
  return split;
}

CategorySplit CategorySplit::from_tsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open split file " + path.string());
  return parse_tsv(in);
}

Split CategorySplit::classify(std::string_view category) const {
  if (auto it = overrides_.find(std::string(category)); it != overrides_.end()) {
    return it->second;
  }
  return category.starts_with("gram") ? Split::kSyntactic : Split::kSemantic;
}

namespace {

// Per-question outcome: 0 skipped, 1 wrong, 2 correct.
std::vector<std::uint8_t> score_range(const VectorSpace& space,
                                      std::span<const AnalogyQuestion> qs) {
  std::vector<std::uint8_t> out(qs.size(), 0);
  for (std::size_t i = 0; i < qs.size(); ++i) {
    const auto& q = qs[i];
    const auto d = space.id(q.d);
    if (!space.id(q.a) || !space.id(q.b) || !space.id(q.c) || !d) continue;
    const auto p = analogy_predict(space, q.a, q.b, q.c);
    if (!p) {
      std::cerr << "warning: degenerate vector in question '" << q.a << ' '
                << q.b << ' ' << q.c << ' ' << q.d << "', skipped\n";
      continue;
    }
    out[i] = p->id == *d ? 2 : 1;
  }
  return out;
}

}  // namespace

AnalogyReport evaluate(const VectorSpace& space, const AnalogyDataset& dataset,
                       const CategorySplit& split, int workers) {
  const std::span<const AnalogyQuestion> qs(dataset.questions);
  std::vector<std::uint8_t> outcome(qs.size(), 0);

  workers = std::max(1, std::min<int>(workers, static_cast<int>(qs.size())));
  if (workers <= 1) {
    outcome = score_range(space, qs);
  } else {
    std::vector<std::thread> threads;
    const std::size_t chunk = (qs.size() + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const std::size_t begin = std::min(qs.size(), chunk * w);
      const std::size_t end = std::min(qs.size(), begin + chunk);
      threads.emplace_back([&, begin, end] {
        auto part = score_range(space, qs.subspan(begin, end - begin));
        std::copy(part.begin(), part.end(), outcome.begin() + begin);
      });
    }
    for (auto& t : threads) t.join();
  }

  AnalogyReport report;
  std::unordered_map<std::string, std::size_t> slot;
  for (const auto& name : dataset.categories) {
    slot.emplace(name, report.categories.size());
    report.categories.push_back(CategoryResult{name, split.classify(name), {}});
  }
  for (std::size_t i = 0; i < qs.size(); ++i) {
    auto [it, inserted] = slot.try_emplace(qs[i].category, report.categories.size());
    if (inserted) {
      report.categories.push_back(
          CategoryResult{qs[i].category, split.classify(qs[i].category), {}});
    }
    auto& tally = report.categories[it->second].tally;
    if (outcome[i] == 0) {
      ++tally.skipped;
    } else {
      ++tally.attempted;
      if (outcome[i] == 2) ++tally.correct;
    }
  }
  for (const auto& c : report.categories) {
    (c.split == Split::kSyntactic ? report.syntactic : report.semantic) += c.tally;
    report.total += c.tally;
  }
  return report;
}

namespace {

std::string format_accuracy(const Tally& t) {
  const auto acc = t.accuracy();
  if (!acc) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", *acc);
  return buf;
}

nlohmann::json tally_json(const Tally& t) {
  nlohmann::json j = {{"correct", t.correct},
                      {"attempted", t.attempted},
                      {"skipped", t.skipped}};
  if (auto acc = t.accuracy()) {
    j["accuracy"] = *acc;
  } else {
    j["accuracy"] = nullptr;
  }
  return j;
}

}  // namespace

void print_report(std::ostream& out, const AnalogyReport& report) {
  std::size_t width = 9;
  for (const auto& c : report.categories) width = std::max(width, c.name.size());
  auto row = [&](std::string_view name, std::string_view correct,
                 std::string_view attempted, std::string_view skipped,
                 std::string_view acc) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-*.*s | %9.*s | %9.*s | %9.*s | %8.*s\n",
                  static_cast<int>(width), static_cast<int>(name.size()),
                  name.data(), static_cast<int>(correct.size()), correct.data(),
                  static_cast<int>(attempted.size()), attempted.data(),
                  static_cast<int>(skipped.size()), skipped.data(),
                  static_cast<int>(acc.size()), acc.data());
    out << buf;
  };
  auto tally_row = [&](std::string_view name, const Tally& t) {
    row(name, std::to_string(t.correct), std::to_string(t.attempted),
        std::to_string(t.skipped), format_accuracy(t));
  };

  row("Category", "Correct", "Attempted", "Skipped", "Accuracy");
  out << std::string(width + 47, '-') << '\n';
  for (const auto& c : report.categories) tally_row(c.name, c.tally);
  out << std::string(width + 47, '-') << '\n';
  tally_row("Semantic", report.semantic);
  tally_row("Syntactic", report.syntactic);
  tally_row("Total", report.total);
}

std::string report_json(const AnalogyReport& report) {
  nlohmann::json cats = nlohmann::json::array();
  for (const auto& c : report.categories) {
    auto j = tally_json(c.tally);
    j["category"] = c.name;
    j["split"] = c.split == Split::kSyntactic ? "syntactic" : "semantic";
    cats.push_back(std::move(j));
  }
  nlohmann::json j = {{"categories", std::move(cats)},
                      {"semantic", tally_json(report.semantic)},
                      {"syntactic", tally_json(report.syntactic)},
                      {"total", tally_json(report.total)}};
  return j.dump();
}

// ---------------------------------------------------------------------------

std::vector<Neighbor> nearest_neighbors(const VectorSpace& space,
                                        std::string_view word, int k) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  const auto v = space.vector(word);
  if (!v) throw Error("no vector for '" + std::string(word) + "'");
  const double n = norm(*v);
  if (n < kMinVectorNorm) throw Error("degenerate vector for '" + std::string(word) + "'");
  const auto self = space.id(word);

  std::vector<std::pair<double, std::int32_t>> scored;
  scored.reserve(static_cast<std::size_t>(space.size()));
  for (std::int32_t x = 0; x < space.size(); ++x) {
    if (x == self || space.degenerate(x)) continue;
    const auto row = space.unit_row(x);
    double dot = 0;
    for (std::size_t i = 0; i < row.size(); ++i) dot += (*v)[i] * static_cast<double>(row[i]);
    scored.emplace_back(dot / n, x);
  }
  const auto take = std::min<std::size_t>(static_cast<std::size_t>(k), scored.size());
  std::partial_sort(scored.begin(), scored.begin() + take, scored.end(),
                    [](const auto& l, const auto& r) {
                      return l.first != r.first ? l.first > r.first
                                                : l.second < r.second;
                    });
  std::vector<Neighbor> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    out.push_back(Neighbor{space.word(scored[i].second), scored[i].first});
  }
  return out;
}

}  // namespace cbos
