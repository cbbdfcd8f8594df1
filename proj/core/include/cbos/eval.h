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
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cbos/corpus.h"
#include "cbos/model.h"
#include "cbos/subword.h"

namespace cbos {

/// Norms below this are treated as degenerate (no direction).
inline constexpr double kMinVectorNorm = 1e-12;

/// Composed word vectors: mean of the word row and its n-gram rows. Words
/// outside the vocabulary are composed from n-grams alone.
std::vector<float> word_vector(const EmbeddingModel& model, const Vocab& vocab,
                               const SubwordConfig& subwords,
                               std::string_view word);

/// Read-only vector space used for analogy and neighbour queries. Holds a
/// unit-normalized copy of every vocabulary vector. When built from a
/// model, OOV queries are composed from n-grams; the model and vocabulary
/// must outlive the space in that case.
class VectorSpace {
 public:
  VectorSpace(const EmbeddingModel& model, const Vocab& vocab,
              const SubwordConfig& subwords);
  /// Plain lookup table (e.g. a `.vec` file); no OOV composition.
  VectorSpace(std::vector<std::string> words, Matrix vectors);

  std::int32_t size() const noexcept {
    return static_cast<std::int32_t>(words_.size());
  }
  int dim() const noexcept { return static_cast<int>(raw_.cols()); }

  std::optional<std::int32_t> id(std::string_view word) const;
  const std::string& word(std::int32_t id) const { return words_.at(id); }

  /// Raw (unnormalized) vector for any resolvable word.
  std::optional<std::vector<float>> vector(std::string_view word) const;

  std::span<const float> raw_row(std::int32_t id) const { return raw_.row(id); }
  /// Unit-length row, or all zeros if the raw row is degenerate.
  std::span<const float> unit_row(std::int32_t id) const { return unit_.row(id); }
  bool degenerate(std::int32_t id) const { return degenerate_.at(id) != 0; }

 private:
  void index_and_normalize();

  std::vector<std::string> words_;
  std::unordered_map<std::string, std::int32_t> index_;
  Matrix raw_;
  Matrix unit_;
  std::vector<char> degenerate_;
  const EmbeddingModel* model_ = nullptr;
  const Vocab* vocab_ = nullptr;
  SubwordConfig subwords_{0, 0, 0};
};

// ---------------------------------------------------------------------------
// Analogies
// ---------------------------------------------------------------------------

struct AnalogyQuestion {
  std::string a, b, c, d;
  std::string category;
};

struct AnalogyDataset {
  /// In order of first appearance, including categories with no questions.
  std::vector<std::string> categories;
  std::vector<AnalogyQuestion> questions;
};

/// Mikolov format: `: name` starts a category, other non-blank lines hold
/// four words. Words are lowercased. Throws FormatError with the line
/// number on a malformed line.
AnalogyDataset load_analogy_file(const std::filesystem::path& path);
AnalogyDataset parse_analogies(std::istream& in);

struct Prediction {
  std::int32_t id = -1;
  double cosine = 0;
};

/// 3CosAdd: argmax over vocabulary x not in {a, b, c} of
/// cos(unit(b) - unit(a) + unit(c), v_x). Ties go to the lower id.
/// Returns nullopt when a, b or c cannot be resolved or has a degenerate
/// vector.
std::optional<Prediction> analogy_predict(const VectorSpace& space,
                                          std::string_view a,
                                          std::string_view b,
                                          std::string_view c);

enum class Split : std::uint8_t { kSemantic, kSyntactic };

/// Category to semantic/syntactic mapping. Defaults to the Mikolov
/// convention (names starting with "gram" are syntactic); a TSV sidecar of
/// `category<TAB>semantic|syntactic` lines overrides it per category.
class CategorySplit {
 public:
  CategorySplit() = default;
  static CategorySplit from_tsv(const std::filesystem::path& path);
  static CategorySplit parse_tsv(std::istream& in);

  Split classify(std::string_view category) const;

 private:
  std::unordered_map<std::string, Split> overrides_;
};

struct Tally {
  std::int64_t correct = 0;
  std::int64_t attempted = 0;
  std::int64_t skipped = 0;

  /// Percentage, or nullopt when nothing was attempted.
  std::optional<double> accuracy() const {
    if (attempted == 0) return std::nullopt;
    return 100.0 * static_cast<double>(correct) / static_cast<double>(attempted);
  }
  Tally& operator+=(const Tally& o) {
    correct += o.correct;
    attempted += o.attempted;
    skipped += o.skipped;
    return *this;
  }
  friend bool operator==(const Tally&, const Tally&) = default;
};

struct CategoryResult {
  std::string name;
  Split split = Split::kSemantic;
  Tally tally;
  friend bool operator==(const CategoryResult&, const CategoryResult&) = default;
};

struct AnalogyReport {
  std::vector<CategoryResult> categories;
  Tally semantic;
  Tally syntactic;
  Tally total;
  friend bool operator==(const AnalogyReport&, const AnalogyReport&) = default;
};

/// Scores every question. A question is skipped when any of its four words
/// is outside the space's vocabulary or a query vector is degenerate;
/// otherwise it is attempted and correct iff the top-1 prediction is d.
/// `workers` > 1 shards questions across threads.
AnalogyReport evaluate(const VectorSpace& space, const AnalogyDataset& dataset,
                       const CategorySplit& split = {}, int workers = 1);

void print_report(std::ostream& out, const AnalogyReport& report);
std::string report_json(const AnalogyReport& report);

// ---------------------------------------------------------------------------

struct Neighbor {
  std::string word;
  double cosine = 0;
};

/// Top-k vocabulary words by cosine to `word`, excluding the word itself,
/// descending, ties by lower id. Throws std::invalid_argument for k < 1 and
/// Error when the word cannot be resolved.
std::vector<Neighbor> nearest_neighbors(const VectorSpace& space,
                                        std::string_view word, int k);

}  // namespace cbos
