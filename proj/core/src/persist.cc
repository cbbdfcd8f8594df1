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

#include "cbos/persist.h"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <type_traits>

#include "cbos/error.h"

namespace cbos {

namespace {

template <typename T>
T to_little(T value) {
  if constexpr (std::endian::native == std::endian::little || sizeof(T) == 1) {
    return value;
  } else {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    std::reverse(bytes, bytes + sizeof(T));
    std::memcpy(&value, bytes, sizeof(T));
    return value;
  }
}

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  template <typename T>
  void put(T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    value = to_little(value);
    out_.write(reinterpret_cast<const char*>(&value), sizeof(T));
  }

  void put_bytes(std::string_view bytes) {
    out_.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  }

  void put_floats(std::span<const float> values) {
    if constexpr (std::endian::native == std::endian::little) {
      out_.write(reinterpret_cast<const char*>(values.data()),
                 static_cast<std::streamsize>(values.size_bytes()));
    } else {
      for (float v : values) put(v);
    }
  }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::uint64_t offset() const noexcept { return offset_; }

  void read_exact(char* dst, std::size_t n, const char* what) {
    in_.read(dst, static_cast<std::streamsize>(n));
    const auto got = static_cast<std::uint64_t>(in_.gcount());
    if (got != n) {
      throw FormatError(std::string("truncated model file: ") + what +
                        " ends at byte offset " + std::to_string(offset_ + got));
    }
    offset_ += n;
  }

  template <typename T>
  T get(const char* what) {
    T value;
    read_exact(reinterpret_cast<char*>(&value), sizeof(T), what);
    return to_little(value);
  }

  void get_floats(std::span<float> values, const char* what) {
    read_exact(reinterpret_cast<char*>(values.data()), values.size_bytes(), what);
    if constexpr (std::endian::native != std::endian::little) {
      for (auto& v : values) v = to_little(v);
    }
  }

 private:
  std::istream& in_;
  std::uint64_t offset_ = 0;
};

ModelFileHeader read_header_block(Reader& r) {
  char magic[sizeof kModelMagic];
  r.read_exact(magic, sizeof magic, "magic");
  if (std::memcmp(magic, kModelMagic, sizeof magic) != 0) {
    throw FormatError("not a cbos model file (bad magic)");
  }
  ModelFileHeader h;
  h.version = r.get<std::uint32_t>("version");
  if (h.version != kModelVersion) {
    throw FormatError("unsupported model file version " + std::to_string(h.version) +
                      " (expected " + std::to_string(kModelVersion) + ")");
  }
  h.vocab_size = r.get<std::uint32_t>("header");
  h.bucket = r.get<std::uint64_t>("header");
  h.dim = r.get<std::uint32_t>("header");
  h.minn = r.get<std::int32_t>("header");
  h.maxn = r.get<std::int32_t>("header");
  const auto kind = r.get<std::uint8_t>("header");
  const auto has_variant = r.get<std::uint8_t>("header");
  const auto variant = r.get<std::uint8_t>("header");
  r.get<std::uint8_t>("header");
  if (kind > static_cast<std::uint8_t>(ModelKind::kCbos) ||
      variant > static_cast<std::uint8_t>(Variant::kNonRepeated) ||
      has_variant > 1) {
    throw FormatError("model file header has an unknown model kind or variant");
  }
  h.model = static_cast<ModelKind>(kind);
  if (has_variant) h.variant = static_cast<Variant>(variant);
  if (h.dim == 0) throw FormatError("model file header has zero dimension");
  if (h.vocab_size + h.bucket >
      static_cast<std::uint64_t>(std::numeric_limits<std::int32_t>::max())) {
    throw FormatError("model file header row count out of range");
  }
  return h;
}

}  // namespace

void save_bin(const TrainedModel& trained, std::ostream& out) {
  const auto& cfg = trained.config;
  const auto& vocab = trained.vocab;
  const auto& model = trained.model;
  if (model.vocab_size() != vocab.size()) {
    throw Error("model rows do not match vocabulary size");
  }

  Writer w(out);
  w.put_bytes(std::string_view(kModelMagic, sizeof kModelMagic));
  w.put<std::uint32_t>(kModelVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(vocab.size()));
  w.put<std::uint64_t>(static_cast<std::uint64_t>(model.bucket()));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(model.dim()));
  w.put<std::int32_t>(cfg.minn);
  w.put<std::int32_t>(cfg.maxn);
  w.put<std::uint8_t>(static_cast<std::uint8_t>(cfg.model));
  w.put<std::uint8_t>(cfg.variant ? 1 : 0);
  w.put<std::uint8_t>(static_cast<std::uint8_t>(cfg.variant.value_or(Variant::kBaseline)));
  w.put<std::uint8_t>(0);

  w.put<std::int32_t>(cfg.ws);
  w.put<std::int32_t>(cfg.epochs);
  w.put<double>(cfg.lr0);
  w.put<std::int32_t>(cfg.negatives);
  w.put<std::int64_t>(cfg.min_count);
  w.put<double>(cfg.t);
  w.put<std::int32_t>(cfg.workers);
  w.put<std::uint64_t>(cfg.seed);
  w.put<std::uint64_t>(cfg.negative_table_size);
  w.put<std::int64_t>(cfg.bucket);

  w.put<std::int64_t>(vocab.total_tokens());
  for (const auto& e : vocab.entries()) {
    w.put<std::uint32_t>(static_cast<std::uint32_t>(e.word.size()));
    w.put_bytes(e.word);
    w.put<std::int64_t>(e.count);
  }
  w.put_floats(model.input.data());
  w.put_floats(model.output.data());
  if (!out) throw Error("write failed while saving model");
}

void save_bin(const TrainedModel& trained, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  save_bin(trained, out);
  out.close();
  if (!out) throw Error("write failed for " + path.string());
}

TrainedModel load_bin(std::istream& in) {
  Reader r(in);
  const auto h = read_header_block(r);

  TrainedModel t;
  auto& cfg = t.config;
  cfg.model = h.model;
  cfg.variant = h.variant;
  cfg.dim = static_cast<int>(h.dim);
  cfg.minn = h.minn;
  cfg.maxn = h.maxn;
  cfg.ws = r.get<std::int32_t>("config");
  cfg.epochs = r.get<std::int32_t>("config");
  cfg.lr0 = r.get<double>("config");
  cfg.negatives = r.get<std::int32_t>("config");
  cfg.min_count = r.get<std::int64_t>("config");
  cfg.t = r.get<double>("config");
  cfg.workers = r.get<std::int32_t>("config");
  cfg.seed = r.get<std::uint64_t>("config");
  cfg.negative_table_size = r.get<std::uint64_t>("config");
  cfg.bucket = r.get<std::int64_t>("config");
  if (static_cast<std::uint64_t>(cfg.subwords().bucket) != h.bucket) {
    throw FormatError("model file bucket does not match its configuration");
  }

  const auto total = r.get<std::int64_t>("vocabulary");
  std::vector<std::pair<std::string, std::int64_t>> counts;
  counts.reserve(h.vocab_size);
  std::int64_t sum = 0;
  for (std::uint32_t i = 0; i < h.vocab_size; ++i) {
    const auto len = r.get<std::uint32_t>("vocabulary");
    if (len == 0 || len > (1u << 20)) {
      throw FormatError("implausible word length in vocabulary at byte offset " +
                        std::to_string(r.offset() - 4));
    }
    std::string word(len, '\0');
    r.read_exact(word.data(), len, "vocabulary");
    const auto count = r.get<std::int64_t>("vocabulary");
    if (count < 1) throw FormatError("non-positive count in vocabulary");
    if (i > 0 && count > counts.back().second) {
      throw FormatError("vocabulary is not sorted by descending count");
    }
    sum += count;
    counts.emplace_back(std::move(word), count);
  }
  if (sum != total) throw FormatError("vocabulary total does not match counts");

  // Derived tables: discard probabilities only. Training needs a freshly
  // built negative table anyway.
  VocabOptions opts = cfg.vocab_options();
  opts.min_count = 1;
  opts.negative_table_size = 0;
  if (h.vocab_size > 0) t.vocab = Vocab::from_counts(std::move(counts), opts);

  t.model.input = Matrix(static_cast<std::int64_t>(h.vocab_size + h.bucket), h.dim);
  t.model.output = Matrix(h.vocab_size, h.dim);
  r.get_floats(t.model.input.data(), "input matrix");
  r.get_floats(t.model.output.data(), "output matrix");
  return t;
}

TrainedModel load_bin(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model " + path.string());
  return load_bin(in);
}

ModelFileHeader read_header(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model " + path.string());
  Reader r(in);
  return read_header_block(r);
}

// ---------------------------------------------------------------------------

void save_vec(const TrainedModel& trained, std::ostream& out, int precision) {
  const auto& vocab = trained.vocab;
  if (vocab.empty()) throw EmptyVocabError("cannot write vectors for an empty vocabulary");
  const SubwordTable table(vocab, trained.config.subwords());
  const int dim = trained.model.dim();
  out << vocab.size() << ' ' << dim << '\n';
  out << std::fixed << std::setprecision(precision);
  Hidden h;
  for (const auto& e : vocab.entries()) {
    compute_hidden(table.ids(e.id), trained.model, h);
    out << e.word;
    for (float x : h.vector) out << ' ' << x;
    out << '\n';
  }
}

void save_vec(const TrainedModel& trained, const std::filesystem::path& path,
              int precision) {
  if (trained.vocab.empty()) {
    throw EmptyVocabError("cannot write vectors for an empty vocabulary");
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  save_vec(trained, out, precision);
  out.close();
  if (!out) throw Error("write failed for " + path.string());
}

VectorSpace load_vec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open vectors " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty vector file");
  std::int64_t rows = 0;
  std::int64_t dim = 0;
  {
    std::istringstream header(line);
    if (!(header >> rows >> dim) || rows < 0 || dim < 1) {
      throw FormatError("line 1: expected '<count> <dim>' header");
    }
  }
  std::vector<std::string> words;
  words.reserve(static_cast<std::size_t>(rows));
  Matrix vectors(rows, dim);
  for (std::int64_t i = 0; i < rows; ++i) {
    if (!std::getline(in, line)) {
      throw FormatError("vector file ends after " + std::to_string(i) + " of " +
                        std::to_string(rows) + " rows");
    }
    const auto fields = tokenize(line);
    if (static_cast<std::int64_t>(fields.size()) != dim + 1) {
      throw FormatError("line " + std::to_string(i + 2) + ": expected " +
                        std::to_string(dim + 1) + " fields");
    }
    words.push_back(fields[0]);
    auto row = vectors.row(i);
    for (std::int64_t k = 0; k < dim; ++k) {
      try {
        row[static_cast<std::size_t>(k)] = std::stof(fields[static_cast<std::size_t>(k + 1)]);
      } catch (const std::exception&) {
        throw FormatError("line " + std::to_string(i + 2) + ": bad number '" +
                          fields[static_cast<std::size_t>(k + 1)] + "'");
      }
    }
  }
  return VectorSpace(std::move(words), std::move(vectors));
}

}  // namespace cbos
