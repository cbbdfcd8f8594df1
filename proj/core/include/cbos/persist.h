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

#include "cbos/eval.h"
#include "cbos/trainer.h"

namespace cbos {

// Native model file (little-endian):
//
//   char[8]  magic "CBOSMDL\0"
//   u32      format version
//   u32      V, u64 bucket, u32 dim, i32 minn, i32 maxn
//   u8       model kind, u8 has_variant, u8 variant, u8 reserved
//   i32 ws, i32 epochs, f64 lr0, i32 neg, i64 min_count, f64 t,
//   i32 workers, u64 seed, u64 negative table size, i64 configured bucket
//   i64      total tokens
//   V x { u32 byte length, bytes, i64 count }
//   f32      input matrix  (V + bucket) x dim, row-major
//   f32      output matrix V x dim, row-major

inline constexpr char kModelMagic[8] = {'C', 'B', 'O', 'S', 'M', 'D', 'L', '\0'};
inline constexpr std::uint32_t kModelVersion = 1;

struct ModelFileHeader {
  std::uint32_t version = kModelVersion;
  std::uint32_t vocab_size = 0;
  std::uint64_t bucket = 0;
  std::uint32_t dim = 0;
  std::int32_t minn = 0;
  std::int32_t maxn = 0;
  ModelKind model = ModelKind::kCbos;
  std::optional<Variant> variant;
};

void save_bin(const TrainedModel& trained, const std::filesystem::path& path);
void save_bin(const TrainedModel& trained, std::ostream& out);

/// Throws FormatError on a bad magic, unsupported version, inconsistent
/// header or truncated payload (the message names the byte offset).
TrainedModel load_bin(const std::filesystem::path& path);
TrainedModel load_bin(std::istream& in);

/// Reads only the header block.
ModelFileHeader read_header(const std::filesystem::path& path);

/// `V dim` header then one `word v1 ... vdim` line per vocabulary word in id
/// order. Vectors are the composed word + n-gram means. Throws before
/// creating the file if the vocabulary is empty.
void save_vec(const TrainedModel& trained, const std::filesystem::path& path,
              int precision = 4);
void save_vec(const TrainedModel& trained, std::ostream& out, int precision = 4);

/// Parses a `.vec` file into a plain vector space.
VectorSpace load_vec(const std::filesystem::path& path);

}  // namespace cbos
