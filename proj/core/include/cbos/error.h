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
#include <stdexcept>
#include <string>

namespace cbos {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed UTF-8 in an input stream. `offset` is the byte offset of the
/// first byte of the offending sequence.
class DecodeError : public Error {
 public:
  DecodeError(std::uint64_t offset, const std::string& what)
      : Error(what + " at byte offset " + std::to_string(offset)),
        offset_(offset) {}

  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

/// Malformed or truncated input file (analogy set, model file).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Vocabulary ended up with no entries.
class EmptyVocabError : public Error {
 public:
  EmptyVocabError() : Error("vocabulary is empty") {}
  explicit EmptyVocabError(const std::string& what) : Error(what) {}
};

/// Invalid or contradictory training configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace cbos
