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

// Central finite-difference check of ns_update's implied gradient against
// the scalar loss oracle. Shared by the unit and acceptance suites.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include "cbos/model.h"
#include "oracles.h"

namespace cbos::testing {

using DoubleModel = BasicEmbeddingModel<double>;

struct GradInstance {
  DoubleModel model;
  std::vector<std::int32_t> sources;
  std::int32_t target = 0;
  std::vector<std::int32_t> negatives;
};

/// Random instance with dim in [1, max_dim], up to `max_negatives` distinct
/// negatives and 1-4 source rows (repeats allowed).
inline GradInstance random_instance(std::mt19937_64& rng, int max_dim = 8,
                                    int max_negatives = 5) {
  GradInstance g;
  const int dim = std::uniform_int_distribution<int>(1, max_dim)(rng);
  const int negs = std::uniform_int_distribution<int>(0, max_negatives)(rng);
  const int vocab = negs + 1 + std::uniform_int_distribution<int>(0, 3)(rng);
  const int bucket = std::uniform_int_distribution<int>(0, 4)(rng);
  g.model.input = BasicMatrix<double>(vocab + bucket, dim);
  g.model.output = BasicMatrix<double>(vocab, dim);
  std::uniform_real_distribution<double> value(-1.0, 1.0);
  for (auto& x : g.model.input.data()) x = value(rng);
  for (auto& x : g.model.output.data()) x = value(rng);

  const int n_sources = std::uniform_int_distribution<int>(1, 4)(rng);
  std::uniform_int_distribution<int> row(0, vocab + bucket - 1);
  for (int i = 0; i < n_sources; ++i) g.sources.push_back(row(rng));

  std::vector<std::int32_t> ids(vocab);
  for (int i = 0; i < vocab; ++i) ids[i] = i;
  std::shuffle(ids.begin(), ids.end(), rng);
  g.target = ids[0];
  g.negatives.assign(ids.begin() + 1, ids.begin() + 1 + negs);
  return g;
}

/// Loss of the instance evaluated by the independent oracle.
inline double oracle_loss(const GradInstance& g) {
  auto row = [](const BasicMatrix<double>& m, std::int64_t i) {
    auto r = m.row(i);
    return std::vector<double>(r.begin(), r.end());
  };
  std::vector<std::vector<double>> inputs;
  for (auto id : g.sources) inputs.push_back(row(g.model.input, id));
  std::vector<std::vector<double>> negs;
  for (auto n : g.negatives) negs.push_back(row(g.model.output, n));
  return oracle::ns_loss(inputs, row(g.model.output, g.target), negs);
}

struct GradCheckResult {
  double max_relative_error = 0;
  int parameters = 0;
};

/// Relative error |a - n| / max(|a|, |n|), or absolute error when both are
/// below `floor`.
inline double relative_error(double analytic, double numeric, double floor) {
  const double scale = std::max(std::abs(analytic), std::abs(numeric));
  const double diff = std::abs(analytic - numeric);
  return scale < floor ? diff : diff / scale;
}

/// One ns_update with lr = 1 on a copy gives -grad exactly for every
/// touched parameter (targets are distinct, all reads precede writes).
/// Compares against central differences of oracle_loss with step eps.
inline GradCheckResult check_gradient(const GradInstance& g, double eps = 1e-4,
                                      double floor = 1e-10) {
  DoubleModel stepped = g.model;
  const auto hidden = compute_hidden(std::span<const std::int32_t>(g.sources), stepped);
  ns_update(hidden, g.target, std::span<const std::int32_t>(g.negatives), 1.0, stepped);

  GradCheckResult result;
  auto probe = [&](bool output, std::int64_t row, std::int64_t col) {
    GradInstance plus = g;
    GradInstance minus = g;
    auto& mp = output ? plus.model.output : plus.model.input;
    auto& mm = output ? minus.model.output : minus.model.input;
    mp.row(row)[col] += eps;
    mm.row(row)[col] -= eps;
    const double numeric = (oracle_loss(plus) - oracle_loss(minus)) / (2 * eps);
    const auto& before = output ? g.model.output : g.model.input;
    const auto& after = output ? stepped.output : stepped.input;
    const double analytic = -(after.row(row)[col] - before.row(row)[col]);
    result.max_relative_error =
        std::max(result.max_relative_error, relative_error(analytic, numeric, floor));
    ++result.parameters;
  };

  const auto dim = g.model.dim();
  std::set<std::int32_t> outputs(g.negatives.begin(), g.negatives.end());
  outputs.insert(g.target);
  for (auto r : outputs) {
    for (int c = 0; c < dim; ++c) probe(true, r, c);
  }
  for (auto r : std::set<std::int32_t>(g.sources.begin(), g.sources.end())) {
    for (int c = 0; c < dim; ++c) probe(false, r, c);
  }
  return result;
}

}  // namespace cbos::testing
