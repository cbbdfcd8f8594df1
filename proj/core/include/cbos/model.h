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

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace cbos {

/// Dense row-major matrix. Row count and width are fixed at construction.
template <typename Real>
class BasicMatrix {
 public:
  BasicMatrix() = default;
  BasicMatrix(std::int64_t rows, std::int64_t cols)
      : rows_(rows), cols_(cols),
        data_(static_cast<std::size_t>(rows * cols), Real{0}) {}

  std::int64_t rows() const noexcept { return rows_; }
  std::int64_t cols() const noexcept { return cols_; }

  std::span<Real> row(std::int64_t i) noexcept {
    assert(i >= 0 && i < rows_);
    return {data_.data() + i * cols_, static_cast<std::size_t>(cols_)};
  }
  std::span<const Real> row(std::int64_t i) const noexcept {
    assert(i >= 0 && i < rows_);
    return {data_.data() + i * cols_, static_cast<std::size_t>(cols_)};
  }

  std::span<Real> data() noexcept { return data_; }
  std::span<const Real> data() const noexcept { return data_; }

  friend bool operator==(const BasicMatrix&, const BasicMatrix&) = default;

 private:
  std::int64_t rows_ = 0;
  std::int64_t cols_ = 0;
  std::vector<Real> data_;
};

/// Input matrix holds V word rows followed by `bucket` n-gram rows; the
/// output matrix holds one row per vocabulary word.
template <typename Real>
struct BasicEmbeddingModel {
  BasicMatrix<Real> input;
  BasicMatrix<Real> output;

  int dim() const noexcept { return static_cast<int>(input.cols()); }
  std::int32_t vocab_size() const noexcept {
    return static_cast<std::int32_t>(output.rows());
  }
  std::int64_t bucket() const noexcept { return input.rows() - output.rows(); }

  friend bool operator==(const BasicEmbeddingModel&,
                         const BasicEmbeddingModel&) = default;
};

using Matrix = BasicMatrix<float>;
using EmbeddingModel = BasicEmbeddingModel<float>;

/// Input rows iid uniform on [-1/dim, 1/dim], output rows zero.
EmbeddingModel init_model(std::int32_t vocab_size, std::int64_t bucket,
                          int dim, std::uint64_t seed);

/// Mean of a bag of input rows. The scale is kept so gradients can be
/// distributed back to exactly the rows that formed the mean.
template <typename Real>
struct BasicHidden {
  std::vector<Real> vector;
  std::vector<std::int32_t> source_ids;
  Real scale = 0;
};

using Hidden = BasicHidden<float>;

// Numerically stable logistic helpers. Neither overflows for any finite x.
inline double sigmoid(double x) noexcept {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline double log_sigmoid(double x) noexcept {
  if (x >= 0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

namespace detail {

template <typename Real>
double dot(std::span<const Real> a, std::span<const Real> b) noexcept {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    s += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  }
  return s;
}

template <typename Real>
void check_targets(const BasicEmbeddingModel<Real>& model, std::int32_t target,
                   std::span<const std::int32_t> negatives) {
  const auto v = model.vocab_size();
  if (target < 0 || target >= v) {
    throw std::out_of_range("target id outside vocabulary");
  }
  for (auto n : negatives) {
    if (n < 0 || n >= v) throw std::out_of_range("negative id outside vocabulary");
  }
}

}  // namespace detail

/// Fills `out` with the mean of input rows `ids`, reusing its buffers.
template <typename Real>
void compute_hidden(std::span<const std::int32_t> ids,
                    const BasicEmbeddingModel<Real>& model,
                    BasicHidden<Real>& out) {
  if (ids.empty()) throw std::invalid_argument("hidden layer needs at least one id");
  const auto dim = static_cast<std::size_t>(model.dim());
  out.vector.assign(dim, Real{0});
  out.source_ids.assign(ids.begin(), ids.end());
  for (auto id : ids) {
    if (id < 0 || id >= model.input.rows()) {
      throw std::out_of_range("input row id out of range");
    }
    const auto row = model.input.row(id);
    for (std::size_t k = 0; k < dim; ++k) out.vector[k] += row[k];
  }
  out.scale = Real{1} / static_cast<Real>(ids.size());
  for (auto& x : out.vector) x *= out.scale;
}

template <typename Real>
BasicHidden<Real> compute_hidden(std::span<const std::int32_t> ids,
                                 const BasicEmbeddingModel<Real>& model) {
  BasicHidden<Real> h;
  compute_hidden(ids, model, h);
  return h;
}

/// Negative-sampling objective
///   -log s(u_t . h) - sum_n log s(-u_n . h)
/// where u are output rows and s is the logistic function.
template <typename Real>
double ns_loss(const BasicHidden<Real>& hidden, std::int32_t target,
               std::span<const std::int32_t> negatives,
               const BasicEmbeddingModel<Real>& model) {
  detail::check_targets(model, target, negatives);
  const std::span<const Real> h(hidden.vector);
  double loss = -log_sigmoid(detail::dot(model.output.row(target), h));
  for (auto n : negatives) {
    loss -= log_sigmoid(-detail::dot(model.output.row(n), h));
  }
  return loss;
}

/// One SGD step on ns_loss. Output rows move by lr * (label - s(u.h)) * h,
/// evaluated one row at a time. The input-side gradient is accumulated from
/// the pre-update output rows and added to every source row scaled by
/// hidden.scale. `grad` is caller-owned scratch. Returns the loss before
/// the step.
template <typename Real>
double ns_update(const BasicHidden<Real>& hidden, std::int32_t target,
                 std::span<const std::int32_t> negatives, Real lr,
                 BasicEmbeddingModel<Real>& model, std::vector<Real>& grad) {
  detail::check_targets(model, target, negatives);
  const auto dim = static_cast<std::size_t>(model.dim());
  const std::span<const Real> h(hidden.vector);
  grad.assign(dim, Real{0});

  double loss = 0;
  auto step = [&](std::int32_t row_id, bool positive) {
    auto u = model.output.row(row_id);
    const double score = detail::dot(std::span<const Real>(u), h);
    loss -= log_sigmoid(positive ? score : -score);
    const auto alpha =
        static_cast<Real>(lr * ((positive ? 1.0 : 0.0) - sigmoid(score)));
    for (std::size_t k = 0; k < dim; ++k) grad[k] += alpha * u[k];
    for (std::size_t k = 0; k < dim; ++k) u[k] += alpha * h[k];
  };
  step(target, true);
  for (auto n : negatives) step(n, false);

  for (auto id : hidden.source_ids) {
    auto x = model.input.row(id);
    for (std::size_t k = 0; k < dim; ++k) x[k] += hidden.scale * grad[k];
  }
  return loss;
}

template <typename Real>
double ns_update(const BasicHidden<Real>& hidden, std::int32_t target,
                 std::span<const std::int32_t> negatives, Real lr,
                 BasicEmbeddingModel<Real>& model) {
  std::vector<Real> grad;
  return ns_update(hidden, target, negatives, lr, model, grad);
}

/// True when every entry of both matrices is finite.
template <typename Real>
bool all_finite(const BasicEmbeddingModel<Real>& model) {
  auto finite = [](Real x) { return std::isfinite(x); };
  return std::all_of(model.input.data().begin(), model.input.data().end(),
                     finite) &&
         std::all_of(model.output.data().begin(), model.output.data().end(),
                     finite);
}

}  // namespace cbos
