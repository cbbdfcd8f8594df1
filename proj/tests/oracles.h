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

// Independent reference computations used only by tests. Nothing here calls
// into the library's implementation of the quantity it checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cbos::oracle {

/// Textbook 32-bit FNV-1a over unsigned bytes.
inline std::uint32_t fnv1a(std::string_view s) {
  std::uint32_t h = 0x811C9DC5u;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x01000193u;
  }
  return h;
}

/// Splits UTF-8 into code-point strings.
inline std::vector<std::string> code_points(std::string_view s) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < s.size();) {
    const auto c = static_cast<unsigned char>(s[i]);
    const std::size_t len = c < 0x80 ? 1 : (c >> 5) == 6 ? 2 : (c >> 4) == 14 ? 3 : 4;
    out.emplace_back(s.substr(i, len));
    i += len;
  }
  return out;
}

/// All substrings of "<word>" with code-point length in [minn, maxn] except
/// the whole wrapped word, sorted by (start, length).
inline std::vector<std::string> ngrams(std::string_view word, int minn, int maxn) {
  if (word.empty()) return {};
  auto cps = code_points(word);
  cps.insert(cps.begin(), "<");
  cps.push_back(">");
  std::vector<std::pair<std::pair<std::size_t, std::size_t>, std::string>> all;
  for (std::size_t len = static_cast<std::size_t>(minn);
       len <= static_cast<std::size_t>(maxn); ++len) {
    for (std::size_t start = 0; start + len <= cps.size(); ++start) {
      if (start == 0 && len == cps.size()) continue;
      std::string g;
      for (std::size_t k = start; k < start + len; ++k) g += cps[k];
      all.push_back({{start, len}, g});
    }
  }
  std::sort(all.begin(), all.end());
  std::vector<std::string> out;
  for (auto& [key, g] : all) out.push_back(g);
  return out;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// -log(1/(1+e^-x)) evaluated the direct way; fine for |x| well below 700.
inline double neg_log_sigmoid(double x) { return std::log(1.0 + std::exp(-x)); }

/// Negative-sampling loss from scratch. `inputs` are the rows averaged into
/// the hidden vector.
inline double ns_loss(const std::vector<std::vector<double>>& inputs,
                      const std::vector<double>& target_row,
                      const std::vector<std::vector<double>>& negative_rows) {
  std::vector<double> h(target_row.size(), 0.0);
  for (const auto& r : inputs) {
    for (std::size_t k = 0; k < h.size(); ++k) h[k] += r[k];
  }
  for (auto& x : h) x /= static_cast<double>(inputs.size());
  double loss = neg_log_sigmoid(dot(target_row, h));
  for (const auto& n : negative_rows) loss += neg_log_sigmoid(-dot(n, h));
  return loss;
}

inline std::vector<double> unit(const std::vector<double>& v) {
  const double n = std::sqrt(dot(v, v));
  std::vector<double> out(v);
  for (auto& x : out) x /= n;
  return out;
}

/// Exhaustive 3CosAdd: scores every word by full cosine and returns the best
/// index outside {a, b, c}; ties to the lower index.
inline int brute_force_analogy(const std::vector<std::vector<double>>& vectors,
                               int a, int b, int c) {
  const auto ua = unit(vectors[a]);
  const auto ub = unit(vectors[b]);
  const auto uc = unit(vectors[c]);
  std::vector<double> q(ua.size());
  for (std::size_t k = 0; k < q.size(); ++k) q[k] = ub[k] - ua[k] + uc[k];
  const double qn = std::sqrt(dot(q, q));
  int best = -1;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int x = 0; x < static_cast<int>(vectors.size()); ++x) {
    if (x == a || x == b || x == c) continue;
    const double score =
        dot(q, vectors[x]) / (qn * std::sqrt(dot(vectors[x], vectors[x])));
    if (score > best_score) {
      best_score = score;
      best = x;
    }
  }
  return best;
}

/// Exhaustive neighbour ranking by cosine, excluding `self`.
inline std::vector<int> brute_force_neighbors(
    const std::vector<std::vector<double>>& vectors,
    const std::vector<double>& query, int self, int k) {
  std::vector<std::pair<double, int>> scored;
  for (int x = 0; x < static_cast<int>(vectors.size()); ++x) {
    if (x == self) continue;
    scored.emplace_back(
        -dot(query, vectors[x]) /
            (std::sqrt(dot(query, query)) * std::sqrt(dot(vectors[x], vectors[x]))),
        x);
  }
  std::sort(scored.begin(), scored.end());
  std::vector<int> out;
  for (int i = 0; i < k && i < static_cast<int>(scored.size()); ++i) {
    out.push_back(scored[i].second);
  }
  return out;
}

/// Word counts via an ordered map, then (count desc, first-seen asc).
inline std::vector<std::pair<std::string, std::int64_t>> ranked_counts(
    const std::vector<std::string>& tokens, std::int64_t min_count) {
  std::map<std::string, std::pair<std::int64_t, std::size_t>> seen;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    auto [it, inserted] = seen.try_emplace(tokens[i], 0, i);
    ++it->second.first;
  }
  std::vector<std::pair<std::pair<std::int64_t, std::size_t>, std::string>> rows;
  for (auto& [w, cf] : seen) {
    if (cf.first >= min_count) rows.push_back({{-cf.first, cf.second}, w});
  }
  std::sort(rows.begin(), rows.end());
  std::vector<std::pair<std::string, std::int64_t>> out;
  for (auto& [key, w] : rows) out.emplace_back(w, -key.first);
  return out;
}

}  // namespace cbos::oracle
