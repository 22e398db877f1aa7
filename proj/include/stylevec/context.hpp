/*
 * Copyright 2026 The stylevec Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "stylevec/common.hpp"

namespace stylevec {

/// Context positions around a target inside one utterance. `near` holds
/// positions at distance 1..delta, `dist` everything farther; both ascending.
/// The window is fixed: delta is never resampled.
struct ContextSets {
  std::vector<std::size_t> near;
  std::vector<std::size_t> dist;
  std::size_t target = 0;
  std::size_t delta = 0;

  /// near ∪ dist, ascending.
  std::vector<std::size_t> all() const {
    std::vector<std::size_t> out;
    all_into(out);
    return out;
  }

  void all_into(std::vector<std::size_t>& out) const {
    out.resize(near.size() + dist.size());
    std::merge(near.begin(), near.end(), dist.begin(), dist.end(), out.begin());
  }
};

inline void extract_into(std::size_t utterance_len, std::size_t target, std::size_t delta,
                         ContextSets& out) {
  if (utterance_len == 0) throw Error("context: empty utterance");
  if (target >= utterance_len) throw Error("context: target position out of range");
  if (delta == 0) throw Error("context: delta must be at least 1");

  out.target = target;
  out.delta = delta;
  out.near.clear();
  out.dist.clear();

  std::size_t lo = target > delta ? target - delta : 0;
  std::size_t hi = std::min(utterance_len - 1, target + delta);
  for (std::size_t p = 0; p < lo; ++p) out.dist.push_back(p);
  for (std::size_t p = lo; p <= hi; ++p) {
    if (p != target) out.near.push_back(p);
  }
  for (std::size_t p = hi + 1; p < utterance_len; ++p) out.dist.push_back(p);
}

inline ContextSets extract(std::size_t utterance_len, std::size_t target, std::size_t delta) {
  ContextSets out;
  extract_into(utterance_len, target, delta, out);
  return out;
}

}  // namespace stylevec
