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

#include <span>
#include <string>
#include <vector>

#include "stylevec/common.hpp"

namespace stylevec {

/// Read-only window onto a row-major vector table: each row is the
/// [offset, offset + width) slice of a stride-wide record. Evaluation code
/// takes this so trained models and loaded files are interchangeable.
class EmbeddingView {
 public:
  EmbeddingView(const WordIndex& words, std::span<const double> values, std::size_t stride,
                std::size_t offset, std::size_t width)
      : words_(&words), values_(values), stride_(stride), offset_(offset), width_(width) {
    if (width == 0) throw Error("embedding view: zero width");
    if (offset + width > stride) throw Error("embedding view: slice exceeds row");
    if (values.size() != words.size() * stride) throw Error("embedding view: table size mismatch");
  }

  std::size_t size() const { return words_->size(); }
  std::size_t width() const { return width_; }
  const WordIndex& words() const { return *words_; }
  const std::string& word(WordId id) const { return words_->word(id); }
  std::optional<WordId> find(const std::string& word) const { return words_->find(word); }

  std::span<const double> row(WordId id) const {
    return values_.subspan(static_cast<std::size_t>(id) * stride_ + offset_, width_);
  }

 private:
  const WordIndex* words_;
  std::span<const double> values_;
  std::size_t stride_;
  std::size_t offset_;
  std::size_t width_;
};

/// Vectors loaded from disk.
struct VectorTable {
  WordIndex words;
  std::size_t dimension = 0;
  std::vector<double> values;

  std::span<const double> row(WordId id) const {
    return std::span<const double>(values).subspan(static_cast<std::size_t>(id) * dimension, dimension);
  }

  EmbeddingView view() const { return EmbeddingView(words, values, dimension, 0, dimension); }

  EmbeddingView view(std::size_t offset, std::size_t width) const {
    return EmbeddingView(words, values, dimension, offset, width);
  }
};

}  // namespace stylevec
