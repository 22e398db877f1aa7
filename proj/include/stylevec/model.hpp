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

// Split CBOW parameters and the negative-sampling objective.
//
// Every input row v_w and output row v~_w is the concatenation of a style
// half x (the first d_style coordinates) and a syntactic/semantic half y (the
// remaining d_synsem). The full objective scores v~_target . mean(v_c); the
// style objective scores only the x halves.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stylevec/common.hpp"
#include "stylevec/vectors.hpp"

namespace stylevec {

enum class Variant { Near, All, Dist, Sep };

inline std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::Near: return "near-ctx";
    case Variant::All: return "all-ctx";
    case Variant::Dist: return "dist-ctx";
    case Variant::Sep: return "sep-ctx";
  }
  return "?";
}

inline Variant parse_variant(std::string_view name) {
  if (name == "near" || name == "near-ctx") return Variant::Near;
  if (name == "all" || name == "all-ctx") return Variant::All;
  if (name == "dist" || name == "dist-ctx") return Variant::Dist;
  if (name == "sep" || name == "sep-ctx") return Variant::Sep;
  throw Error("unknown variant '" + std::string(name) + "'");
}

/// Which coordinates an objective touches: Full is [0, D), StyleHalf is
/// [0, d_style).
enum class Part { Full, StyleHalf };

enum class Table { Input, Output };

/// Step sizes for the style and syntactic/semantic coordinates of a row.
struct PartRates {
  double style = 0.0;
  double synsem = 0.0;

  static PartRates uniform(double lr) { return {lr, lr}; }
};

// Numerically stable logistic helpers.
inline double sigmoid(double s) {
  if (s >= 0.0) return 1.0 / (1.0 + std::exp(-s));
  double e = std::exp(s);
  return e / (1.0 + e);
}

/// log(1 + exp(s)) without overflow.
inline double softplus(double s) {
  if (s > 0.0) return s + std::log1p(std::exp(-s));
  return std::log1p(std::exp(s));
}

/// Loss and exact gradients of one negative-sampling term. Row i of
/// `grad_outputs` belongs to `ids[i]`; ids[0] is the target.
struct NsGradients {
  double loss = 0.0;
  std::vector<double> grad_h;
  std::vector<WordId> ids;
  std::vector<double> grad_outputs;

  std::span<const double> grad_output(std::size_t i) const {
    std::size_t w = grad_h.size();
    return std::span<const double>(grad_outputs).subspan(i * w, w);
  }
};

class SplitEmbeddingModel {
 public:
  SplitEmbeddingModel() = default;

  /// All-zero parameters.
  SplitEmbeddingModel(std::size_t vocab_size, std::size_t d_style, std::size_t d_synsem)
      : vocab_size_(vocab_size), d_style_(d_style), d_synsem_(d_synsem) {
    if (d_style + d_synsem == 0) throw Error("model: dimension must be at least 1");
    input_.assign(vocab_size * dim(), 0.0);
    output_.assign(vocab_size * dim(), 0.0);
  }

  /// Inputs uniform in [-0.5/D, 0.5/D], outputs zero.
  static SplitEmbeddingModel init(std::size_t vocab_size, std::size_t d_style,
                                  std::size_t d_synsem, std::uint64_t seed) {
    SplitEmbeddingModel m(vocab_size, d_style, d_synsem);
    Rng rng(seed);
    double d = static_cast<double>(m.dim());
    for (double& v : m.input_) v = (uniform01(rng) - 0.5) / d;
    return m;
  }

  std::size_t vocab_size() const { return vocab_size_; }
  std::size_t dim() const { return d_style_ + d_synsem_; }
  std::size_t d_style() const { return d_style_; }
  std::size_t d_synsem() const { return d_synsem_; }
  std::size_t width(Part part) const { return part == Part::Full ? dim() : d_style_; }

  std::span<double> row(Table table, WordId id) {
    auto& t = table == Table::Input ? input_ : output_;
    return std::span<double>(t).subspan(checked_row(id) * dim(), dim());
  }
  std::span<const double> row(Table table, WordId id) const {
    const auto& t = table == Table::Input ? input_ : output_;
    return std::span<const double>(t).subspan(checked_row(id) * dim(), dim());
  }
  std::span<double> input_row(WordId id) { return row(Table::Input, id); }
  std::span<const double> input_row(WordId id) const { return row(Table::Input, id); }
  std::span<double> output_row(WordId id) { return row(Table::Output, id); }
  std::span<const double> output_row(WordId id) const { return row(Table::Output, id); }

  std::span<const double> input_values() const { return input_; }
  std::span<const double> output_values() const { return output_; }
  std::span<double> input_values() { return input_; }
  std::span<double> output_values() { return output_; }

  /// View of the input vectors restricted to `part`.
  EmbeddingView input_view(const WordIndex& words, Part part) const {
    return EmbeddingView(words, input_, dim(), 0, width(part));
  }

  /// View of the syntactic/semantic halves of the input vectors.
  EmbeddingView synsem_view(const WordIndex& words) const {
    if (d_synsem_ == 0) throw Error("model has no syntactic/semantic half");
    return EmbeddingView(words, input_, dim(), d_style_, d_synsem_);
  }

  /// Mean of the selected slice of the input rows, counting repeats.
  void context_mean(std::span<const WordId> ids, Part part, std::span<double> out) const {
    if (ids.empty()) throw Error("no context");
    std::size_t w = width(part);
    if (out.size() != w) throw Error("context_mean: output width mismatch");
    std::fill(out.begin(), out.end(), 0.0);
    for (WordId id : ids) {
      const double* r = input_.data() + checked_row(id) * dim();
      for (std::size_t j = 0; j < w; ++j) out[j] += r[j];
    }
    double inv = 1.0 / static_cast<double>(ids.size());
    for (double& v : out) v *= inv;
  }

  std::vector<double> context_mean(std::span<const WordId> ids, Part part) const {
    std::vector<double> out(width(part));
    context_mean(ids, part, out);
    return out;
  }

  /// loss = -log s(u_t . h) - sum_n log s(-u_n . h), u the part-selected
  /// slice of the output rows. Gradients are exact for this loss.
  void ns_loss_and_grads(WordId target, std::span<const double> h,
                         std::span<const WordId> negatives, Part part, NsGradients& out) const {
    std::size_t w = width(part);
    if (h.size() != w) throw Error("ns_loss: context width mismatch");
    out.loss = 0.0;
    out.grad_h.assign(w, 0.0);
    out.ids.clear();
    out.ids.push_back(target);
    out.ids.insert(out.ids.end(), negatives.begin(), negatives.end());
    out.grad_outputs.resize(out.ids.size() * w);

    for (std::size_t i = 0; i < out.ids.size(); ++i) {
      const double* u = output_.data() + checked_row(out.ids[i]) * dim();
      double score = 0.0;
      for (std::size_t j = 0; j < w; ++j) score += u[j] * h[j];
      if (!std::isfinite(score)) throw Error("numeric overflow");
      // d loss / d score: sigma(s) - 1 for the target, sigma(s) for noise.
      double g;
      if (i == 0) {
        out.loss += softplus(-score);
        g = sigmoid(score) - 1.0;
      } else {
        out.loss += softplus(score);
        g = sigmoid(score);
      }
      double* gu = out.grad_outputs.data() + i * w;
      for (std::size_t j = 0; j < w; ++j) {
        out.grad_h[j] += g * u[j];
        gu[j] = g * h[j];
      }
    }
    if (!std::isfinite(out.loss)) throw Error("numeric overflow");
  }

  NsGradients ns_loss_and_grads(WordId target, std::span<const double> h,
                                std::span<const WordId> negatives, Part part) const {
    NsGradients out;
    ns_loss_and_grads(target, h, negatives, part, out);
    return out;
  }

  /// row(ids[i]) -= rate * grads[i] on the selected coordinates; everything
  /// outside the part is left untouched.
  void apply_update(Table table, std::span<const WordId> ids, std::span<const double> grads,
                    PartRates rates, Part part) {
    std::size_t w = width(part);
    if (grads.size() != ids.size() * w) throw Error("apply_update: gradient size mismatch");
    for (std::size_t i = 0; i < ids.size(); ++i) {
      step_row(table, ids[i], grads.subspan(i * w, w), rates, part);
    }
  }

  void apply_update(Table table, std::span<const WordId> ids, std::span<const double> grads,
                    double learning_rate, Part part) {
    apply_update(table, ids, grads, PartRates::uniform(learning_rate), part);
  }

  /// Same gradient applied once per listed id (repeats step repeatedly).
  void apply_update_each(Table table, std::span<const WordId> ids, std::span<const double> grad,
                         PartRates rates, Part part) {
    if (grad.size() != width(part)) throw Error("apply_update: gradient size mismatch");
    for (WordId id : ids) step_row(table, id, grad, rates, part);
  }

  bool all_finite() const {
    auto finite = [](double v) { return std::isfinite(v); };
    return std::all_of(input_.begin(), input_.end(), finite) &&
           std::all_of(output_.begin(), output_.end(), finite);
  }

  /// Bit-level equality of every parameter.
  bool bitwise_equal(const SplitEmbeddingModel& other) const {
    return vocab_size_ == other.vocab_size_ && d_style_ == other.d_style_ &&
           d_synsem_ == other.d_synsem_ && input_.size() == other.input_.size() &&
           std::memcmp(input_.data(), other.input_.data(), input_.size() * sizeof(double)) == 0 &&
           std::memcmp(output_.data(), other.output_.data(), output_.size() * sizeof(double)) == 0;
  }

 private:
  std::size_t checked_row(WordId id) const {
    if (id >= vocab_size_) throw Error("word id out of range");
    return id;
  }

  void step_row(Table table, WordId id, std::span<const double> grad, PartRates rates, Part part) {
    double* r = (table == Table::Input ? input_ : output_).data() + checked_row(id) * dim();
    for (std::size_t j = 0; j < d_style_; ++j) r[j] -= rates.style * grad[j];
    if (part == Part::Full) {
      for (std::size_t j = d_style_; j < dim(); ++j) r[j] -= rates.synsem * grad[j];
    }
  }

  std::size_t vocab_size_ = 0;
  std::size_t d_style_ = 0;
  std::size_t d_synsem_ = 0;
  std::vector<double> input_;
  std::vector<double> output_;
};

}  // namespace stylevec
