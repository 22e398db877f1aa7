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

// word2vec-compatible text vectors:
//
//   <vocab_size> <dimension>
//   word v1 v2 ... vD
//
// Values use the shortest decimal form that round-trips exactly. Every line,
// including the last, ends in '\n'; a file that does not is rejected as
// truncated.

#pragma once

#include <iterator>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "stylevec/common.hpp"
#include "stylevec/corpus.hpp"
#include "stylevec/model.hpp"
#include "stylevec/trainer.hpp"
#include "stylevec/vectors.hpp"

namespace stylevec {

inline void save_vectors(const EmbeddingView& vectors, std::ostream& out) {
  out << vectors.size() << ' ' << vectors.width() << '\n';
  std::string line;
  for (WordId id = 0; id < vectors.size(); ++id) {
    line = vectors.word(id);
    for (double v : vectors.row(id)) {
      if (!std::isfinite(v)) throw Error("save_vectors: non-finite value for '" + vectors.word(id) + "'");
      line += ' ';
      line += format_double(v);
    }
    line += '\n';
    out << line;
  }
  if (!out) throw Error("save_vectors: write failed");
}

inline void save_vectors(const EmbeddingView& vectors, const std::string& path) {
  auto out = open_output(path);
  save_vectors(vectors, out);
  out.close();
  if (!out) throw Error("save_vectors: write to '" + path + "' failed");
}

inline void save_vectors(const SplitEmbeddingModel& model, const Vocabulary& vocab, Part part,
                         const std::string& path) {
  save_vectors(model.input_view(vocab.index(), part), path);
}

struct ExportedFiles {
  std::string full;
  std::string style;   // empty unless the model is split
  std::string synsem;  // empty unless the model is split
};

/// Writes `<prefix>.full`, plus `<prefix>.style` (x halves) and
/// `<prefix>.synsem` (y halves) when the model has both halves and
/// `split` is set.
inline ExportedFiles export_vectors(const SplitEmbeddingModel& model, const WordIndex& words,
                                    const std::string& prefix, bool split = true) {
  ExportedFiles files;
  files.full = prefix + ".full";
  save_vectors(model.input_view(words, Part::Full), files.full);
  if (split && model.d_style() > 0 && model.d_synsem() > 0) {
    files.style = prefix + ".style";
    files.synsem = prefix + ".synsem";
    save_vectors(model.input_view(words, Part::StyleHalf), files.style);
    save_vectors(model.synsem_view(words), files.synsem);
  }
  return files;
}

inline VectorTable parse_vectors(std::string_view text, const std::string& source = "<stream>") {
  auto fail = [&](std::size_t lineno, const std::string& what) -> Error {
    return Error(source + ":" + std::to_string(lineno) + ": " + what);
  };

  std::size_t pos = 0;
  std::size_t lineno = 0;
  auto next_line = [&](std::string_view& line) -> bool {
    if (pos >= text.size()) return false;
    std::size_t nl = text.find('\n', pos);
    ++lineno;
    if (nl == std::string_view::npos) throw fail(lineno, "truncated line (missing newline)");
    line = text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = nl + 1;
    return true;
  };

  std::string_view line;
  if (!next_line(line)) throw Error(source + ": empty file");
  auto header = split_tokens(line);
  if (header.size() != 2) throw fail(lineno, "header must be '<vocab_size> <dimension>'");
  auto n_words = parse_integer<std::size_t>(header[0]);
  auto dim = parse_integer<std::size_t>(header[1]);
  if (!n_words || !dim) throw fail(lineno, "non-numeric header field");
  if (*n_words == 0) throw Error(source + ": empty vocabulary");
  if (*dim == 0) throw fail(lineno, "zero dimension");

  std::vector<std::string> words;
  std::vector<double> values;
  words.reserve(*n_words);
  values.reserve(*n_words * *dim);
  while (next_line(line)) {
    if (trim(line).empty()) continue;
    if (words.size() == *n_words) throw fail(lineno, "header/body mismatch: more rows than declared");
    auto fields = split_tokens(line);
    if (fields.size() != *dim + 1) {
      throw fail(lineno, "header/body mismatch: expected " + std::to_string(*dim) + " values, got " +
                             std::to_string(fields.size() - 1));
    }
    for (std::size_t j = 1; j < fields.size(); ++j) {
      auto v = parse_double(fields[j]);
      if (!v || !std::isfinite(*v)) throw fail(lineno, "non-numeric field '" + fields[j] + "'");
      values.push_back(*v);
    }
    words.push_back(std::move(fields[0]));
  }
  if (words.size() != *n_words) {
    throw Error(source + ": header/body mismatch: declared " + std::to_string(*n_words) + " rows, found " +
                std::to_string(words.size()));
  }
  VectorTable table;
  try {
    table.words = WordIndex(std::move(words));
  } catch (const Error& e) {
    throw Error(source + ": " + e.what());
  }
  table.dimension = *dim;
  table.values = std::move(values);
  return table;
}

inline VectorTable load_vectors(std::istream& in, const std::string& source = "<stream>") {
  std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse_vectors(text, source);
}

inline VectorTable load_vectors(const std::string& path) {
  auto in = open_input(path);
  return load_vectors(in, path);
}

// ---------------------------------------------------------------------------
// Checkpoints: `<prefix>.full` (input vectors), `<prefix>.out` (output
// vectors) and `<prefix>.config` (key=value).

inline KeyValues config_to_key_values(const TrainConfig& c) {
  KeyValues kv;
  kv["variant"] = std::string(to_string(c.variant));
  kv["delta"] = std::to_string(c.delta);
  kv["epochs"] = std::to_string(c.epochs);
  kv["negatives"] = std::to_string(c.negatives);
  kv["alpha"] = format_double(c.alpha);
  kv["sample"] = format_double(c.sample);
  kv["min-count"] = std::to_string(c.min_count);
  kv["d-style"] = std::to_string(c.d_style);
  kv["d-synsem"] = std::to_string(c.d_synsem);
  kv["seed"] = std::to_string(c.seed);
  kv["workers"] = std::to_string(c.workers);
  return kv;
}

/// Applies recognised keys to `config`; unknown keys are an error.
inline void apply_key_values(const KeyValues& kv, TrainConfig& c, const std::string& source = "config") {
  auto as_size = [&](const std::string& key, const std::string& v) {
    auto n = parse_integer<std::uint64_t>(v);
    if (!n) throw Error(source + ": '" + key + "' expects a non-negative integer, got '" + v + "'");
    return *n;
  };
  auto as_real = [&](const std::string& key, const std::string& v) {
    auto x = parse_double(v);
    if (!x) throw Error(source + ": '" + key + "' expects a number, got '" + v + "'");
    return *x;
  };
  for (const auto& [key, value] : kv) {
    if (key == "variant") c.variant = parse_variant(value);
    else if (key == "delta") c.delta = as_size(key, value);
    else if (key == "epochs") c.epochs = as_size(key, value);
    else if (key == "negatives") c.negatives = as_size(key, value);
    else if (key == "alpha") c.alpha = as_real(key, value);
    else if (key == "sample") c.sample = as_real(key, value);
    else if (key == "min-count") c.min_count = as_size(key, value);
    else if (key == "d-style") c.d_style = as_size(key, value);
    else if (key == "d-synsem") c.d_synsem = as_size(key, value);
    else if (key == "seed") c.seed = as_size(key, value);
    else if (key == "workers") c.workers = as_size(key, value);
    else throw Error(source + ": unknown key '" + key + "'");
  }
}

inline void save_checkpoint(const SplitEmbeddingModel& model, const WordIndex& words,
                            const TrainConfig& config, const std::string& prefix) {
  save_vectors(model.input_view(words, Part::Full), prefix + ".full");
  save_vectors(EmbeddingView(words, model.output_values(), model.dim(), 0, model.dim()), prefix + ".out");
  auto out = open_output(prefix + ".config");
  for (const auto& [k, v] : config_to_key_values(config)) out << k << '=' << v << '\n';
  if (!out) throw Error("save_checkpoint: write failed");
}

struct Checkpoint {
  TrainConfig config;
  WordIndex words;
  SplitEmbeddingModel model;
};

inline Checkpoint load_checkpoint(const std::string& prefix) {
  Checkpoint ck;
  apply_key_values(read_key_values(prefix + ".config"), ck.config, prefix + ".config");
  VectorTable input = load_vectors(prefix + ".full");
  VectorTable output = load_vectors(prefix + ".out");
  if (input.words.words() != output.words.words()) throw Error("checkpoint: input/output vocabularies differ");
  if (input.dimension != ck.config.d_style + ck.config.d_synsem || output.dimension != input.dimension) {
    throw Error("checkpoint: dimensions do not match config");
  }
  ck.model = SplitEmbeddingModel(input.words.size(), ck.config.d_style, ck.config.d_synsem);
  std::copy(input.values.begin(), input.values.end(), ck.model.input_values().begin());
  std::copy(output.values.begin(), output.values.end(), ck.model.output_values().begin());
  ck.words = std::move(input.words);
  return ck;
}

}  // namespace stylevec
