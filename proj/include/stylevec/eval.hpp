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

// Word-vector evaluations: Spearman correlation against graded word pairs,
// POS agreement of nearest neighbors (SyntaxAcc@N), and neighbor listings.

#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "stylevec/common.hpp"
#include "stylevec/vectors.hpp"

namespace stylevec {

inline double dot(std::span<const double> u, std::span<const double> v) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
  return s;
}

inline double norm(std::span<const double> u) { return std::sqrt(dot(u, u)); }

inline double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw Error("cosine: dimension mismatch");
  double nu = norm(u);
  double nv = norm(v);
  if (nu == 0.0 || nv == 0.0) throw Error("cosine: zero vector");
  return std::clamp(dot(u, v) / (nu * nv), -1.0, 1.0);
}

/// 1-based ranks; tied values share the mean of the ranks they span.
inline std::vector<double> average_ranks(std::span<const double> xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(xs.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
    double mean_rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mean_rank;
    i = j + 1;
  }
  return ranks;
}

inline double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw Error("correlation: length mismatch");
  if (xs.size() < 2) throw Error("correlation: need at least 2 values");
  double n = static_cast<double>(xs.size());
  double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double dx = xs[i] - mx;
    double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw Error("undefined correlation");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

/// Spearman's rho: Pearson correlation of average ranks.
inline double spearman(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw Error("spearman: length mismatch");
  if (xs.size() < 2) throw Error("spearman: need at least 2 values");
  std::vector<double> rx = average_ranks(xs);
  std::vector<double> ry = average_ranks(ys);
  return pearson(rx, ry);
}

// ---------------------------------------------------------------------------
// Datasets

struct SimilarityPair {
  std::string word1;
  std::string word2;
  double gold = 0.0;
};

/// `word1<TAB>word2<TAB>score` lines; '#' starts a comment line.
class SimilarityDataset {
 public:
  SimilarityDataset() = default;

  explicit SimilarityDataset(std::vector<SimilarityPair> pairs) {
    for (auto& p : pairs) add(std::move(p));
  }

  void add(SimilarityPair pair) {
    if (!std::isfinite(pair.gold)) throw Error("similarity dataset: non-finite score");
    auto key = pair.word1 < pair.word2 ? std::make_pair(pair.word1, pair.word2)
                                       : std::make_pair(pair.word2, pair.word1);
    if (!seen_.insert(key).second) {
      throw Error("similarity dataset: duplicate pair " + pair.word1 + " / " + pair.word2);
    }
    pairs_.push_back(std::move(pair));
  }

  static SimilarityDataset parse(std::istream& in, const std::string& source = "<stream>") {
    SimilarityDataset ds;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      std::string_view view = trim(line);
      if (view.empty() || view.front() == '#') continue;
      auto fields = split_on(view, '\t');
      auto where = source + ":" + std::to_string(lineno);
      if (fields.size() != 3) throw Error(where + ": expected word1<TAB>word2<TAB>score");
      auto score = parse_double(trim(fields[2]));
      if (!score) throw Error(where + ": non-numeric score");
      ds.add({std::string(trim(fields[0])), std::string(trim(fields[1])), *score});
    }
    return ds;
  }

  static SimilarityDataset load(const std::string& path) {
    auto in = open_input(path);
    return parse(in, path);
  }

  void write(std::ostream& out) const {
    for (const auto& p : pairs_) out << p.word1 << '\t' << p.word2 << '\t' << format_double(p.gold) << '\n';
  }

  const std::vector<SimilarityPair>& pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }

 private:
  std::vector<SimilarityPair> pairs_;
  std::set<std::pair<std::string, std::string>> seen_;
};

/// `word<TAB>tag` lines, one tag per word.
class PosLexicon {
 public:
  void add(const std::string& word, const std::string& tag) {
    auto [it, inserted] = tags_.emplace(word, tag);
    if (!inserted && it->second != tag) throw Error("POS lexicon: conflicting tags for '" + word + "'");
    if (inserted) order_.push_back(word);
  }

  const std::string* find(const std::string& word) const {
    auto it = tags_.find(word);
    return it == tags_.end() ? nullptr : &it->second;
  }

  std::size_t size() const { return order_.size(); }
  const std::vector<std::string>& words() const { return order_; }

  static PosLexicon parse(std::istream& in, const std::string& source = "<stream>") {
    PosLexicon lex;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      std::string_view view = trim(line);
      if (view.empty() || view.front() == '#') continue;
      auto fields = split_on(view, '\t');
      if (fields.size() != 2 || trim(fields[0]).empty() || trim(fields[1]).empty()) {
        throw Error(source + ":" + std::to_string(lineno) + ": expected word<TAB>tag");
      }
      lex.add(std::string(trim(fields[0])), std::string(trim(fields[1])));
    }
    return lex;
  }

  static PosLexicon load(const std::string& path) {
    auto in = open_input(path);
    return parse(in, path);
  }

  void write(std::ostream& out) const {
    for (const auto& w : order_) out << w << '\t' << tags_.at(w) << '\n';
  }

 private:
  std::unordered_map<std::string, std::string> tags_;
  std::vector<std::string> order_;
};

// ---------------------------------------------------------------------------
// Reports

struct EvalReport {
  std::string metric;
  double value = 0.0;
  double coverage = 0.0;
  std::size_t n_items = 0;
  std::size_t n_used = 0;
};

/// Single-line machine-readable record.
inline std::string format_record(const EvalReport& r) {
  std::ostringstream out;
  out << "RESULT\tmetric=" << r.metric << "\tvalue=" << format_double(r.value)
      << "\tcoverage=" << format_double(r.coverage) << "\tn_items=" << r.n_items
      << "\tn_used=" << r.n_used;
  return out.str();
}

// ---------------------------------------------------------------------------
// Evaluations

/// Spearman rho x100 between cosine similarity and gold scores, over pairs
/// whose words are both in the vocabulary.
inline EvalReport similarity_correlation(const EmbeddingView& vectors, const SimilarityDataset& dataset,
                                         std::string metric = "rho") {
  std::vector<double> predicted;
  std::vector<double> gold;
  for (const auto& p : dataset.pairs()) {
    auto a = vectors.find(p.word1);
    auto b = vectors.find(p.word2);
    if (!a || !b) continue;
    predicted.push_back(cosine(vectors.row(*a), vectors.row(*b)));
    gold.push_back(p.gold);
  }
  EvalReport r;
  r.metric = std::move(metric);
  r.n_items = dataset.size();
  r.n_used = predicted.size();
  r.coverage = dataset.size() == 0 ? 0.0 : static_cast<double>(predicted.size()) / static_cast<double>(dataset.size());
  if (predicted.size() < 2) {
    throw Error("similarity: fewer than 2 usable pairs (coverage " + format_double(r.coverage) + ")");
  }
  r.value = 100.0 * spearman(predicted, gold);
  return r;
}

struct Neighbor {
  WordId id = 0;
  std::string word;
  double score = 0.0;
};

namespace detail {

inline std::vector<double> row_norms(const EmbeddingView& vectors) {
  std::vector<double> norms(vectors.size());
  for (WordId i = 0; i < vectors.size(); ++i) norms[i] = norm(vectors.row(i));
  return norms;
}

/// Top-n candidates by cosine to `query`, excluding the query itself;
/// descending score, ties by ascending id.
inline std::vector<std::pair<double, WordId>> top_by_cosine(const EmbeddingView& vectors,
                                                            const std::vector<double>& norms,
                                                            WordId query,
                                                            std::span<const WordId> candidates,
                                                            std::size_t n) {
  if (norms[query] == 0.0) throw Error("cosine: zero vector for '" + vectors.word(query) + "'");
  auto q = vectors.row(query);
  std::vector<std::pair<double, WordId>> scored;
  scored.reserve(candidates.size());
  for (WordId c : candidates) {
    if (c == query) continue;
    if (norms[c] == 0.0) throw Error("cosine: zero vector for '" + vectors.word(c) + "'");
    double s = std::clamp(dot(q, vectors.row(c)) / (norms[query] * norms[c]), -1.0, 1.0);
    scored.emplace_back(s, c);
  }
  auto better = [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  };
  n = std::min(n, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n), scored.end(), better);
  scored.resize(n);
  return scored;
}

}  // namespace detail

/// The n words closest to `word` by cosine.
inline std::vector<Neighbor> neighbors(const EmbeddingView& vectors, const std::string& word, std::size_t n) {
  auto query = vectors.find(word);
  if (!query) throw Error("out-of-vocabulary word '" + word + "'");
  if (n == 0) return {};
  std::vector<WordId> all(vectors.size());
  std::iota(all.begin(), all.end(), WordId{0});
  std::vector<double> norms = detail::row_norms(vectors);
  std::vector<Neighbor> out;
  for (auto [score, id] : detail::top_by_cosine(vectors, norms, *query, all, n)) {
    out.push_back({id, vectors.word(id), score});
  }
  return out;
}

/// Mean fraction of each word's n nearest neighbors that share its POS tag.
/// Only in-vocabulary words with a tag take part, as queries and as
/// neighbors.
inline EvalReport syntax_acc(const EmbeddingView& vectors, const PosLexicon& pos, std::size_t n) {
  if (n < 1) throw Error("syntax_acc: n must be >= 1");
  std::vector<WordId> eval_words;
  std::vector<const std::string*> tags(vectors.size(), nullptr);
  for (WordId id = 0; id < vectors.size(); ++id) {
    if (const std::string* tag = pos.find(vectors.word(id))) {
      eval_words.push_back(id);
      tags[id] = tag;
    }
  }
  if (eval_words.size() < n + 1) {
    throw Error("syntax_acc: n=" + std::to_string(n) + " exceeds evaluation vocabulary size - 1 (" +
                std::to_string(eval_words.empty() ? 0 : eval_words.size() - 1) + ")");
  }
  std::vector<double> norms = detail::row_norms(vectors);
  std::uint64_t hits = 0;
  for (WordId w : eval_words) {
    for (auto [score, id] : detail::top_by_cosine(vectors, norms, w, eval_words, n)) {
      if (*tags[id] == *tags[w]) ++hits;
    }
  }
  EvalReport r;
  r.metric = "syntax_acc@" + std::to_string(n);
  r.n_items = pos.size();
  r.n_used = eval_words.size();
  r.coverage = pos.size() == 0 ? 0.0 : static_cast<double>(eval_words.size()) / static_cast<double>(pos.size());
  r.value = static_cast<double>(hits) / (static_cast<double>(eval_words.size()) * static_cast<double>(n));
  return r;
}

}  // namespace stylevec
