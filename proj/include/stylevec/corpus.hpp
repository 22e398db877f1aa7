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

// Corpus ingestion: multi-word expression merging, vocabulary construction,
// and subsampled utterance streams. Input is pre-tokenized, one utterance per
// line.

#pragma once

#include <algorithm>
#include <cmath>
#include <iosfwd>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "stylevec/common.hpp"

namespace stylevec {

// ---------------------------------------------------------------------------
// Multi-word expressions

class MweLexicon {
 public:
  MweLexicon() = default;

  void add(TokenList expression) {
    if (expression.size() < 2) {
      throw Error("multi-word expression needs at least 2 tokens");
    }
    auto& bucket = by_head_[expression.front()];
    if (std::find(bucket.begin(), bucket.end(), expression) != bucket.end()) return;
    bucket.push_back(std::move(expression));
    std::stable_sort(bucket.begin(), bucket.end(),
                     [](const TokenList& a, const TokenList& b) { return a.size() > b.size(); });
    ++size_;
  }

  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

  /// Length of the longest expression matching tokens[pos..], or 0.
  std::size_t longest_match(std::span<const std::string> tokens, std::size_t pos) const {
    auto it = by_head_.find(tokens[pos]);
    if (it == by_head_.end()) return 0;
    for (const TokenList& expr : it->second) {
      if (pos + expr.size() > tokens.size()) continue;
      if (std::equal(expr.begin(), expr.end(), tokens.begin() + static_cast<std::ptrdiff_t>(pos))) {
        return expr.size();
      }
    }
    return 0;
  }

 private:
  // Expressions bucketed by first token, longest first.
  std::unordered_map<std::string, std::vector<TokenList>> by_head_;
  std::size_t size_ = 0;
};

inline MweLexicon parse_mwe_lexicon(std::istream& in) {
  MweLexicon lexicon;
  std::string line;
  while (std::getline(in, line)) {
    TokenList tokens = split_tokens(line);
    if (tokens.empty()) continue;
    lexicon.add(std::move(tokens));
  }
  return lexicon;
}

inline MweLexicon read_mwe_lexicon(const std::string& path) {
  auto in = open_input(path);
  return parse_mwe_lexicon(in);
}

/// Greedy longest-match merge, left to right. Each matched span becomes a
/// single token joined with '_'.
inline TokenList merge_mwe(std::span<const std::string> tokens, const MweLexicon& lexicon) {
  TokenList out;
  out.reserve(tokens.size());
  std::size_t i = 0;
  while (i < tokens.size()) {
    std::size_t len = lexicon.empty() ? 0 : lexicon.longest_match(tokens, i);
    if (len == 0) {
      out.push_back(tokens[i]);
      ++i;
      continue;
    }
    std::string joined = tokens[i];
    for (std::size_t j = i + 1; j < i + len; ++j) {
      joined += '_';
      joined += tokens[j];
    }
    out.push_back(std::move(joined));
    i += len;
  }
  return out;
}

/// Reads a corpus file into token lists, one per line (empty lines kept so
/// that line numbering stays aligned with the source).
inline std::vector<TokenList> read_corpus_lines(const std::string& path,
                                                const MweLexicon* lexicon = nullptr) {
  auto in = open_input(path);
  std::vector<TokenList> lines;
  std::string line;
  while (std::getline(in, line)) {
    TokenList tokens = split_tokens(line);
    if (lexicon != nullptr && !lexicon->empty() && !tokens.empty()) {
      tokens = merge_mwe(tokens, *lexicon);
    }
    lines.push_back(std::move(tokens));
  }
  return lines;
}

// ---------------------------------------------------------------------------
// Vocabulary

inline constexpr double kNoisePower = 0.75;
inline constexpr std::size_t kDefaultNoiseTableSize = 10'000'000;

class Vocabulary {
 public:
  Vocabulary(std::vector<std::string> words, std::vector<std::uint64_t> counts,
             std::size_t noise_table_size = kDefaultNoiseTableSize)
      : index_(std::move(words)), counts_(std::move(counts)) {
    if (index_.empty()) throw Error("empty vocabulary");
    if (counts_.size() != index_.size()) throw Error("vocabulary: word/count size mismatch");
    if (noise_table_size == 0) throw Error("vocabulary: noise table size must be positive");
    for (std::uint64_t c : counts_) {
      if (c == 0) throw Error("vocabulary: zero count");
      total_tokens_ += c;
    }
    build_noise_table(noise_table_size);
  }

  std::size_t size() const { return index_.size(); }
  const WordIndex& index() const { return index_; }
  const std::string& word(WordId id) const { return index_.word(id); }
  std::optional<WordId> find(const std::string& word) const { return index_.find(word); }
  std::uint64_t count(WordId id) const { return counts_.at(id); }
  const std::vector<std::uint64_t>& counts() const { return counts_; }
  std::uint64_t total_tokens() const { return total_tokens_; }

  std::span<const WordId> noise_table() const { return noise_table_; }

  WordId sample_noise(Rng& rng) const {
    return noise_table_[uniform_index(rng, noise_table_.size())];
  }

  /// Exact smoothed-unigram probability the table approximates.
  double noise_probability(WordId id) const {
    return std::pow(static_cast<double>(counts_.at(id)), kNoisePower) / noise_norm_;
  }

 private:
  void build_noise_table(std::size_t table_size) {
    noise_norm_ = 0.0;
    for (std::uint64_t c : counts_) noise_norm_ += std::pow(static_cast<double>(c), kNoisePower);
    noise_table_.resize(table_size);
    // Slot j holds the word whose cumulative-probability interval contains
    // the slot midpoint.
    std::size_t word = 0;
    double cumulative = std::pow(static_cast<double>(counts_[0]), kNoisePower) / noise_norm_;
    for (std::size_t j = 0; j < table_size; ++j) {
      double mid = (static_cast<double>(j) + 0.5) / static_cast<double>(table_size);
      while (mid > cumulative && word + 1 < counts_.size()) {
        ++word;
        cumulative += std::pow(static_cast<double>(counts_[word]), kNoisePower) / noise_norm_;
      }
      noise_table_[j] = static_cast<WordId>(word);
    }
  }

  WordIndex index_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_tokens_ = 0;
  double noise_norm_ = 0.0;
  std::vector<WordId> noise_table_;
};

/// Ids by descending count, ties broken lexicographically.
inline Vocabulary build_vocab(std::span<const TokenList> lines, std::uint64_t min_count,
                              std::size_t noise_table_size = kDefaultNoiseTableSize) {
  if (lines.empty()) throw Error("no input lines");
  if (min_count == 0) throw Error("min_count must be positive");
  std::unordered_map<std::string, std::uint64_t> counts;
  for (const TokenList& line : lines) {
    for (const std::string& token : line) ++counts[token];
  }
  std::vector<std::pair<std::string, std::uint64_t>> kept;
  for (auto& [word, count] : counts) {
    if (count >= min_count) kept.emplace_back(word, count);
  }
  if (kept.empty()) throw Error("empty vocabulary");
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::vector<std::string> words;
  std::vector<std::uint64_t> word_counts;
  words.reserve(kept.size());
  word_counts.reserve(kept.size());
  for (auto& [word, count] : kept) {
    words.push_back(std::move(word));
    word_counts.push_back(count);
  }
  return Vocabulary(std::move(words), std::move(word_counts), noise_table_size);
}

/// `word<TAB>count`, descending count.
inline void write_vocab_tsv(const Vocabulary& vocab, std::ostream& out) {
  for (WordId id = 0; id < vocab.size(); ++id) {
    out << vocab.word(id) << '\t' << vocab.count(id) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Encoded corpus

class UtteranceCorpus {
 public:
  UtteranceCorpus() = default;

  /// Takes already-encoded utterances; empty ones are dropped.
  UtteranceCorpus(std::vector<std::vector<WordId>> utterances, std::size_t vocab_size) {
    utterances_.reserve(utterances.size());
    for (auto& u : utterances) {
      if (u.empty()) continue;
      for (WordId id : u) {
        if (id >= vocab_size) throw Error("word id out of range");
      }
      token_count_ += u.size();
      max_length_ = std::max(max_length_, u.size());
      utterances_.push_back(std::move(u));
    }
  }

  /// Maps tokens to ids, dropping out-of-vocabulary tokens and then any
  /// utterance left empty.
  static UtteranceCorpus encode(std::span<const TokenList> lines, const Vocabulary& vocab) {
    std::vector<std::vector<WordId>> encoded;
    encoded.reserve(lines.size());
    for (const TokenList& line : lines) {
      std::vector<WordId> ids;
      ids.reserve(line.size());
      for (const std::string& token : line) {
        if (auto id = vocab.find(token)) ids.push_back(*id);
      }
      encoded.push_back(std::move(ids));
    }
    return UtteranceCorpus(std::move(encoded), vocab.size());
  }

  std::size_t size() const { return utterances_.size(); }
  bool empty() const { return utterances_.empty(); }
  const std::vector<WordId>& operator[](std::size_t i) const { return utterances_[i]; }
  auto begin() const { return utterances_.begin(); }
  auto end() const { return utterances_.end(); }
  std::uint64_t token_count() const { return token_count_; }
  std::size_t max_length() const { return max_length_; }

 private:
  std::vector<std::vector<WordId>> utterances_;
  std::uint64_t token_count_ = 0;
  std::size_t max_length_ = 0;
};

// ---------------------------------------------------------------------------
// Subsampling

/// Keep probability for a word of relative frequency f = count/total:
/// (sqrt(f/t) + 1) * t/f, clamped to [0, 1].
inline double subsample_keep_prob(std::uint64_t count, std::uint64_t total, double t) {
  if (count == 0 || total == 0 || count > total) throw Error("subsample: need 0 < count <= total");
  if (!(t > 0.0)) throw Error("subsample: threshold must be positive");
  double f = static_cast<double>(count) / static_cast<double>(total);
  double p = (std::sqrt(f / t) + 1.0) * (t / f);
  return std::clamp(p, 0.0, 1.0);
}

/// Per-word keep probabilities; t <= 0 disables subsampling.
inline std::vector<double> keep_probabilities(const Vocabulary& vocab, double t) {
  std::vector<double> keep(vocab.size(), 1.0);
  if (t <= 0.0) return keep;
  for (WordId id = 0; id < vocab.size(); ++id) {
    keep[id] = subsample_keep_prob(vocab.count(id), vocab.total_tokens(), t);
  }
  return keep;
}

/// Expected number of tokens one pass of the stream yields.
inline double expected_stream_tokens(const UtteranceCorpus& corpus, const Vocabulary& vocab, double t) {
  std::vector<double> keep = keep_probabilities(vocab, t);
  double total = 0.0;
  for (const auto& u : corpus) {
    for (WordId id : u) total += keep[id];
  }
  return total;
}

/// Iterates a range of utterances, dropping each token independently with
/// probability 1 - keep_prob. Positions re-index after dropping; utterances
/// that become empty are skipped.
class UtteranceStream {
 public:
  UtteranceStream(const UtteranceCorpus& corpus, const Vocabulary& vocab, double t,
                  std::uint64_t seed, std::size_t begin = 0,
                  std::size_t end = std::numeric_limits<std::size_t>::max())
      : corpus_(&corpus),
        keep_(keep_probabilities(vocab, t)),
        rng_(seed),
        next_(std::min(begin, corpus.size())),
        end_(std::min(end, corpus.size())) {}

  bool next(std::vector<WordId>& out) {
    while (next_ < end_) {
      const auto& source = (*corpus_)[next_++];
      out.clear();
      for (WordId id : source) {
        double keep = keep_[id];
        if (keep >= 1.0 || uniform01(rng_) < keep) out.push_back(id);
      }
      if (!out.empty()) return true;
    }
    return false;
  }

 private:
  const UtteranceCorpus* corpus_;
  std::vector<double> keep_;
  Rng rng_;
  std::size_t next_;
  std::size_t end_;
};

}  // namespace stylevec
