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

// Synthetic dialog worlds with known style and syntax structure.
//
// Each utterance has one style and one topic. Its last token is a marker of
// the style, its first token is another marker with probability
// `open_marker_prob`, and the body is a sequence of short phrases:
//
//   DET NOUN | AUX VERB | PART | (rarely) a marker of the same style
//
// A marker is always adjacent to one of its companion particles, a small
// per-marker set drawn independently of style, so markers differ in their
// immediate syntax the way real function words do.
//
// Markers of one utterance are at least `min_marker_gap` positions apart. The
// default of 11 exceeds 2 * delta for delta = 5, so two markers never fall in
// the same nearby window.
//
// Nouns and verbs belong to topics; determiners, auxiliaries and particles
// are shared. So the words right next to a token reveal its POS class, while
// style is visible only across the whole utterance.

#pragma once

#include <filesystem>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "stylevec/common.hpp"
#include "stylevec/corpus.hpp"
#include "stylevec/eval.hpp"

namespace stylevec {

struct StyleWorldConfig {
  std::size_t n_styles = 4;
  std::size_t n_topics = 6;
  std::size_t markers_per_style = 8;
  std::size_t words_per_topic = 20;
  std::size_t function_words = 30;
  std::size_t min_length = 8;
  std::size_t max_length = 16;
  std::size_t n_utterances = 50'000;
  std::uint64_t seed = 1;
  double open_marker_prob = 0.5;
  double body_marker_prob = 0.05;
  std::size_t min_marker_gap = 11;
  std::size_t marker_companions = 2;
  std::string marker_prefix = "sty";
  std::string topic_prefix = "top";
  std::string function_prefix = "fn";

  void validate() const {
    if (n_styles < 1 || n_topics < 1 || markers_per_style < 1 || words_per_topic < 1 ||
        function_words < 1 || n_utterances < 1) {
      throw Error("synth: all counts must be >= 1");
    }
    if (min_length < 1 || min_length > max_length) throw Error("synth: need 1 <= min_length <= max_length");
    if (min_marker_gap < 1) throw Error("synth: min_marker_gap must be >= 1");
    if (!(open_marker_prob >= 0.0 && open_marker_prob <= 1.0) ||
        !(body_marker_prob >= 0.0 && body_marker_prob <= 1.0)) {
      throw Error("synth: probabilities must lie in [0, 1]");
    }
  }

  static StyleWorldConfig from_key_values(const KeyValues& kv, const std::string& source = "synth config") {
    StyleWorldConfig c;
    auto as_size = [&](const std::string& key, const std::string& v) {
      auto n = parse_integer<std::uint64_t>(v);
      if (!n) throw Error(source + ": '" + key + "' expects a non-negative integer, got '" + v + "'");
      return static_cast<std::size_t>(*n);
    };
    auto as_real = [&](const std::string& key, const std::string& v) {
      auto x = parse_double(v);
      if (!x) throw Error(source + ": '" + key + "' expects a number, got '" + v + "'");
      return *x;
    };
    for (const auto& [key, value] : kv) {
      if (key == "n_styles") c.n_styles = as_size(key, value);
      else if (key == "n_topics") c.n_topics = as_size(key, value);
      else if (key == "markers_per_style") c.markers_per_style = as_size(key, value);
      else if (key == "words_per_topic") c.words_per_topic = as_size(key, value);
      else if (key == "function_words") c.function_words = as_size(key, value);
      else if (key == "min_length") c.min_length = as_size(key, value);
      else if (key == "max_length") c.max_length = as_size(key, value);
      else if (key == "n_utterances") c.n_utterances = as_size(key, value);
      else if (key == "seed") c.seed = as_size(key, value);
      else if (key == "open_marker_prob") c.open_marker_prob = as_real(key, value);
      else if (key == "body_marker_prob") c.body_marker_prob = as_real(key, value);
      else if (key == "min_marker_gap") c.min_marker_gap = as_size(key, value);
      else if (key == "marker_companions") c.marker_companions = as_size(key, value);
      else if (key == "marker_prefix") c.marker_prefix = value;
      else if (key == "topic_prefix") c.topic_prefix = value;
      else if (key == "function_prefix") c.function_prefix = value;
      else throw Error(source + ": unknown key '" + key + "'");
    }
    c.validate();
    return c;
  }

  KeyValues to_key_values() const {
    return {{"n_styles", std::to_string(n_styles)},
            {"n_topics", std::to_string(n_topics)},
            {"markers_per_style", std::to_string(markers_per_style)},
            {"words_per_topic", std::to_string(words_per_topic)},
            {"function_words", std::to_string(function_words)},
            {"min_length", std::to_string(min_length)},
            {"max_length", std::to_string(max_length)},
            {"n_utterances", std::to_string(n_utterances)},
            {"seed", std::to_string(seed)},
            {"open_marker_prob", format_double(open_marker_prob)},
            {"body_marker_prob", format_double(body_marker_prob)},
            {"min_marker_gap", std::to_string(min_marker_gap)},
            {"marker_companions", std::to_string(marker_companions)},
            {"marker_prefix", marker_prefix},
            {"topic_prefix", topic_prefix},
            {"function_prefix", function_prefix}};
  }
};

namespace pos_tags {
inline const std::string kMarker = "MARK";
inline const std::string kNoun = "NOUN";
inline const std::string kVerb = "VERB";
inline const std::string kDeterminer = "DET";
inline const std::string kAuxiliary = "AUX";
inline const std::string kParticle = "PART";
}  // namespace pos_tags

struct SyntheticWorld {
  StyleWorldConfig config;
  std::vector<TokenList> utterances;
  std::vector<std::size_t> utterance_style;
  std::vector<std::size_t> utterance_topic;

  std::vector<std::vector<std::string>> markers;  // [style][i]
  std::vector<std::vector<std::vector<std::string>>> companions;  // [style][i]
  std::vector<std::vector<std::string>> nouns;    // [topic][i]
  std::vector<std::vector<std::string>> verbs;    // [topic][i]
  std::vector<std::string> determiners;
  std::vector<std::string> auxiliaries;
  std::vector<std::string> particles;

  SimilarityDataset style_pairs;
  PosLexicon pos;

  /// key=value lines describing the world and its class memberships.
  KeyValues manifest() const {
    KeyValues kv = config.to_key_values();
    auto join = [](const std::vector<std::string>& ws) {
      std::string s;
      for (const auto& w : ws) {
        if (!s.empty()) s += ',';
        s += w;
      }
      return s;
    };
    for (std::size_t s = 0; s < markers.size(); ++s) {
      kv["style." + std::to_string(s) + ".markers"] = join(markers[s]);
      for (std::size_t i = 0; i < companions[s].size(); ++i) {
        if (!companions[s][i].empty()) kv["companions." + markers[s][i]] = join(companions[s][i]);
      }
    }
    for (std::size_t t = 0; t < nouns.size(); ++t) {
      kv["topic." + std::to_string(t) + ".nouns"] = join(nouns[t]);
      kv["topic." + std::to_string(t) + ".verbs"] = join(verbs[t]);
    }
    kv["function.determiners"] = join(determiners);
    kv["function.auxiliaries"] = join(auxiliaries);
    kv["function.particles"] = join(particles);
    std::size_t tokens = 0;
    for (const auto& u : utterances) tokens += u.size();
    kv["corpus.utterances"] = std::to_string(utterances.size());
    kv["corpus.tokens"] = std::to_string(tokens);
    kv["gold.pairs"] = std::to_string(style_pairs.size());
    return kv;
  }
};

inline SyntheticWorld generate(const StyleWorldConfig& config) {
  config.validate();
  SyntheticWorld world;
  world.config = config;

  world.markers.resize(config.n_styles);
  for (std::size_t s = 0; s < config.n_styles; ++s) {
    for (std::size_t i = 0; i < config.markers_per_style; ++i) {
      world.markers[s].push_back(config.marker_prefix + std::to_string(s) + "_" + std::to_string(i));
    }
  }
  // Topic words alternate noun, verb.
  world.nouns.resize(config.n_topics);
  world.verbs.resize(config.n_topics);
  for (std::size_t t = 0; t < config.n_topics; ++t) {
    for (std::size_t i = 0; i < config.words_per_topic; ++i) {
      std::string w = config.topic_prefix + std::to_string(t) + "_" + std::to_string(i);
      (i % 2 == 0 ? world.nouns[t] : world.verbs[t]).push_back(std::move(w));
    }
  }
  // Function words cycle determiner, auxiliary, particle.
  for (std::size_t i = 0; i < config.function_words; ++i) {
    std::string w = config.function_prefix + std::to_string(i);
    switch (i % 3) {
      case 0: world.determiners.push_back(std::move(w)); break;
      case 1: world.auxiliaries.push_back(std::move(w)); break;
      default: world.particles.push_back(std::move(w)); break;
    }
  }

  std::set<std::string> seen;
  auto tag_all = [&](const std::vector<std::string>& ws, const std::string& tag) {
    for (const auto& w : ws) {
      if (!seen.insert(w).second) throw Error("synth: vocabulary collision on '" + w + "'");
      world.pos.add(w, tag);
    }
  };
  for (const auto& ms : world.markers) tag_all(ms, pos_tags::kMarker);
  for (std::size_t t = 0; t < config.n_topics; ++t) {
    tag_all(world.nouns[t], pos_tags::kNoun);
    tag_all(world.verbs[t], pos_tags::kVerb);
  }
  tag_all(world.determiners, pos_tags::kDeterminer);
  tag_all(world.auxiliaries, pos_tags::kAuxiliary);
  tag_all(world.particles, pos_tags::kParticle);

  // Gold: every unordered marker pair, +2 within a style, -2 across.
  std::vector<std::pair<std::string, std::size_t>> all_markers;
  for (std::size_t s = 0; s < config.n_styles; ++s) {
    for (const auto& m : world.markers[s]) all_markers.emplace_back(m, s);
  }
  for (std::size_t i = 0; i < all_markers.size(); ++i) {
    for (std::size_t j = i + 1; j < all_markers.size(); ++j) {
      double gold = all_markers[i].second == all_markers[j].second ? 2.0 : -2.0;
      world.style_pairs.add({all_markers[i].first, all_markers[j].first, gold});
    }
  }

  Rng rng(config.seed);

  // Each marker gets its own small set of particles that always sit right
  // next to it, independent of its style.
  bool use_companions = config.marker_companions > 0 && !world.particles.empty();
  world.companions.assign(config.n_styles, std::vector<std::vector<std::string>>(config.markers_per_style));
  if (use_companions) {
    std::size_t k = std::min(config.marker_companions, world.particles.size());
    for (std::size_t s = 0; s < config.n_styles; ++s) {
      for (std::size_t i = 0; i < config.markers_per_style; ++i) {
        std::vector<std::string> pool = world.particles;
        for (std::size_t j = 0; j < k; ++j) {
          std::size_t r = j + uniform_index(rng, pool.size() - j);
          std::swap(pool[j], pool[r]);
          world.companions[s][i].push_back(pool[j]);
        }
      }
    }
  }

  auto pick = [&](const std::vector<std::string>& ws) -> const std::string& {
    return ws[uniform_index(rng, ws.size())];
  };
  // Classes that can be empty for tiny configs fall back to whatever exists.
  auto pick_function = [&](const std::vector<std::string>& preferred) -> const std::string& {
    if (!preferred.empty()) return pick(preferred);
    return pick(world.determiners);
  };
  auto pick_topic = [&](const std::vector<std::string>& preferred,
                        const std::vector<std::string>& fallback) -> const std::string& {
    return preferred.empty() ? pick(fallback) : pick(preferred);
  };

  world.utterances.reserve(config.n_utterances);
  for (std::size_t n = 0; n < config.n_utterances; ++n) {
    std::size_t style = uniform_index(rng, config.n_styles);
    std::size_t topic = uniform_index(rng, config.n_topics);
    std::size_t len = config.min_length + uniform_index(rng, config.max_length - config.min_length + 1);
    const auto& ms = world.markers[style];

    // The closing marker sits at len - 1. Other markers go only where they
    // stay at least min_marker_gap positions away from every marker already
    // placed, so two markers never share a nearby window.
    std::vector<std::size_t> marker_positions{len - 1};
    auto marker_fits = [&](std::size_t p) {
      for (std::size_t q : marker_positions) {
        std::size_t d = p > q ? p - q : q - p;
        if (d < config.min_marker_gap) return false;
      }
      return true;
    };
    std::size_t closing = uniform_index(rng, ms.size());
    bool closing_companion = use_companions && len > 2;
    std::size_t body_end = len - 1 - (closing_companion ? 1 : 0);

    TokenList u;
    u.reserve(len);
    auto push_marker = [&](std::size_t i) {
      marker_positions.push_back(u.size());
      u.push_back(ms[i]);
      if (use_companions && u.size() < body_end) u.push_back(pick(world.companions[style][i]));
    };
    if (len > 1 && marker_fits(0) && uniform01(rng) < config.open_marker_prob) {
      push_marker(uniform_index(rng, ms.size()));
    }
    while (u.size() < body_end) {
      if (config.body_marker_prob > 0.0 && marker_fits(u.size()) &&
          uniform01(rng) < config.body_marker_prob) {
        push_marker(uniform_index(rng, ms.size()));
        continue;
      }
      double r = uniform01(rng);
      if (r < 0.4) {
        u.push_back(pick_function(world.determiners));
        if (u.size() < body_end) u.push_back(pick_topic(world.nouns[topic], world.verbs[topic]));
      } else if (r < 0.8) {
        u.push_back(pick_function(world.auxiliaries));
        if (u.size() < body_end) u.push_back(pick_topic(world.verbs[topic], world.nouns[topic]));
      } else {
        u.push_back(pick_function(world.particles));
      }
    }
    if (closing_companion) u.push_back(pick(world.companions[style][closing]));
    u.push_back(ms[closing]);
    world.utterances.push_back(std::move(u));
    world.utterance_style.push_back(style);
    world.utterance_topic.push_back(topic);
  }
  return world;
}

struct WorldFiles {
  std::string corpus;
  std::string style_pairs;
  std::string pos;
  std::string manifest;
};

inline WorldFiles world_files(const std::filesystem::path& dir) {
  return {(dir / "corpus.txt").string(), (dir / "style_pairs.tsv").string(), (dir / "pos.tsv").string(),
          (dir / "manifest.txt").string()};
}

inline void write_corpus(const std::vector<TokenList>& utterances, std::ostream& out) {
  for (const auto& u : utterances) {
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (i) out << ' ';
      out << u[i];
    }
    out << '\n';
  }
}

inline WorldFiles write_world(const SyntheticWorld& world, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("synth: cannot create '" + dir.string() + "': " + ec.message());
  WorldFiles files = world_files(dir);
  {
    auto out = open_output(files.corpus);
    write_corpus(world.utterances, out);
  }
  {
    auto out = open_output(files.style_pairs);
    out << "# word1\tword2\tstyle similarity (+2 same style, -2 different)\n";
    world.style_pairs.write(out);
  }
  {
    auto out = open_output(files.pos);
    world.pos.write(out);
  }
  {
    auto out = open_output(files.manifest);
    for (const auto& [k, v] : world.manifest()) out << k << '=' << v << '\n';
  }
  return files;
}

}  // namespace stylevec
