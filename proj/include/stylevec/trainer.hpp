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

// Epoch loop for the four CBOW variants.
//
//   near-ctx  one full update per target from the nearby window
//   all-ctx   one full update from the whole utterance
//   dist-ctx  one full update from the positions beyond the window
//   sep-ctx   a full update from the nearby window, then a style-half update
//             from the distant positions, for every target
//
// With one worker the run is a deterministic function of the config seed.
// With more, workers share the parameter tables without locking and lost
// updates are tolerated.

#pragma once

#include <atomic>
#include <cmath>
#include <cstring>
#include <functional>
#include <span>
#include <thread>
#include <vector>

#include "stylevec/common.hpp"
#include "stylevec/context.hpp"
#include "stylevec/corpus.hpp"
#include "stylevec/model.hpp"

namespace stylevec {

struct TrainConfig {
  Variant variant = Variant::Near;
  std::size_t delta = 5;
  std::size_t epochs = 10;
  std::size_t negatives = 5;
  double alpha = 0.05;
  double sample = 1e-3;
  std::uint64_t min_count = 5;
  std::size_t d_style = 300;
  std::size_t d_synsem = 0;
  std::uint64_t seed = 1;
  std::size_t workers = 1;

  // Diagnostics. `style_pass = false` turns off the sep-ctx style-half pass;
  // `check_slice_isolation` verifies after every style-half update that no
  // syntactic/semantic coordinate moved.
  bool style_pass = true;
  bool check_slice_isolation = false;

  /// Full-size defaults: 300 dimensions, 300 + 300 for sep-ctx.
  static TrainConfig defaults(Variant variant) {
    TrainConfig c;
    c.variant = variant;
    c.d_synsem = variant == Variant::Sep ? 300 : 0;
    return c;
  }

  void validate() const {
    if (delta < 1) throw Error("config: delta must be >= 1");
    if (negatives < 1) throw Error("config: negatives must be >= 1");
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw Error("config: alpha must be > 0");
    if (!(sample >= 0.0)) throw Error("config: sample must be >= 0");
    if (min_count < 1) throw Error("config: min_count must be >= 1");
    if (d_style + d_synsem < 1) throw Error("config: dimension must be >= 1");
    if (variant == Variant::Sep && (d_style == 0 || d_synsem == 0)) {
      throw Error("config: sep-ctx needs both d_style and d_synsem > 0");
    }
    if (workers < 1) throw Error("config: workers must be >= 1");
  }
};

/// Average context sizes per target position.
struct UpdateExpectations {
  double e_near = 0.0;
  double e_dist = 0.0;
};

/// Exact averages of |C_near| and |C_dist| over every target position of the
/// unsubsampled corpus.
inline UpdateExpectations estimate_update_expectations(const UtteranceCorpus& corpus,
                                                       std::size_t delta) {
  if (corpus.empty()) throw Error("empty corpus");
  if (delta < 1) throw Error("delta must be >= 1");
  std::uint64_t positions = 0;
  std::uint64_t near_total = 0;
  std::uint64_t dist_total = 0;
  for (const auto& u : corpus) {
    std::size_t len = u.size();
    for (std::size_t t = 0; t < len; ++t) {
      std::size_t near = std::min(t, delta) + std::min(len - 1 - t, delta);
      near_total += near;
      dist_total += len - 1 - near;
      ++positions;
    }
  }
  UpdateExpectations ex;
  ex.e_near = static_cast<double>(near_total) / static_cast<double>(positions);
  ex.e_dist = static_cast<double>(dist_total) / static_cast<double>(positions);
  return ex;
}

inline UpdateExpectations estimate_update_expectations(const UtteranceCorpus& corpus,
                                                       const TrainConfig& config) {
  return estimate_update_expectations(corpus, config.delta);
}

/// Initial learning rates for {x, y, x~, y~}.
struct PartLearningRates {
  double x = 0.0;
  double y = 0.0;
  double x_out = 0.0;
  double y_out = 0.0;

  PartRates input() const { return {x, y}; }
  PartRates output() const { return {x_out, y_out}; }
};

/// Balances the rates so that rate * expected updates is the same for every
/// part. y parts see e_near update events per target and x parts see
/// e_near + e_dist, anchored at lr_y = base_lr. Undivided variants use
/// base_lr everywhere.
inline PartLearningRates part_learning_rates(double base_lr, const UpdateExpectations& ex,
                                             Variant variant) {
  if (!(ex.e_near > 0.0)) throw Error("learning rates: expected near updates must be positive");
  if (ex.e_dist < 0.0) throw Error("learning rates: negative distant expectation");
  PartLearningRates r{base_lr, base_lr, base_lr, base_lr};
  if (variant == Variant::Sep) {
    double x = base_lr * (ex.e_near / (ex.e_near + ex.e_dist));
    r.x = x;
    r.x_out = x;
  }
  return r;
}

struct UpdateCounts {
  std::uint64_t full_updates = 0;
  std::uint64_t style_updates = 0;
  std::uint64_t skipped_empty = 0;
};

struct ProgressReport {
  std::uint64_t tokens_done = 0;
  double current_lr = 0.0;
  double running_loss = 0.0;
  UpdateCounts updates;
};

inline constexpr double kMinLearningRateFraction = 1e-4;
inline constexpr int kMaxNegativeRedraws = 100;

class Trainer {
 public:
  Trainer(TrainConfig config, const UtteranceCorpus& corpus, const Vocabulary& vocab)
      : Trainer(config, corpus, vocab,
                SplitEmbeddingModel::init(vocab.size(), config.d_style, config.d_synsem,
                                          config.seed)) {}

  /// Continues from existing parameters (e.g. a checkpoint).
  Trainer(TrainConfig config, const UtteranceCorpus& corpus, const Vocabulary& vocab,
          SplitEmbeddingModel initial)
      : config_(config), corpus_(&corpus), vocab_(&vocab), model_(std::move(initial)) {
    config_.validate();
    if (corpus.empty()) throw Error("empty corpus");
    if (model_.vocab_size() != vocab.size()) throw Error("model/vocabulary size mismatch");
    if (model_.d_style() != config_.d_style || model_.d_synsem() != config_.d_synsem) {
      throw Error("model dimensions do not match config");
    }
    expectations_ = estimate_update_expectations(corpus, config_.delta);
    UpdateExpectations effective = expectations_;
    if (config_.variant == Variant::Sep && !config_.style_pass) effective.e_dist = 0.0;
    rates_ = part_learning_rates(config_.alpha, effective, config_.variant);
    stream_tokens_ = expected_stream_tokens(corpus, vocab, config_.sample);
    scheduled_tokens_ = stream_tokens_ * static_cast<double>(config_.epochs);
  }

  const TrainConfig& config() const { return config_; }
  const SplitEmbeddingModel& model() const { return model_; }
  SplitEmbeddingModel release() { return std::move(model_); }
  const UpdateExpectations& expectations() const { return expectations_; }
  const PartLearningRates& rates() const { return rates_; }
  double scheduled_tokens() const { return scheduled_tokens_; }

  /// Linear decay factor after `done` tokens, floored at 1e-4.
  double decay(std::uint64_t done) const {
    if (!(scheduled_tokens_ > 0.0)) return 1.0;
    double f = 1.0 - static_cast<double>(done) / scheduled_tokens_;
    return std::max(f, kMinLearningRateFraction);
  }

  ProgressReport progress() const {
    ProgressReport p;
    p.tokens_done = tokens_done_.load(std::memory_order_relaxed);
    p.current_lr = config_.alpha * decay(p.tokens_done);
    p.running_loss = running_loss_;
    p.updates = counts_;
    return p;
  }

  using ProgressCallback = std::function<void(const ProgressReport&)>;

  void run(const ProgressCallback& on_progress = {}, std::uint64_t report_every = 1'000'000) {
    for (std::size_t epoch = 0; epoch < config_.epochs; ++epoch) {
      if (config_.workers == 1) {
        Worker worker(*this, mix_seed(config_.seed, 2 * epoch + 1), 0, corpus_->size());
        worker.run_stream(mix_seed(config_.seed, 2 * epoch + 2), on_progress, report_every);
        merge(worker);
        continue;
      }
      std::vector<Worker> workers;
      workers.reserve(config_.workers);
      std::size_t n = corpus_->size();
      for (std::size_t k = 0; k < config_.workers; ++k) {
        std::uint64_t salt = (epoch * config_.workers + k) * 2 + 1;
        workers.emplace_back(*this, mix_seed(config_.seed, salt), n * k / config_.workers,
                             n * (k + 1) / config_.workers);
      }
      std::vector<std::thread> threads;
      for (std::size_t k = 0; k < workers.size(); ++k) {
        std::uint64_t stream_seed = mix_seed(config_.seed, (epoch * config_.workers + k) * 2 + 2);
        threads.emplace_back([&, k, stream_seed] {
          workers[k].run_stream(stream_seed, k == 0 ? on_progress : ProgressCallback{},
                                report_every);
        });
      }
      for (auto& t : threads) t.join();
      for (auto& w : workers) merge(w);
    }
    if (!model_.all_finite()) throw Error("numeric overflow: non-finite parameters after training");
  }

 private:
  class Worker {
   public:
    Worker(Trainer& trainer, std::uint64_t seed, std::size_t begin, std::size_t end)
        : loss_ema_(trainer.running_loss_),
          have_loss_(trainer.have_loss_),
          t_(&trainer),
          rng_(seed),
          begin_(begin),
          end_(end) {}

    void run_stream(std::uint64_t stream_seed, const ProgressCallback& on_progress,
                    std::uint64_t report_every) {
      UtteranceStream stream(*t_->corpus_, *t_->vocab_, t_->config_.sample, stream_seed, begin_,
                             end_);
      std::vector<WordId> utt;
      while (stream.next(utt)) {
        for (std::size_t pos = 0; pos < utt.size(); ++pos) {
          std::uint64_t done = t_->tokens_done_.load(std::memory_order_relaxed);
          train_target(utt, pos, t_->decay(done));
          done = t_->tokens_done_.fetch_add(1, std::memory_order_relaxed) + 1;
          if (on_progress && report_every > 0 && done % report_every == 0) {
            ProgressReport p = t_->progress();
            p.running_loss = loss_ema_;
            on_progress(p);
          }
        }
      }
    }

    UpdateCounts counts;
    double loss_ema_ = 0.0;
    bool have_loss_ = false;

   private:
    void train_target(const std::vector<WordId>& utt, std::size_t pos, double factor) {
      const TrainConfig& cfg = t_->config_;
      extract_into(utt.size(), pos, cfg.delta, ctx_);
      const PartLearningRates& base = t_->rates_;
      PartRates in{base.x * factor, base.y * factor};
      PartRates out{base.x_out * factor, base.y_out * factor};
      WordId target = utt[pos];

      switch (cfg.variant) {
        case Variant::Near:
          update(utt, ctx_.near, target, Part::Full, in, out);
          break;
        case Variant::All:
          ctx_.all_into(all_);
          update(utt, all_, target, Part::Full, in, out);
          break;
        case Variant::Dist:
          update(utt, ctx_.dist, target, Part::Full, in, out);
          break;
        case Variant::Sep:
          update(utt, ctx_.near, target, Part::Full, in, out);
          if (cfg.style_pass) update(utt, ctx_.dist, target, Part::StyleHalf, in, out);
          break;
      }
    }

    void update(const std::vector<WordId>& utt, const std::vector<std::size_t>& positions,
                WordId target, Part part, PartRates in_rates, PartRates out_rates) {
      if (positions.empty()) {
        ++counts.skipped_empty;
        return;
      }
      SplitEmbeddingModel& model = t_->model_;
      ids_.clear();
      for (std::size_t p : positions) ids_.push_back(utt[p]);
      h_.resize(model.width(part));
      model.context_mean(ids_, part, h_);
      draw_negatives(target);
      model.ns_loss_and_grads(target, h_, negatives_, part, grads_);

      bool check = part == Part::StyleHalf && t_->config_.check_slice_isolation;
      if (check) snapshot_synsem(model);
      model.apply_update(Table::Output, grads_.ids, grads_.grad_outputs, out_rates, part);
      model.apply_update_each(Table::Input, ids_, grads_.grad_h, in_rates, part);
      if (check) verify_synsem(model);

      if (part == Part::Full) {
        ++counts.full_updates;
      } else {
        ++counts.style_updates;
      }
      if (have_loss_) {
        loss_ema_ = 0.999 * loss_ema_ + 0.001 * grads_.loss;
      } else {
        loss_ema_ = grads_.loss;
        have_loss_ = true;
      }
    }

    void draw_negatives(WordId target) {
      negatives_.clear();
      const Vocabulary& vocab = *t_->vocab_;
      for (std::size_t k = 0; k < t_->config_.negatives; ++k) {
        for (int attempt = 0; attempt < kMaxNegativeRedraws; ++attempt) {
          WordId w = vocab.sample_noise(rng_);
          if (w != target) {
            negatives_.push_back(w);
            break;
          }
        }
      }
    }

    void snapshot_synsem(const SplitEmbeddingModel& model) {
      saved_.clear();
      auto save = [&](Table table, WordId id) {
        auto r = model.row(table, id);
        saved_.insert(saved_.end(), r.begin() + static_cast<std::ptrdiff_t>(model.d_style()), r.end());
      };
      for (WordId id : grads_.ids) save(Table::Output, id);
      for (WordId id : ids_) save(Table::Input, id);
    }

    void verify_synsem(const SplitEmbeddingModel& model) const {
      std::size_t k = 0;
      auto check = [&](Table table, WordId id) {
        auto r = model.row(table, id);
        for (std::size_t j = model.d_style(); j < model.dim(); ++j, ++k) {
          if (std::memcmp(&r[j], &saved_[k], sizeof(double)) != 0) {
            throw Error("slice isolation violated: style update moved a syntactic/semantic coordinate");
          }
        }
      };
      for (WordId id : grads_.ids) check(Table::Output, id);
      for (WordId id : ids_) check(Table::Input, id);
    }

    Trainer* t_;
    Rng rng_;
    std::size_t begin_;
    std::size_t end_;
    ContextSets ctx_;
    std::vector<std::size_t> all_;
    std::vector<WordId> ids_;
    std::vector<WordId> negatives_;
    std::vector<double> h_;
    std::vector<double> saved_;
    NsGradients grads_;
  };

  void merge(const Worker& w) {
    counts_.full_updates += w.counts.full_updates;
    counts_.style_updates += w.counts.style_updates;
    counts_.skipped_empty += w.counts.skipped_empty;
    if (w.have_loss_) {
      running_loss_ = w.loss_ema_;
      have_loss_ = true;
    }
  }

  TrainConfig config_;
  const UtteranceCorpus* corpus_;
  const Vocabulary* vocab_;
  SplitEmbeddingModel model_;
  UpdateExpectations expectations_;
  PartLearningRates rates_;
  double stream_tokens_ = 0.0;
  double scheduled_tokens_ = 0.0;
  std::atomic<std::uint64_t> tokens_done_{0};
  double running_loss_ = 0.0;
  bool have_loss_ = false;
  UpdateCounts counts_;
};

inline SplitEmbeddingModel train(const TrainConfig& config, const UtteranceCorpus& corpus,
                                 const Vocabulary& vocab) {
  Trainer trainer(config, corpus, vocab);
  trainer.run();
  return trainer.release();
}

}  // namespace stylevec
