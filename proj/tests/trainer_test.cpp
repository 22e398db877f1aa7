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

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "oracles.hpp"
#include "stylevec/trainer.hpp"

using namespace stylevec;

namespace {

struct Fixture {
  std::vector<TokenList> lines;
  Vocabulary vocab;
  UtteranceCorpus corpus;

  Fixture(std::vector<TokenList> l, std::uint64_t min_count = 1)
      : lines(std::move(l)), vocab(build_vocab(lines, min_count, 100'000)),
        corpus(UtteranceCorpus::encode(lines, vocab)) {}
};

TrainConfig small_config(Variant v, std::size_t ds = 6, std::size_t dy = 0) {
  TrainConfig c;
  c.variant = v;
  c.delta = 2;
  c.epochs = 2;
  c.negatives = 3;
  c.alpha = 0.05;
  c.sample = 0.0;
  c.min_count = 1;
  c.d_style = ds;
  c.d_synsem = dy;
  c.seed = 9;
  return c;
}

bool same_values(std::span<const double> a, std::span<const double> b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

bool same_parameters(const SplitEmbeddingModel& a, const SplitEmbeddingModel& b) {
  return same_values(a.input_values(), b.input_values()) && same_values(a.output_values(), b.output_values());
}

}  // namespace

TEST(Expectations, PairsHaveOnlyNearContext) {
  Fixture f({{"a", "b"}, {"b", "a"}});
  auto ex = estimate_update_expectations(f.corpus, 5);
  EXPECT_DOUBLE_EQ(ex.e_near, 1.0);
  EXPECT_DOUBLE_EQ(ex.e_dist, 0.0);
}

TEST(Expectations, MatchEnumerationOverPositions) {
  auto lines = oracle::zipf_lines(300, 30, 2, 1, 30);
  Fixture f(lines);
  for (std::size_t delta : {1u, 3u, 5u, 10u}) {
    double near = 0, dist = 0, positions = 0;
    for (const auto& u : f.corpus) {
      for (std::size_t t = 0; t < u.size(); ++t) {
        auto s = oracle::context_sets(u.size(), t, delta);
        near += static_cast<double>(s.near.size());
        dist += static_cast<double>(s.dist.size());
        positions += 1;
      }
    }
    auto ex = estimate_update_expectations(f.corpus, delta);
    EXPECT_NEAR(ex.e_near, near / positions, 1e-12);
    EXPECT_NEAR(ex.e_dist, dist / positions, 1e-12);
  }
}

TEST(Expectations, TwelveTokenUtterance) {
  // Delta 5 over 12 positions: near sizes 5,6,7,8,9,10,10,9,8,7,6,5.
  Fixture f({{"a", "b", "c", "d", "e", "f", "g", "h", "i", "j", "k", "l"}});
  auto ex = estimate_update_expectations(f.corpus, 5);
  EXPECT_DOUBLE_EQ(ex.e_near, 90.0 / 12.0);
  EXPECT_DOUBLE_EQ(ex.e_dist, 11.0 - 90.0 / 12.0);
}

TEST(LearningRates, EqualExpectationsHalveStyleRate) {
  auto r = part_learning_rates(0.05, {8.0, 8.0}, Variant::Sep);
  EXPECT_DOUBLE_EQ(r.x, 0.025);
  EXPECT_DOUBLE_EQ(r.x_out, 0.025);
  EXPECT_DOUBLE_EQ(r.y, 0.05);
  EXPECT_DOUBLE_EQ(r.y_out, 0.05);
}

TEST(LearningRates, UndividedVariantsUseBaseRate) {
  for (Variant v : {Variant::Near, Variant::All, Variant::Dist}) {
    auto r = part_learning_rates(0.05, {8.0, 8.0}, v);
    EXPECT_EQ(r.x, 0.05);
    EXPECT_EQ(r.y, 0.05);
  }
}

TEST(LearningRates, EqualizeRateTimesExpectedUpdates) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> pos(0.01, 50.0);
  for (int i = 0; i < 1000; ++i) {
    UpdateExpectations ex{pos(rng), pos(rng)};
    double alpha = pos(rng) / 100.0;
    auto r = part_learning_rates(alpha, ex, Variant::Sep);
    double lhs = r.x * (ex.e_near + ex.e_dist);
    double rhs = r.y * ex.e_near;
    EXPECT_LE(std::abs(lhs - rhs), 1e-12 * std::abs(rhs));
    EXPECT_EQ(r.y, alpha);
  }
}

TEST(LearningRates, RejectZeroNearExpectation) {
  EXPECT_THROW(part_learning_rates(0.05, {0.0, 3.0}, Variant::Sep), Error);
}

TEST(Config, ValidationRules) {
  auto c = small_config(Variant::Sep, 4, 0);
  EXPECT_THROW(c.validate(), Error);
  c.d_synsem = 4;
  EXPECT_NO_THROW(c.validate());
  c.delta = 0;
  EXPECT_THROW(c.validate(), Error);
  EXPECT_EQ(TrainConfig::defaults(Variant::Sep).d_synsem, 300u);
  EXPECT_EQ(TrainConfig::defaults(Variant::Near).d_synsem, 0u);
  EXPECT_EQ(TrainConfig::defaults(Variant::Near).d_style, 300u);
}

TEST(Trainer, ZeroEpochsReturnsInitialisation) {
  Fixture f(oracle::zipf_lines(50, 20, 1));
  auto c = small_config(Variant::Near);
  c.epochs = 0;
  auto trained = train(c, f.corpus, f.vocab);
  auto init = SplitEmbeddingModel::init(f.vocab.size(), c.d_style, c.d_synsem, c.seed);
  EXPECT_TRUE(trained.bitwise_equal(init));
}

// Two-word corpus: the only possible negative is the other word, so the run
// can be replayed step by step without the sampler.
TEST(Trainer, MatchesHandSteppedTwoWordRun) {
  Fixture f(std::vector<TokenList>{{"a", "b"}});
  auto c = small_config(Variant::Near, 3, 0);
  c.epochs = 1;
  c.negatives = 1;
  Trainer trainer(c, f.corpus, f.vocab);
  trainer.run();

  auto init = SplitEmbeddingModel::init(2, 3, 0, c.seed);
  std::vector<std::vector<double>> x(2), u(2, std::vector<double>(3, 0.0));
  for (WordId w = 0; w < 2; ++w) x[w].assign(init.input_row(w).begin(), init.input_row(w).end());
  auto sig = [](double s) { return 1.0 / (1.0 + std::exp(-s)); };
  const double lrs[2] = {0.05, 0.05 * 0.5};  // decay after 0 and 1 of 2 tokens
  for (WordId target = 0; target < 2; ++target) {
    WordId ctx = 1 - target;
    WordId neg = 1 - target;
    std::vector<double> h = x[ctx];
    double st = 0, sn = 0;
    for (int j = 0; j < 3; ++j) {
      st += u[target][j] * h[j];
      sn += u[neg][j] * h[j];
    }
    double gt = sig(st) - 1.0, gn = sig(sn);
    std::vector<double> gh(3);
    for (int j = 0; j < 3; ++j) gh[j] = gt * u[target][j] + gn * u[neg][j];
    for (int j = 0; j < 3; ++j) u[target][j] -= lrs[target] * gt * h[j];
    for (int j = 0; j < 3; ++j) u[neg][j] -= lrs[target] * gn * h[j];
    for (int j = 0; j < 3; ++j) x[ctx][j] -= lrs[target] * gh[j];
  }
  for (WordId w = 0; w < 2; ++w) {
    for (int j = 0; j < 3; ++j) {
      EXPECT_NEAR(trainer.model().input_row(w)[j], x[w][j], 1e-15);
      EXPECT_NEAR(trainer.model().output_row(w)[j], u[w][j], 1e-15);
    }
  }
  EXPECT_EQ(trainer.progress().updates.full_updates, 2u);
}

TEST(Trainer, ProgressAndDecay) {
  Fixture f(oracle::zipf_lines(100, 20, 3));
  auto c = small_config(Variant::Near);
  c.epochs = 3;
  Trainer trainer(c, f.corpus, f.vocab);
  EXPECT_DOUBLE_EQ(trainer.scheduled_tokens(), 3.0 * static_cast<double>(f.corpus.token_count()));
  EXPECT_DOUBLE_EQ(trainer.decay(0), 1.0);
  EXPECT_DOUBLE_EQ(trainer.decay(f.corpus.token_count()), 2.0 / 3.0);
  EXPECT_NEAR(trainer.decay(static_cast<std::uint64_t>(trainer.scheduled_tokens() / 2)), 0.5,
              1.0 / trainer.scheduled_tokens());
  EXPECT_DOUBLE_EQ(trainer.decay(10 * f.corpus.token_count()), kMinLearningRateFraction);

  std::vector<std::uint64_t> seen;
  trainer.run([&](const ProgressReport& p) { seen.push_back(p.tokens_done); }, 100);
  auto p = trainer.progress();
  EXPECT_EQ(p.tokens_done, 3 * f.corpus.token_count());
  EXPECT_EQ(seen.size(), p.tokens_done / 100);
  EXPECT_GT(p.running_loss, 0.0);
  EXPECT_TRUE(std::isfinite(p.running_loss));
}

TEST(Trainer, SameSeedIsBitwiseReproducible) {
  Fixture f(oracle::zipf_lines(200, 40, 4));
  for (Variant v : {Variant::Near, Variant::All, Variant::Dist, Variant::Sep}) {
    auto c = small_config(v, 4, v == Variant::Sep ? 4 : 0);
    c.sample = 1e-2;
    auto a = train(c, f.corpus, f.vocab);
    auto b = train(c, f.corpus, f.vocab);
    EXPECT_TRUE(a.bitwise_equal(b)) << to_string(v);
    c.seed += 1;
    EXPECT_FALSE(a.bitwise_equal(train(c, f.corpus, f.vocab))) << to_string(v);
  }
}

// When no utterance is longer than delta + 1, every context is near and all
// variants that read the window coincide; dist-ctx never updates.
TEST(Trainer, VariantsCollapseOnShortUtterances) {
  Fixture f(oracle::zipf_lines(150, 25, 6, 1, 3));
  auto near_cfg = small_config(Variant::Near, 8, 0);
  auto all_cfg = small_config(Variant::All, 8, 0);
  auto sep_cfg = small_config(Variant::Sep, 5, 3);
  auto dist_cfg = small_config(Variant::Dist, 8, 0);

  auto near = train(near_cfg, f.corpus, f.vocab);
  auto all = train(all_cfg, f.corpus, f.vocab);
  auto sep = train(sep_cfg, f.corpus, f.vocab);
  EXPECT_TRUE(same_parameters(near, all));
  EXPECT_TRUE(same_parameters(near, sep));

  Trainer dist(dist_cfg, f.corpus, f.vocab);
  dist.run();
  EXPECT_EQ(dist.progress().updates.full_updates, 0u);
  EXPECT_EQ(dist.progress().updates.style_updates, 0u);
  EXPECT_TRUE(dist.model().bitwise_equal(SplitEmbeddingModel::init(f.vocab.size(), 8, 0, dist_cfg.seed)));
}

TEST(Trainer, SepStylePassLeavesSynsemHalfAlone) {
  Fixture f(oracle::zipf_lines(200, 30, 7, 4, 20));
  auto c = small_config(Variant::Sep, 4, 4);
  c.check_slice_isolation = true;
  Trainer trainer(c, f.corpus, f.vocab);
  EXPECT_NO_THROW(trainer.run());
  EXPECT_GT(trainer.progress().updates.style_updates, 0u);
}

TEST(Trainer, SepWithoutStylePassMatchesNearCtx) {
  Fixture f(oracle::zipf_lines(200, 30, 8, 4, 20));
  auto sep_cfg = small_config(Variant::Sep, 4, 4);
  sep_cfg.style_pass = false;
  auto near_cfg = small_config(Variant::Near, 8, 0);
  Trainer sep(sep_cfg, f.corpus, f.vocab);
  sep.run();
  EXPECT_EQ(sep.rates().x, sep_cfg.alpha);
  auto near = train(near_cfg, f.corpus, f.vocab);
  EXPECT_TRUE(same_parameters(sep.model(), near));
}

TEST(Trainer, SepUsesBalancedRates) {
  Fixture f(oracle::zipf_lines(200, 30, 8, 4, 20));
  auto c = small_config(Variant::Sep, 4, 4);
  Trainer trainer(c, f.corpus, f.vocab);
  const auto& ex = trainer.expectations();
  EXPECT_GT(ex.e_dist, 0.0);
  EXPECT_DOUBLE_EQ(trainer.rates().x, c.alpha * ex.e_near / (ex.e_near + ex.e_dist));
  EXPECT_EQ(trainer.rates().y, c.alpha);
}

TEST(Trainer, MultipleWorkersStayFinite) {
  Fixture f(oracle::zipf_lines(2000, 100, 9));
  auto c = small_config(Variant::Sep, 8, 8);
  c.workers = 4;
  Trainer trainer(c, f.corpus, f.vocab);
  trainer.run();
  EXPECT_TRUE(trainer.model().all_finite());
  EXPECT_EQ(trainer.progress().tokens_done, c.epochs * f.corpus.token_count());
}

TEST(Trainer, ResumesFromGivenModel) {
  Fixture f(oracle::zipf_lines(50, 20, 10));
  auto c = small_config(Variant::Near);
  SplitEmbeddingModel start(f.vocab.size(), c.d_style, c.d_synsem);
  start.input_row(0)[0] = 0.25;
  c.epochs = 0;
  Trainer trainer(c, f.corpus, f.vocab, start);
  trainer.run();
  EXPECT_TRUE(trainer.model().bitwise_equal(start));
  SplitEmbeddingModel wrong(f.vocab.size(), c.d_style + 1, 0);
  EXPECT_THROW(Trainer(c, f.corpus, f.vocab, wrong), Error);
}
