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
#include <random>

#include "oracles.hpp"
#include "stylevec/model.hpp"

using namespace stylevec;

namespace {

SplitEmbeddingModel random_model(std::size_t vocab, std::size_t ds, std::size_t dy, std::uint64_t seed,
                                 double scale = 1.0) {
  SplitEmbeddingModel m(vocab, ds, dy);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, scale);
  for (double& v : m.input_values()) v = normal(rng);
  for (double& v : m.output_values()) v = normal(rng);
  return m;
}

std::vector<double> slice(std::span<const double> row, std::size_t width) {
  return {row.begin(), row.begin() + static_cast<std::ptrdiff_t>(width)};
}

double oracle_loss(const SplitEmbeddingModel& m, WordId target, const std::vector<double>& h,
                   const std::vector<WordId>& negs, std::size_t width) {
  std::vector<std::vector<double>> neg_rows;
  for (WordId n : negs) neg_rows.push_back(slice(m.output_row(n), width));
  return oracle::ns_loss(h, slice(m.output_row(target), width), neg_rows);
}

}  // namespace

TEST(ContextMean, SingleWordIsItsRow) {
  auto m = random_model(4, 3, 2, 1);
  auto h = m.context_mean(std::vector<WordId>{2}, Part::Full);
  EXPECT_EQ(h, slice(m.input_row(2), 5));
}

TEST(ContextMean, RepeatedIdsCountTwice) {
  SplitEmbeddingModel m(3, 2, 0);
  m.input_row(0)[0] = 3.0;
  m.input_row(1)[0] = 0.0;
  auto h = m.context_mean(std::vector<WordId>{0, 0, 1}, Part::Full);
  EXPECT_DOUBLE_EQ(h[0], 2.0);
}

TEST(ContextMean, StyleHalfReadsLeadingCoordinates) {
  auto m = random_model(5, 2, 3, 2);
  std::vector<WordId> ids{1, 3};
  auto h = m.context_mean(ids, Part::StyleHalf);
  ASSERT_EQ(h.size(), 2u);
  for (std::size_t j = 0; j < 2; ++j) {
    EXPECT_DOUBLE_EQ(h[j], (m.input_row(1)[j] + m.input_row(3)[j]) / 2.0);
  }
}

TEST(ContextMean, EmptyContextIsAnError) {
  SplitEmbeddingModel m(3, 2, 0);
  EXPECT_THROW(m.context_mean(std::vector<WordId>{}, Part::Full), Error);
}

TEST(NsLoss, ZeroScoresGiveKPlusOneLogTwo) {
  SplitEmbeddingModel m(6, 3, 2);
  std::vector<double> h(5, 0.7);
  for (std::size_t k : {1u, 3u, 5u}) {
    std::vector<WordId> negs(k, 1);
    auto g = m.ns_loss_and_grads(0, h, negs, Part::Full);
    EXPECT_NEAR(g.loss, (k + 1.0) * std::log(2.0), 1e-12);
    // With zero output rows the context gradient vanishes.
    for (double v : g.grad_h) EXPECT_EQ(v, 0.0);
  }
}

TEST(NsLoss, MatchesDirectDefinition) {
  auto m = random_model(20, 4, 4, 3, 0.5);
  std::vector<double> h{0.1, -0.2, 0.3, 0.05, 0.4, -0.1, 0.0, 0.2};
  std::vector<WordId> negs{3, 7, 7, 11};
  auto g = m.ns_loss_and_grads(2, h, negs, Part::Full);
  EXPECT_NEAR(g.loss, oracle_loss(m, 2, h, negs, 8), 1e-12);
  ASSERT_EQ(g.ids, (std::vector<WordId>{2, 3, 7, 7, 11}));
}

TEST(NsLoss, StableForLargeScores) {
  SplitEmbeddingModel m(3, 1, 0);
  m.output_row(0)[0] = 1.0;
  m.output_row(1)[0] = 1.0;
  std::vector<double> h{800.0};
  auto g = m.ns_loss_and_grads(0, h, std::vector<WordId>{1}, Part::Full);
  EXPECT_TRUE(std::isfinite(g.loss));
  EXPECT_NEAR(g.loss, 800.0, 1e-9);
}

TEST(NsLoss, OverflowingScoreIsReported) {
  SplitEmbeddingModel m(2, 1, 0);
  m.output_row(0)[0] = 1e308;
  std::vector<double> h{1e308};
  EXPECT_THROW(m.ns_loss_and_grads(0, h, std::vector<WordId>{1}, Part::Full), Error);
}

// Central differences against the analytic gradients, for both the context
// vector and every touched output row, across widths, parts and k.
TEST(NsGradients, AgreeWithFiniteDifferences) {
  std::mt19937_64 rng(17);
  const double eps = 1e-6;
  int instances = 0;
  for (std::size_t dim : {1u, 3u, 8u, 16u}) {
    for (std::size_t k : {1u, 2u, 5u, 8u}) {
      for (Part part : {Part::Full, Part::StyleHalf}) {
        std::size_t ds = (dim + 1) / 2;
        std::size_t dy = dim - ds;
        if (part == Part::StyleHalf && dy == 0) continue;
        auto m = random_model(30, ds, dy, rng(), 0.4);
        std::size_t w = m.width(part);
        std::vector<double> h(w);
        std::normal_distribution<double> normal(0.0, 0.5);
        for (double& v : h) v = normal(rng);
        WordId target = static_cast<WordId>(rng() % 30);
        std::vector<WordId> negs;
        while (negs.size() < k) {
          WordId n = static_cast<WordId>(rng() % 30);
          if (n != target && std::find(negs.begin(), negs.end(), n) == negs.end()) negs.push_back(n);
        }
        auto g = m.ns_loss_and_grads(target, h, negs, part);

        std::vector<double> fd_h(w);
        for (std::size_t j = 0; j < w; ++j) {
          auto hp = h, hm = h;
          hp[j] += eps;
          hm[j] -= eps;
          fd_h[j] = (oracle_loss(m, target, hp, negs, w) - oracle_loss(m, target, hm, negs, w)) / (2 * eps);
        }
        EXPECT_LT(oracle::relative_error(g.grad_h, fd_h), 1e-4);

        for (std::size_t i = 0; i < g.ids.size(); ++i) {
          std::vector<double> fd_u(w);
          for (std::size_t j = 0; j < w; ++j) {
            double& u = m.output_row(g.ids[i])[j];
            double saved = u;
            u = saved + eps;
            double up = oracle_loss(m, target, h, negs, w);
            u = saved - eps;
            double down = oracle_loss(m, target, h, negs, w);
            u = saved;
            fd_u[j] = (up - down) / (2 * eps);
          }
          auto analytic = g.grad_output(i);
          EXPECT_LT(oracle::relative_error({analytic.begin(), analytic.end()}, fd_u), 1e-4);
        }
        ++instances;
      }
    }
  }
  EXPECT_GE(instances, 28);
}

TEST(ApplyUpdate, ZeroRateLeavesModelUnchanged) {
  auto m = random_model(5, 2, 2, 4);
  auto before = m;
  std::vector<WordId> ids{0, 3};
  std::vector<double> grads(8, 1.5);
  m.apply_update(Table::Input, ids, grads, 0.0, Part::Full);
  m.apply_update_each(Table::Output, ids, std::vector<double>(4, 2.0), PartRates::uniform(0.0), Part::Full);
  EXPECT_TRUE(m.bitwise_equal(before));
}

TEST(ApplyUpdate, StyleHalfNeverTouchesSynsemCoordinates) {
  auto m = random_model(6, 3, 4, 5);
  auto before = m;
  std::vector<WordId> ids{1, 4, 4};
  std::vector<double> grads(9, 0.25);
  m.apply_update(Table::Output, ids, grads, PartRates{0.5, 0.5}, Part::StyleHalf);
  m.apply_update_each(Table::Input, ids, std::vector<double>(3, -1.0), PartRates{0.5, 0.5}, Part::StyleHalf);
  for (WordId id = 0; id < 6; ++id) {
    for (std::size_t j = 3; j < 7; ++j) {
      EXPECT_EQ(m.input_row(id)[j], before.input_row(id)[j]);
      EXPECT_EQ(m.output_row(id)[j], before.output_row(id)[j]);
    }
  }
  // Repeated id 4 stepped twice in the input table.
  EXPECT_DOUBLE_EQ(m.input_row(4)[0], before.input_row(4)[0] + 1.0);
}

TEST(ApplyUpdate, HandComputedTwoWordStep) {
  SplitEmbeddingModel m(2, 1, 1);
  m.input_row(0)[0] = 1.0;
  m.input_row(0)[1] = 2.0;
  m.input_row(1)[0] = -1.0;
  m.input_row(1)[1] = 0.5;
  std::vector<WordId> ids{0, 1};
  std::vector<double> grads{1.0, 1.0, 2.0, -4.0};
  m.apply_update(Table::Input, ids, grads, PartRates{0.1, 0.5}, Part::Full);
  EXPECT_DOUBLE_EQ(m.input_row(0)[0], 0.9);   // 1 - 0.1 * 1
  EXPECT_DOUBLE_EQ(m.input_row(0)[1], 1.5);   // 2 - 0.5 * 1
  EXPECT_DOUBLE_EQ(m.input_row(1)[0], -1.2);  // -1 - 0.1 * 2
  EXPECT_DOUBLE_EQ(m.input_row(1)[1], 2.5);   // 0.5 + 0.5 * 4
}

TEST(ApplyUpdate, RejectsMismatchedGradient) {
  SplitEmbeddingModel m(2, 2, 0);
  std::vector<WordId> ids{0};
  EXPECT_THROW(m.apply_update(Table::Input, ids, std::vector<double>(3), 0.1, Part::Full), Error);
  EXPECT_THROW(m.apply_update(Table::Input, std::vector<WordId>{9}, std::vector<double>(2), 0.1, Part::Full),
               Error);
}

TEST(Init, DeterministicInRangeWithZeroOutputs) {
  auto a = SplitEmbeddingModel::init(200, 10, 6, 42);
  auto b = SplitEmbeddingModel::init(200, 10, 6, 42);
  auto c = SplitEmbeddingModel::init(200, 10, 6, 43);
  EXPECT_TRUE(a.bitwise_equal(b));
  EXPECT_FALSE(a.bitwise_equal(c));
  double bound = 0.5 / 16.0;
  double sum = 0;
  for (double v : a.input_values()) {
    EXPECT_GE(v, -bound);
    EXPECT_LE(v, bound);
    sum += v;
  }
  for (double v : a.output_values()) EXPECT_EQ(v, 0.0);
  // 3200 uniforms of variance bound^2/3: the mean is within 5 sigma of 0.
  double sigma = bound / std::sqrt(3.0) / std::sqrt(3200.0);
  EXPECT_LT(std::abs(sum / 3200.0), 5 * sigma);
}

TEST(Variants, NamesRoundTrip) {
  for (Variant v : {Variant::Near, Variant::All, Variant::Dist, Variant::Sep}) {
    EXPECT_EQ(parse_variant(to_string(v)), v);
  }
  EXPECT_EQ(parse_variant("sep"), Variant::Sep);
  EXPECT_THROW(parse_variant("far"), Error);
}

TEST(Views, StyleAndSynsemSlices) {
  auto m = random_model(3, 2, 3, 6);
  WordIndex words(std::vector<std::string>{"a", "b", "c"});
  auto style = m.input_view(words, Part::StyleHalf);
  auto synsem = m.synsem_view(words);
  EXPECT_EQ(style.width(), 2u);
  EXPECT_EQ(synsem.width(), 3u);
  EXPECT_EQ(synsem.row(1)[0], m.input_row(1)[2]);
  SplitEmbeddingModel flat(3, 4, 0);
  EXPECT_THROW(flat.synsem_view(words), Error);
}
