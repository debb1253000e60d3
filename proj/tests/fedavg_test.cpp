// Copyright 2026 The fpfed Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fpfed/fedavg.hpp"
#include "support/random_data.hpp"

namespace fpfed {
namespace {

struct Federation {
  testing::Problem problem;
  DatasetList list;
};

Federation make_federation(std::uint64_t seed, std::size_t w, std::size_t dim) {
  std::mt19937_64 rng(seed);
  Federation f{testing::random_problem(rng, 25 * w, dim, false), {}};
  for (std::size_t k = 0; k < w; ++k) {
    Dataset d{f.problem.matrix.get(), {}, nullptr};
    const std::size_t n = k == 2 ? 0 : 5 + rng() % 40;
    for (std::size_t i = 0; i < n; ++i) {
      d.rows.push_back(static_cast<std::uint32_t>(rng() % f.problem.matrix->rows()));
    }
    std::sort(d.rows.begin(), d.rows.end());
    f.list.items.push_back(d);
  }
  return f;
}

TrainingRunConfig base_config() {
  TrainingRunConfig cfg;
  cfg.rounds = 5;
  cfg.local.clip = 0.5;
  cfg.local.optimizer.max_iterations = 10;
  return cfg;
}

TEST(RunRound, NoNoiseFullSamplingIsExactAverage) {
  auto fed = make_federation(1, 12, 10);
  auto cfg = base_config();
  std::vector<double> theta(11, 0.05);
  Rng rng(3);
  dp::PrivacyLedger ledger;
  auto next = run_round(theta, fed.list, nullptr, cfg, rng, ledger);
  std::vector<double> want = theta;
  for (const auto& d : fed.list.items) {
    auto delta = local_update(d, theta, cfg.local);
    for (std::size_t j = 0; j < want.size(); ++j) want[j] += delta[j] / 12.0;
  }
  for (std::size_t j = 0; j < want.size(); ++j) EXPECT_NEAR(next[j], want[j], 1e-12);
  EXPECT_EQ(ledger.count("fedavg"), 1);
}

TEST(RunRound, SubsampledAggregateIsUnbiased) {
  auto fed = make_federation(2, 10, 4);
  auto cfg = base_config();
  cfg.sampling_q = 0.3;
  std::vector<double> theta(5, 0.0);
  std::vector<double> mean_delta(5, 0.0);
  for (const auto& d : fed.list.items) {
    auto delta = local_update(d, theta, cfg.local);
    for (std::size_t j = 0; j < 5; ++j) mean_delta[j] += delta[j] / 10.0;
  }
  const int reps = 3000;
  std::vector<double> sum(5, 0.0), sq(5, 0.0);
  Rng rng(4);
  for (int i = 0; i < reps; ++i) {
    dp::PrivacyLedger ledger;
    auto next = run_round(theta, fed.list, nullptr, cfg, rng, ledger);
    for (std::size_t j = 0; j < 5; ++j) {
      sum[j] += next[j];
      sq[j] += next[j] * next[j];
    }
  }
  for (std::size_t j = 0; j < 5; ++j) {
    const double m = sum[j] / reps;
    const double sd = std::sqrt(std::max(0.0, sq[j] / reps - m * m));
    EXPECT_NEAR(m, mean_delta[j], 5.0 * sd / std::sqrt(double(reps)) + 1e-12) << j;
  }
}

TEST(RunRound, NoiseHasCalibratedScale) {
  auto fed = make_federation(3, 8, 300);
  auto cfg = base_config();
  cfg.noise_z = 2.0;
  std::vector<double> theta(301, 0.0);
  Rng rng(5), rng_clean(5);
  dp::PrivacyLedger ledger;
  auto noisy = run_round(theta, fed.list, nullptr, cfg, rng, ledger);
  cfg.noise_z = 0.0;
  auto clean = run_round(theta, fed.list, nullptr, cfg, rng_clean, ledger);
  double ss = 0.0;
  for (std::size_t j = 0; j < 301; ++j) ss += std::pow(noisy[j] - clean[j], 2);
  const double sigma = 2.0 * 0.5 / 8.0;
  EXPECT_NEAR(std::sqrt(ss / 301.0), sigma, 0.1 * sigma);
}

TEST(Train, SingleParticipantEqualsLocalTraining) {
  auto fed = make_federation(4, 1, 8);
  auto cfg = base_config();
  cfg.rounds = 7;
  cfg.local.epochs = 2;
  dp::PrivacyLedger ledger;
  auto res = train(fed.list, 8, nullptr, cfg, ledger);
  std::vector<double> theta(9, 0.0);
  for (std::size_t r = 0; r < cfg.rounds; ++r) {
    auto delta = local_update(fed.list.items[0], theta, cfg.local);
    for (std::size_t j = 0; j < 9; ++j) theta[j] += delta[j];
  }
  EXPECT_EQ(res.model.theta(), theta);
  EXPECT_EQ(ledger.count("fedavg"), 7);
}

TEST(Train, DeterministicAndIndependentOfWorkers) {
  auto fed = make_federation(5, 30, 6);
  auto cfg = base_config();
  cfg.sampling_q = 0.4;
  cfg.noise_z = 0.7;
  cfg.seed = 99;
  dp::PrivacyLedger l1, l2, l3;
  auto a = train(fed.list, 6, nullptr, cfg, l1);
  auto b = train(fed.list, 6, nullptr, cfg, l2);
  cfg.workers = 3;
  auto c = train(fed.list, 6, nullptr, cfg, l3);
  EXPECT_EQ(a.model, b.model);
  EXPECT_EQ(a.model, c.model);
  cfg.seed = 100;
  dp::PrivacyLedger l4;
  EXPECT_NE(train(fed.list, 6, nullptr, cfg, l4).model, a.model);
}

TEST(Train, TracksBestEvaluatedRound) {
  auto fed = make_federation(6, 5, 4);
  auto cfg = base_config();
  cfg.rounds = 6;
  dp::PrivacyLedger ledger;
  std::size_t calls = 0;
  const std::vector<double> scores = {0.2, 0.9, 0.4};
  auto res = train(fed.list, 4, nullptr, cfg, ledger,
                   [&](const LogisticModel&) { return scores[calls++ % 3]; }, 2);
  EXPECT_EQ(calls, 3u);
  ASSERT_TRUE(res.best_round.has_value());
  EXPECT_EQ(*res.best_round, 4u);
  EXPECT_FALSE(res.records[0].auprc.has_value());
  EXPECT_TRUE(res.records[1].auprc.has_value());
  ASSERT_EQ(res.records.size(), 6u);
}

TEST(Train, DeltaNormsRespectClipEveryRound) {
  auto fed = make_federation(7, 10, 6);
  auto cfg = base_config();
  cfg.local.clip = 0.05;
  dp::PrivacyLedger ledger;
  auto res = train(fed.list, 6, nullptr, cfg, ledger);
  for (const auto& r : res.records) EXPECT_LE(r.aggregate_norm, 0.05 + 1e-12);
}

TEST(Train, ValidatesConfig) {
  auto fed = make_federation(8, 4, 3);
  dp::PrivacyLedger ledger;
  auto cfg = base_config();
  cfg.sampling_q = 0.1;
  EXPECT_THROW(train(fed.list, 3, nullptr, cfg, ledger), InvalidInput);
  cfg = base_config();
  cfg.rounds = 0;
  EXPECT_THROW(train(fed.list, 3, nullptr, cfg, ledger), InvalidInput);
  EXPECT_THROW(train(DatasetList{}, 3, nullptr, base_config(), ledger), InvalidInput);
}

TEST(TrainCentralized, UsesFullOptimiserBudget) {
  std::mt19937_64 rng(9);
  auto p = testing::random_problem(rng, 200, 5, false);
  auto cfg = base_config();
  auto m = train_centralized(p.data, cfg);
  LbfgsConfig opt = cfg.local.optimizer;
  opt.max_iterations = 50;
  auto fit = lbfgs_fit(std::vector<double>(6, 0.0), p.data, cfg.local.l2_lambda, opt);
  EXPECT_EQ(m.theta(), fit.x);
}

}  // namespace
}  // namespace fpfed
