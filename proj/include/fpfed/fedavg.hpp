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
#ifndef FPFED_FEDAVG_HPP_
#define FPFED_FEDAVG_HPP_

// DP-FedAvg round loop: Poisson participant sampling, clipped local
// updates, aggregation with the fixed 1/(qW) denominator and Gaussian
// noise on the aggregate.

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fpfed/dp.hpp"
#include "fpfed/error.hpp"
#include "fpfed/fednorm.hpp"
#include "fpfed/model.hpp"
#include "fpfed/random.hpp"

namespace fpfed {

struct TrainingRunConfig {
  std::size_t rounds = 20;
  double sampling_q = 1.0;
  double noise_z = 0.0;
  LocalUpdateConfig local;
  std::string feature_set = "All";
  std::uint64_t seed = 0;
  std::size_t workers = 1;

  void validate(std::size_t participants) const {
    if (rounds < 1) throw InvalidInput("rounds must be >= 1");
    if (!(sampling_q > 0.0 && sampling_q <= 1.0)) throw InvalidInput("q must lie in (0,1]");
    if (noise_z < 0.0) throw InvalidInput("noise scale must be >= 0");
    if (participants < 1) throw InvalidInput("need at least one participant");
    if (sampling_q * static_cast<double>(participants) < 1.0) {
      throw InvalidInput("q*W must be >= 1");
    }
    local.validate();
  }
};

struct RoundRecord {
  std::size_t round = 0;
  std::size_t sampled = 0;
  double aggregate_norm = 0.0;  // |(1/qW) sum delta| before noise
  double theta_norm = 0.0;      // |theta| after the update
  std::optional<double> auprc;
};

namespace fedavg_detail {

inline double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace fedavg_detail

// One DP-FedAvg round. Deltas are summed in participant-id order so the
// result does not depend on worker scheduling.
template <ParticipantSource P>
std::vector<double> run_round(std::span<const double> theta_global, const P& participants,
                              const AffineNormalizer* normalizer, const TrainingRunConfig& cfg,
                              Rng& rng, dp::PrivacyLedger& ledger, RoundRecord* record = nullptr) {
  const std::size_t w = participants.size();
  const double denom = cfg.sampling_q * static_cast<double>(w);
  const double sigma = dp::noise_stddev(cfg.noise_z, cfg.local.clip, cfg.sampling_q,
                                        static_cast<double>(w));
  const auto sampled = poisson_sample(rng, w, cfg.sampling_q);

  std::vector<std::vector<double>> deltas(sampled.size());
  parallel_for(sampled.size(), cfg.workers, [&](std::size_t i) {
    Dataset d = participants.dataset(sampled[i]);
    d.normalizer = normalizer;
    deltas[i] = local_update(d, theta_global, cfg.local);
  });

  std::vector<double> aggregate(theta_global.size(), 0.0);
  for (const auto& delta : deltas) {
    for (std::size_t j = 0; j < aggregate.size(); ++j) aggregate[j] += delta[j];
  }
  for (double& x : aggregate) x /= denom;

  std::vector<double> next(theta_global.begin(), theta_global.end());
  for (std::size_t j = 0; j < next.size(); ++j) next[j] += aggregate[j];
  if (sigma > 0.0) {
    const auto noise = dp::gaussian_noise(sigma, next.size(), rng);
    for (std::size_t j = 0; j < next.size(); ++j) next[j] += noise[j];
  }
  ledger.charge("fedavg", cfg.sampling_q, cfg.noise_z, 1);
  if (record) {
    record->sampled = sampled.size();
    record->aggregate_norm = fedavg_detail::norm2(aggregate);
    record->theta_norm = fedavg_detail::norm2(next);
  }
  return next;
}

struct TrainResult {
  LogisticModel model;            // final-round model
  std::vector<RoundRecord> records;
  std::optional<std::size_t> best_round;  // by evaluated AUPRC, if any
  LogisticModel best_model;
};

// Evaluation hook: returns the held-out AUPRC of a model (no privacy cost).
using RoundEvaluator = std::function<double(const LogisticModel&)>;

// R rounds of DP-FedAvg from theta_0 = 0. `dim` is the feature dimension.
template <ParticipantSource P>
TrainResult train(const P& participants, std::size_t dim, const AffineNormalizer* normalizer,
                  const TrainingRunConfig& cfg, dp::PrivacyLedger& ledger,
                  const RoundEvaluator& evaluate = {}, std::size_t eval_every = 1) {
  cfg.validate(participants.size());
  Rng rng = make_rng(cfg.seed, "fedavg");
  std::vector<double> theta(dim + 1, 0.0);
  TrainResult out;
  out.best_model = LogisticModel(dim);
  double best = -1.0;
  for (std::size_t r = 1; r <= cfg.rounds; ++r) {
    RoundRecord rec;
    rec.round = r;
    theta = run_round(theta, participants, normalizer, cfg, rng, ledger, &rec);
    if (evaluate && eval_every > 0 && (r % eval_every == 0 || r == cfg.rounds)) {
      auto m = LogisticModel::from_theta(theta);
      rec.auprc = evaluate(m);
      if (*rec.auprc > best) {
        best = *rec.auprc;
        out.best_round = r;
        out.best_model = m;
      }
    }
    out.records.push_back(rec);
  }
  out.model = LogisticModel::from_theta(theta);
  return out;
}

// Pooled-data baseline with the optimiser budget of a full federated run.
inline LogisticModel train_centralized(const Dataset& pooled, const TrainingRunConfig& cfg) {
  LbfgsConfig opt = cfg.local.optimizer;
  opt.max_iterations = cfg.local.optimizer.max_iterations * cfg.rounds * cfg.local.epochs;
  auto fit = lbfgs_fit(std::vector<double>(pooled.dim() + 1, 0.0), pooled, cfg.local.l2_lambda, opt);
  return LogisticModel::from_theta(fit.x);
}

}  // namespace fpfed

#endif  // FPFED_FEDAVG_HPP_
