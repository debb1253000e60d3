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
#ifndef FPFED_EXPERIMENT_HPP_
#define FPFED_EXPERIMENT_HPP_

// In-memory experiment runner shared by the command-line driver and the
// acceptance harness: corpus -> features -> partition -> DP normalisation
// -> DP-FedAvg -> held-out AUPRC.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fpfed/catalog.hpp"
#include "fpfed/config.hpp"
#include "fpfed/dp.hpp"
#include "fpfed/eval.hpp"
#include "fpfed/features.hpp"
#include "fpfed/fedavg.hpp"
#include "fpfed/fednorm.hpp"
#include "fpfed/heuristics.hpp"
#include "fpfed/model.hpp"
#include "fpfed/partition.hpp"
#include "fpfed/synthgen.hpp"

namespace fpfed {

// Extracted train/test matrices over the full catalog plus the browsing
// structure of the training side.
struct PreparedData {
  const FeatureCatalog* catalog = nullptr;
  FeatureMatrix train;
  FeatureMatrix test;
  DomainCorpus corpus;  // training domain -> training row indices
  DomainRanking ranking;
};

// Incremental builder; labels always come from the ground-truth heuristics.
class PreparedDataBuilder {
 public:
  explicit PreparedDataBuilder(const FeatureCatalog& catalog) : extractor_(catalog) {
    data_.catalog = &catalog;
    data_.train = FeatureMatrix(catalog.slot_count());
    data_.test = FeatureMatrix(catalog.slot_count());
  }

  void add(const ScriptTrace& trace, Split split) {
    const auto entries = extractor_.extract_sparse(trace);
    const LabelSet labels = heuristics::label(trace);
    if (split == Split::kTrain) {
      data_.corpus.add(trace.source_domain, static_cast<std::uint32_t>(data_.train.rows()));
      data_.train.add_row(entries, labels);
    } else {
      data_.test.add_row(entries, labels);
    }
  }

  PreparedData finish(DomainRanking ranking) && {
    for (const auto& d : ranking.domains()) data_.corpus.add_domain(d);
    data_.ranking = std::move(ranking);
    return std::move(data_);
  }

 private:
  FeatureExtractor extractor_;
  PreparedData data_;
};

inline PreparedData prepare_synthetic(const GeneratorConfig& cfg, const FeatureCatalog& catalog,
                                      GenerationSummary* summary = nullptr) {
  ScriptGenerator gen(cfg, catalog);
  PreparedDataBuilder b(catalog);
  std::vector<std::string> train_domains;
  std::size_t last_domain = static_cast<std::size_t>(-1);
  auto s = gen.for_each([&](GeneratedScript&& g) {
    if (g.split == Split::kTrain && g.domain_index != last_domain) {
      train_domains.push_back(g.script.trace.source_domain);
      last_domain = g.domain_index;
    }
    b.add(g.script.trace, g.split);
  });
  if (summary) *summary = s;
  return std::move(b).finish(DomainRanking(std::move(train_domains)));
}

// Train/test matrices restricted to one feature set.
struct FeatureView {
  std::string name;
  FeatureMask mask;
  FeatureMatrix train;
  FeatureMatrix test;
};

inline FeatureView make_view(const PreparedData& data, const std::string& name,
                             const FeatureMask& mask) {
  FeatureView v;
  v.name = name;
  v.mask = mask;
  v.train = data.train.project(mask);
  v.test = data.test.project(mask);
  return v;
}

inline FeatureView make_view(const PreparedData& data, const std::string& feature_set) {
  if (!data.catalog->has_set(feature_set)) {
    throw ConfigError("feature_set", "unknown feature set: " + feature_set);
  }
  return make_view(data, feature_set, data.catalog->mask(feature_set));
}

inline double test_auprc(const LogisticModel& model, const FeatureMatrix& test,
                         const AffineNormalizer* normalizer) {
  const Dataset d = Dataset::all_rows(test, normalizer);
  const auto scores = predict_rows(model, d);
  // std::vector<bool> is not contiguous, so labels go through a plain array.
  std::unique_ptr<bool[]> labels(new bool[test.rows()]);
  for (std::size_t r = 0; r < test.rows(); ++r) labels[r] = test.label(r);
  return auprc(scores, std::span<const bool>(labels.get(), test.rows()));
}

inline LocalUpdateConfig local_config(const TrainingConfig& t) {
  LocalUpdateConfig l;
  l.epochs = t.epochs;
  l.clip = t.clip;
  l.l2_lambda = t.l2_lambda;
  l.optimizer.history = t.history;
  l.optimizer.max_iterations = t.max_iterations;
  l.optimizer.gradient_tolerance = t.gradient_tolerance;
  return l;
}

inline PartitionConfig partition_config(const ExperimentConfig& cfg, std::uint64_t seed) {
  PartitionConfig p = cfg.partition;
  p.seed = derive_seed(seed, "partition");
  return p;
}

// Clip bound used when a run is non-private: clipping only bounds DP
// sensitivity, so without noise it is switched off.
inline constexpr double kNoClip = std::numeric_limits<double>::max();

// Noise plan for one run: calibrated noise multipliers, sampling rate and the
// effective clip bounds.
struct PrivacyPlan {
  double q = 1.0;
  double z_norm = 0.0;
  double z_train = 0.0;
  std::size_t norm_queries = 0;
  double clip = kNoClip;
  double clip_mu = kNoClip;
  double clip_var = kNoClip;
};

inline PrivacyPlan plan_privacy(const ExperimentConfig& cfg, std::size_t dim) {
  PrivacyPlan p;
  p.q = cfg.training.q_for(cfg.partition.participants);
  p.norm_queries = cfg.normalization.enabled ? 2 * dim : 0;
  if (std::isinf(cfg.privacy.epsilon)) return p;
  p.clip = cfg.training.clip;
  p.clip_mu = cfg.normalization.clip_mu;
  p.clip_var = cfg.normalization.clip_var;
  std::vector<dp::QueryGroup> norm_plan;
  if (cfg.normalization.enabled) {
    norm_plan.push_back({"fednorm", p.q, static_cast<std::int64_t>(p.norm_queries)});
  }
  const std::vector<dp::QueryGroup> train_plan = {
      {"fedavg", p.q, static_cast<std::int64_t>(cfg.training.rounds)}};
  const auto split = dp::calibrate_split(cfg.privacy.epsilon, cfg.privacy.delta, norm_plan,
                                         train_plan, cfg.privacy.norm_fraction);
  p.z_norm = split.z_norm;
  p.z_train = split.z_train;
  return p;
}

struct RunOutcome {
  double auprc_final = 0.0;
  double auprc_best = 0.0;
  std::optional<std::size_t> best_round;
  TrainResult training;
  std::optional<NormStats> stats;
  AffineNormalizer normalizer;
  PrivacyPlan privacy;
  dp::PrivacyLedger ledger;
  double epsilon_spent = dp::kInf;  // inf when no noise was added
};

inline double spent_epsilon(const dp::PrivacyLedger& ledger, const PrivacyPlan& plan,
                            double delta) {
  if (ledger.empty() || plan.z_train <= 0.0) return dp::kInf;
  return dp::compose_and_convert(ledger, delta);
}

inline TrainingRunConfig training_run_config(const ExperimentConfig& cfg, const PrivacyPlan& plan,
                                             std::uint64_t seed) {
  TrainingRunConfig t;
  t.rounds = cfg.training.rounds;
  t.sampling_q = plan.q;
  t.noise_z = plan.z_train;
  t.local = local_config(cfg.training);
  t.local.clip = plan.clip;
  t.feature_set = cfg.feature_set;
  t.seed = derive_seed(seed, "train");
  t.workers = cfg.workers;
  return t;
}

// Normalisation stage over a partition; empty normaliser when disabled.
inline std::optional<NormStats> run_normalization(const Partition& partition,
                                                  const ExperimentConfig& cfg,
                                                  const PrivacyPlan& plan, std::uint64_t seed,
                                                  dp::PrivacyLedger& ledger) {
  if (!cfg.normalization.enabled) return std::nullopt;
  Rng rng = make_rng(seed, "fednorm");
  return dp_fed_norm(partition, partition.matrix().cols(), plan.q, plan.z_norm,
                     plan.clip_mu, plan.clip_var, rng, ledger,
                     cfg.normalization.variance_floor);
}

// Full federated run on a prepared view. `seed` drives partitioning,
// sampling and noise.
inline RunOutcome run_federated(const PreparedData& data, const FeatureView& view,
                                const ExperimentConfig& cfg, std::uint64_t seed) {
  Partition partition(view.train, data.corpus, data.ranking, partition_config(cfg, seed));
  RunOutcome out;
  out.privacy = plan_privacy(cfg, view.mask.size());
  out.stats = run_normalization(partition, cfg, out.privacy, seed, out.ledger);
  if (out.stats) out.normalizer = make_normalizer(*out.stats, cfg.normalization.mode,
                                                  cfg.normalization.variance_floor);
  const AffineNormalizer* norm = out.stats ? &out.normalizer : nullptr;
  const auto run_cfg = training_run_config(cfg, out.privacy, seed);
  RoundEvaluator evaluate = [&](const LogisticModel& m) { return test_auprc(m, view.test, norm); };
  out.training = train(partition, view.mask.size(), norm, run_cfg, out.ledger, evaluate,
                       cfg.training.eval_every);
  out.auprc_final = test_auprc(out.training.model, view.test, norm);
  out.best_round = out.training.best_round;
  out.auprc_best = out.best_round ? test_auprc(out.training.best_model, view.test, norm)
                                  : out.auprc_final;
  out.epsilon_spent = spent_epsilon(out.ledger, out.privacy, cfg.privacy.delta);
  return out;
}

// Centralised baseline on the given training rows: exact normalisation over
// those rows and the optimiser budget of the federated run.
inline double run_centralized_rows(const FeatureView& view, std::vector<std::uint32_t> rows,
                                   const ExperimentConfig& cfg,
                                   LogisticModel* model_out = nullptr) {
  Dataset pooled{&view.train, std::move(rows), nullptr};
  std::optional<AffineNormalizer> norm;
  if (cfg.normalization.enabled) {
    norm = make_normalizer(exact_stats(pooled, cfg.normalization.variance_floor),
                           cfg.normalization.mode, cfg.normalization.variance_floor);
    pooled.normalizer = &*norm;
  }
  TrainingRunConfig t;
  t.rounds = cfg.training.rounds;
  t.local = local_config(cfg.training);
  const auto model = train_centralized(pooled, t);
  if (model_out) *model_out = model;
  return test_auprc(model, view.test, norm ? &*norm : nullptr);
}

// Centralised baseline over every training script.
inline double run_centralized(const FeatureView& view, const ExperimentConfig& cfg,
                              LogisticModel* model_out = nullptr) {
  return run_centralized_rows(view, Dataset::all_rows(view.train).rows, cfg, model_out);
}

// Union of all participants' scripts for the partition of `cfg` at `seed`.
inline std::vector<std::uint32_t> pooled_participant_rows(const PreparedData& data,
                                                          const FeatureView& view,
                                                          const ExperimentConfig& cfg,
                                                          std::uint64_t seed) {
  Partition partition(view.train, data.corpus, data.ranking, partition_config(cfg, seed));
  std::vector<std::uint32_t> rows;
  for (std::size_t k = 0; k < partition.size(); ++k) {
    const auto p = partition.participant(k);
    rows.insert(rows.end(), p.rows.begin(), p.rows.end());
  }
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  return rows;
}

// Centralised baseline that sees exactly the data the federation holds.
inline double run_centralized_pooled(const PreparedData& data, const FeatureView& view,
                                     const ExperimentConfig& cfg, std::uint64_t seed) {
  return run_centralized_rows(view, pooled_participant_rows(data, view, cfg, seed), cfg);
}

// Non-IIDness of the partition described by `cfg` at `seed`.
inline double partition_non_iidness(const PreparedData& data, const ExperimentConfig& cfg,
                                    std::uint64_t seed, std::size_t sample_size = 200) {
  Partition partition(data.train, data.corpus, data.ranking, partition_config(cfg, seed));
  Rng rng = make_rng(seed, "non-iid-sample");
  return non_iidness_score(partition, sample_size, rng);
}

// Feature ranking from a non-private model trained on the All set with
// exact normalisation; importance is |w| in the normalised space.
inline std::vector<std::uint32_t> importance_ranking(const PreparedData& data,
                                                     const ExperimentConfig& cfg) {
  const auto view = make_view(data, "All");
  ExperimentConfig c = cfg;
  c.normalization.enabled = true;
  LogisticModel m;
  run_centralized(view, c, &m);
  return ranking_to_slots(feature_importance(m.weights), view.mask);
}

// High Entropy plus the top `k_api` API-count slots and the top `k_custom`
// custom slots of a ranking.
inline FeatureMask ext_high_entropy_mask(const FeatureCatalog& catalog,
                                         std::span<const std::uint32_t> ranking,
                                         std::size_t k_api, std::size_t k_custom) {
  std::vector<std::uint32_t> api, custom;
  for (auto s : ranking) {
    if (catalog.is_api_count_slot(s)) {
      api.push_back(s);
    } else {
      custom.push_back(s);
    }
  }
  FeatureMask m = build_ext_high_entropy(catalog, api, k_api);
  if (k_custom > 0) {
    if (custom.size() < k_custom) throw InvalidInput("ranking has too few custom slots");
    custom.resize(k_custom);
    m = m | FeatureMask(std::move(custom));
  }
  return m;
}

}  // namespace fpfed

#endif  // FPFED_EXPERIMENT_HPP_
