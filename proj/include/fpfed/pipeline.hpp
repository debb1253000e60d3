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
#ifndef FPFED_PIPELINE_HPP_
#define FPFED_PIPELINE_HPP_

// File-backed pipeline stages (generate, partition, train, evaluate,
// account) and the sweep recipes. Every stage is a pure function of its
// config, seed and upstream artifacts, so re-running it rewrites identical
// bytes.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "fpfed/config.hpp"
#include "fpfed/error.hpp"
#include "fpfed/eval.hpp"
#include "fpfed/experiment.hpp"

namespace fpfed {

namespace artifact {
inline constexpr const char* kGeneration = "generation.json";
inline constexpr const char* kTrainTraces = "train.traces";
inline constexpr const char* kTestTraces = "test.traces";
inline constexpr const char* kRanking = "ranking.txt";
inline constexpr const char* kPartition = "partition.json";
inline constexpr const char* kModel = "model.json";
inline constexpr const char* kNormStats = "norm_stats.json";
inline constexpr const char* kRounds = "rounds.csv";
inline constexpr const char* kLedger = "ledger.json";
inline constexpr const char* kMetrics = "metrics.json";
inline constexpr const char* kPrCurve = "pr_curve.csv";
inline constexpr const char* kPrivacy = "privacy.json";
}  // namespace artifact

// Resolved configuration of one invocation plus where its artifacts live.
struct StageContext {
  ExperimentConfig config;
  std::string out_dir;
  std::uint64_t seed = 0;  // run seed for partition/train
  const FeatureCatalog* catalog = nullptr;
  std::ostream* log = nullptr;  // optional progress/result lines

  std::string path(const char* name) const {
    return (std::filesystem::path(out_dir) / name).string();
  }
};

namespace pipeline_detail {

inline void require(const StageContext& ctx, const char* name, const char* stage) {
  if (!std::filesystem::exists(ctx.path(name))) {
    throw StageDependencyError(std::string("missing ") + name + " in " + ctx.out_dir + "; run '" +
                               stage + "' first");
  }
}

inline Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, path + ": " + e.what());
  }
}

inline void write_json(const std::string& path, const Json& j) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(1) << '\n';
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  return out;
}

inline void say(const StageContext& ctx, const std::string& line) {
  if (ctx.log) *ctx.log << line << '\n';
}

// The corpus on disk must come from the generator config in force now.
inline void check_generation(const StageContext& ctx) {
  require(ctx, artifact::kGeneration, "generate");
  const Json g = read_json(ctx.path(artifact::kGeneration));
  const Json want = generator_config_json(ctx.config.generator);
  if (!g.contains("generator") || g["generator"].dump() != Json(want).dump()) {
    throw StageDependencyError("corpus in " + ctx.out_dir +
                               " was generated with a different generator config; "
                               "re-run 'generate'");
  }
  if (g.value("catalog_digest", std::string()) != trace_json::hex16(ctx.catalog->digest())) {
    throw StageDependencyError("corpus in " + ctx.out_dir + " was built for another catalog");
  }
}

inline Json partition_fingerprint(const ExperimentConfig& cfg, std::uint64_t seed) {
  const PartitionConfig p = partition_config(cfg, seed);
  return Json{{"participants", p.participants},
              {"domains_per_participant", p.domains_per_participant},
              {"zipf_exponent", p.zipf_exponent},
              {"limited_knowledge_fraction", p.limited_knowledge_fraction},
              {"seed", p.seed}};
}

// Reloads the corpus written by the generate stage. Rows are added in file
// order, which is generation order, so the result matches the in-memory
// path used by sweeps.
inline PreparedData load_prepared(const StageContext& ctx, bool with_test) {
  check_generation(ctx);
  require(ctx, artifact::kTrainTraces, "generate");
  require(ctx, artifact::kRanking, "generate");
  PreparedDataBuilder b(*ctx.catalog);
  {
    std::ifstream in(ctx.path(artifact::kTrainTraces));
    for (const auto& t : read_traces(in)) b.add(t, Split::kTrain);
  }
  if (with_test) {
    require(ctx, artifact::kTestTraces, "generate");
    std::ifstream in(ctx.path(artifact::kTestTraces));
    for (const auto& t : read_traces(in)) b.add(t, Split::kTest);
  }
  return std::move(b).finish(load_ranking(ctx.path(artifact::kRanking)));
}

inline Json ledger_json(const dp::PrivacyLedger& ledger) {
  Json arr = Json::array();
  for (const auto& e : ledger.query_log()) {
    arr.push_back({{"mechanism", e.mechanism}, {"q", e.q}, {"z", e.z}, {"count", e.count}});
  }
  return arr;
}

}  // namespace pipeline_detail

// --- stages ----------------------------------------------------------------

// Writes train/test trace files, the training-domain ranking and a manifest
// with the generator parameters and summary counts.
inline void stage_generate(const StageContext& ctx) {
  using namespace pipeline_detail;
  std::filesystem::create_directories(ctx.out_dir);
  ScriptGenerator gen(ctx.config.generator, *ctx.catalog);
  auto train = open_out(ctx.path(artifact::kTrainTraces));
  auto test = open_out(ctx.path(artifact::kTestTraces));
  std::vector<std::string> train_domains;
  std::size_t last = static_cast<std::size_t>(-1);
  const auto summary = gen.for_each([&](GeneratedScript&& g) {
    if (g.split == Split::kTrain && g.domain_index != last) {
      train_domains.push_back(g.script.trace.source_domain);
      last = g.domain_index;
    }
    (g.split == Split::kTrain ? train : test) << format_trace_line(g.script.trace) << '\n';
  });
  if (!train || !test) throw IoError("failed writing trace files in " + ctx.out_dir);
  save_ranking(DomainRanking(std::move(train_domains)), ctx.path(artifact::kRanking));
  Json j;
  j["format"] = "fpfed-generation/1";
  j["catalog_digest"] = trace_json::hex16(ctx.catalog->digest());
  j["generator"] = generator_config_json(ctx.config.generator);
  j["summary"] = generation_summary_json(summary);
  j["config"] = to_json(ctx.config);
  write_json(ctx.path(artifact::kGeneration), j);
  say(ctx, "generated " + std::to_string(summary.scripts) + " scripts (" +
               std::to_string(summary.fingerprinting) + " fingerprinting)");
}

// Writes the partition manifest. Participant lists are included up to
// `kManifestListLimit` participants; beyond that only the parameters and
// a sample non-IIDness score are recorded.
inline constexpr std::size_t kManifestListLimit = 1000;

inline void stage_partition(const StageContext& ctx) {
  using namespace pipeline_detail;
  const PreparedData data = load_prepared(ctx, false);
  Partition partition(data.train, data.corpus, data.ranking, partition_config(ctx.config, ctx.seed));
  const std::string tmp = ctx.path(artifact::kPartition) + ".part";
  partition.write_manifest(tmp, partition.size() <= kManifestListLimit);
  Json j = read_json(tmp);
  std::filesystem::remove(tmp);
  Json out;
  out["format"] = "fpfed-partition/1";
  out["run_seed"] = ctx.seed;
  out["fingerprint"] = partition_fingerprint(ctx.config, ctx.seed);
  Rng rng = make_rng(ctx.seed, "non-iid-sample");
  // The score needs two participants holding fingerprinting scripts; small
  // partitions record null instead.
  try {
    out["non_iidness"] =
        non_iidness_score(partition, std::min<std::size_t>(200, partition.size()), rng);
  } catch (const InsufficientData&) {
    out["non_iidness"] = nullptr;
  }
  out["config"] = to_json(ctx.config);
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() != "format") out[it.key()] = it.value();
  }
  write_json(ctx.path(artifact::kPartition), out);
  say(ctx, "partitioned into " + std::to_string(partition.size()) + " participants");
}

// Trains on the partition and writes the checkpoint, normalisation
// statistics, per-round records and the privacy ledger.
inline RunOutcome stage_train(const StageContext& ctx) {
  using namespace pipeline_detail;
  require(ctx, artifact::kPartition, "partition");
  const Json part = read_json(ctx.path(artifact::kPartition));
  if (!part.contains("fingerprint") ||
      part["fingerprint"].dump() != partition_fingerprint(ctx.config, ctx.seed).dump()) {
    throw StageDependencyError("partition manifest in " + ctx.out_dir +
                               " does not match the current config and seed; re-run 'partition'");
  }
  const PreparedData data = load_prepared(ctx, true);
  const FeatureView view = make_view(data, ctx.config.feature_set);
  RunOutcome out = run_federated(data, view, ctx.config, ctx.seed);

  Checkpoint c;
  c.model = out.training.model;
  c.feature_set = ctx.config.feature_set;
  c.catalog_digest = ctx.catalog->digest();
  save_checkpoint(c, ctx.path(artifact::kModel));
  if (out.stats) {
    save_norm_stats(*out.stats, ctx.path(artifact::kNormStats));
  } else {
    std::filesystem::remove(ctx.path(artifact::kNormStats));
  }
  auto rounds = open_out(ctx.path(artifact::kRounds));
  rounds << "round,sampled,aggregate_norm,theta_norm,auprc\n";
  for (const auto& r : out.training.records) {
    rounds << r.round << ',' << r.sampled << ',' << format_number(r.aggregate_norm) << ','
           << format_number(r.theta_norm) << ',' << (r.auprc ? format_number(*r.auprc) : "")
           << '\n';
  }
  Json l;
  l["format"] = "fpfed-ledger/1";
  l["target_epsilon"] = epsilon_json(ctx.config.privacy.epsilon);
  l["delta"] = ctx.config.privacy.delta;
  l["z_norm"] = out.privacy.z_norm;
  l["z_train"] = out.privacy.z_train;
  l["sampling_q"] = out.privacy.q;
  l["queries"] = ledger_json(out.ledger);
  l["config"] = to_json(ctx.config);
  write_json(ctx.path(artifact::kLedger), l);
  say(ctx, "trained " + std::to_string(out.training.records.size()) + " rounds, final AUPRC " +
               format_number(out.auprc_final));
  return out;
}

// Scores the held-out split with the stored checkpoint.
inline double stage_evaluate(const StageContext& ctx) {
  using namespace pipeline_detail;
  require(ctx, artifact::kModel, "train");
  const Checkpoint c = load_checkpoint(ctx.path(artifact::kModel));
  if (c.catalog_digest != ctx.catalog->digest()) {
    throw StageDependencyError("checkpoint was trained against another catalog");
  }
  if (c.feature_set != ctx.config.feature_set) {
    throw StageDependencyError("checkpoint feature set '" + c.feature_set +
                               "' differs from config feature set '" + ctx.config.feature_set + "'");
  }
  check_generation(ctx);
  require(ctx, artifact::kTestTraces, "generate");
  const FeatureMask mask = ctx.catalog->mask(c.feature_set);
  if (mask.size() != c.model.dim()) throw StageDependencyError("checkpoint dimension mismatch");
  FeatureExtractor ex(*ctx.catalog);
  FeatureMatrix test(ctx.catalog->slot_count());
  {
    std::ifstream in(ctx.path(artifact::kTestTraces));
    for (const auto& t : read_traces(in)) test.add_row(ex.extract_sparse(t), heuristics::label(t));
  }
  test = test.project(mask);
  std::optional<AffineNormalizer> norm;
  if (ctx.config.normalization.enabled) {
    require(ctx, artifact::kNormStats, "train");
    norm = make_normalizer(load_norm_stats(ctx.path(artifact::kNormStats)),
                           ctx.config.normalization.mode, ctx.config.normalization.variance_floor);
  }
  const Dataset d = Dataset::all_rows(test, norm ? &*norm : nullptr);
  const auto scores = predict_rows(c.model, d);
  std::unique_ptr<bool[]> labels(new bool[test.rows()]);
  std::size_t positives = 0;
  for (std::size_t r = 0; r < test.rows(); ++r) {
    labels[r] = test.label(r);
    positives += labels[r] ? 1 : 0;
  }
  const auto curve = pr_curve(scores, std::span<const bool>(labels.get(), test.rows()));
  const double value = auprc(curve);
  auto pr = open_out(ctx.path(artifact::kPrCurve));
  pr << "threshold,precision,recall\n";
  for (const auto& p : curve.points) {
    pr << format_number(p.threshold) << ',' << format_number(p.precision) << ','
       << format_number(p.recall) << '\n';
  }
  Json m;
  m["format"] = "fpfed-metrics/1";
  m["auprc"] = value;
  m["test_scripts"] = test.rows();
  m["test_positives"] = positives;
  m["feature_set"] = c.feature_set;
  m["run_seed"] = ctx.seed;
  m["config"] = to_json(ctx.config);
  write_json(ctx.path(artifact::kMetrics), m);
  say(ctx, "AUPRC " + format_number(value));
  return value;
}

// Replays the training ledger through the accountant.
inline double stage_account(const StageContext& ctx) {
  using namespace pipeline_detail;
  require(ctx, artifact::kLedger, "train");
  const Json l = read_json(ctx.path(artifact::kLedger));
  dp::PrivacyLedger ledger;
  bool noisy = false;
  try {
    for (const auto& e : l.at("queries")) {
      const double z = e.at("z").get<double>();
      noisy = noisy || z > 0.0;
      ledger.charge(e.at("mechanism").get<std::string>(), e.at("q").get<double>(), z,
                    e.at("count").get<std::int64_t>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, std::string("ledger: ") + e.what());
  }
  const double delta = ctx.config.privacy.delta;
  Json p;
  p["format"] = "fpfed-privacy/1";
  p["delta"] = delta;
  p["target_epsilon"] = epsilon_json(ctx.config.privacy.epsilon);
  double eps = dp::kInf;
  if (noisy) {
    const auto report = dp::epsilon_at(ledger.orders(), ledger.accumulated_rdp(), delta);
    eps = report.epsilon;
    p["best_order"] = report.order;
  }
  p["epsilon"] = epsilon_json(eps);
  Json counts = Json::object();
  for (const auto& e : ledger.query_log()) {
    counts[e.mechanism] = ledger.count(e.mechanism);
  }
  p["queries"] = counts;
  p["z_norm"] = l.value("z_norm", 0.0);
  p["z_train"] = l.value("z_train", 0.0);
  p["config"] = to_json(ctx.config);
  write_json(ctx.path(artifact::kPrivacy), p);
  say(ctx, "epsilon " + format_epsilon(eps) + " at delta " + format_epsilon(delta));
  return eps;
}

// --- sweeps ----------------------------------------------------------------

inline const std::vector<std::string>& sweep_recipes() {
  static const std::vector<std::string> r = {"participants",       "epsilon",
                                             "feature_sets",       "ext_high_entropy",
                                             "feat_norm_ablation", "non_iid"};
  return r;
}

struct SweepJob {
  ExperimentConfig cfg;
  std::string view;  // key into the view table
  std::uint64_t seed = 0;
  RunRecord record;  // filled except for auprc
  bool non_iidness = false;
};

struct SweepResult {
  RunRecord record;
  double non_iidness = 0.0;
};

// Runs jobs on a bounded pool; results keep job order, so output does not
// depend on the worker count.
inline std::vector<SweepResult> run_jobs(const PreparedData& data,
                                         const std::map<std::string, FeatureView>& views,
                                         const std::vector<SweepJob>& jobs, std::size_t workers,
                                         std::ostream* log) {
  std::vector<SweepResult> out(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mu;
  std::exception_ptr error;
  auto work = [&] {
    while (true) {
      const std::size_t i = next++;
      if (i >= jobs.size()) return;
      try {
        const auto& job = jobs[i];
        SweepResult r;
        r.record = job.record;
        r.record.seed = job.seed;
        r.record.auprc = run_federated(data, views.at(job.view), job.cfg, job.seed).auprc_final;
        if (job.non_iidness) r.non_iidness = partition_non_iidness(data, job.cfg, job.seed);
        out[i] = r;
        if (log) {
          std::lock_guard<std::mutex> lock(log_mu);
          *log << "[" << (i + 1) << "/" << jobs.size() << "] " << r.record.feature_set
               << " W=" << r.record.participants << " eps=" << format_epsilon(r.record.epsilon)
               << (r.record.variant.empty() ? "" : " " + r.record.variant)
               << " seed=" << r.record.seed << " AUPRC=" << format_number(r.record.auprc)
               << '\n';
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(log_mu);
        if (!error) error = std::current_exception();
        next = jobs.size();
      }
    }
  };
  const std::size_t n = std::max<std::size_t>(1, std::min(workers, jobs.size()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

inline void write_runs_csv(std::ostream& out, const std::vector<SweepResult>& results,
                           bool with_non_iid) {
  out << "feature_set,variant,participants,epsilon,x,seed,auprc";
  if (with_non_iid) out << ",non_iidness";
  out << '\n';
  for (const auto& r : results) {
    const auto& rec = r.record;
    out << rec.feature_set << ',' << rec.variant << ',' << rec.participants << ','
        << format_epsilon(rec.epsilon) << ',' << format_number(rec.x) << ',' << rec.seed << ','
        << format_number(rec.auprc);
    if (with_non_iid) out << ',' << format_number(r.non_iidness);
    out << '\n';
  }
}

// Mean non-IIDness per limited-knowledge fraction and its ratio to the
// fraction-0 (IID) mean.
inline void write_non_iid_csv(std::ostream& out, const std::vector<SweepResult>& results) {
  std::map<double, std::pair<double, double>> by_x;  // x -> (sum, count)
  std::map<double, std::pair<double, double>> ap_by_x;
  for (const auto& r : results) {
    by_x[r.record.x].first += r.non_iidness;
    by_x[r.record.x].second += 1;
    ap_by_x[r.record.x].first += r.record.auprc;
    ap_by_x[r.record.x].second += 1;
  }
  out << "limited_knowledge_fraction,mean_non_iidness,ratio_to_iid,mean_auprc\n";
  const double base = by_x.empty() ? 0.0 : by_x.begin()->second.first / by_x.begin()->second.second;
  for (const auto& [x, s] : by_x) {
    const double mean = s.first / s.second;
    out << format_number(x) << ',' << format_number(mean) << ','
        << (base > 0.0 ? format_number(mean / base) : std::string("nan")) << ','
        << format_number(ap_by_x[x].first / ap_by_x[x].second) << '\n';
  }
}

// Builds the job list of `recipe` from the base config.
inline std::vector<SweepJob> recipe_jobs(const std::string& recipe, const ExperimentConfig& base,
                                         std::vector<std::string>* view_names) {
  std::vector<SweepJob> jobs;
  auto add = [&](ExperimentConfig cfg, const std::string& view, const std::string& variant,
                 double x, bool non_iid = false) {
    cfg.workers = 1;
    for (auto seed : base.seeds) {
      SweepJob j;
      j.cfg = cfg;
      j.view = view;
      j.seed = seed;
      j.record.participants = cfg.partition.participants;
      j.record.epsilon = cfg.privacy.epsilon;
      j.record.feature_set = view;
      j.record.variant = variant;
      j.record.x = x;
      j.non_iidness = non_iid;
      jobs.push_back(std::move(j));
    }
    if (std::find(view_names->begin(), view_names->end(), view) == view_names->end()) {
      view_names->push_back(view);
    }
  };
  const std::vector<double> eps_grid = {1.0, 5.0, 10.0, dp::kInf};
  if (recipe == "participants") {
    for (const auto& fs : builtin_feature_set_names()) {
      for (std::size_t w : {1, 10, 100, 1000}) {
        ExperimentConfig c = base;
        c.partition.participants = w;
        c.privacy.epsilon = dp::kInf;
        add(c, fs, "", static_cast<double>(w));
      }
    }
  } else if (recipe == "epsilon") {
    for (std::size_t w : {1000, 10000}) {
      for (double eps : eps_grid) {
        ExperimentConfig c = base;
        c.partition.participants = w;
        c.privacy.epsilon = eps;
        add(c, base.feature_set, "", eps);
      }
    }
  } else if (recipe == "feature_sets") {
    for (const auto& fs : builtin_feature_set_names()) {
      for (double eps : eps_grid) {
        ExperimentConfig c = base;
        c.privacy.epsilon = eps;
        add(c, fs, "", eps);
      }
    }
  } else if (recipe == "ext_high_entropy") {
    for (std::size_t k : {0, 5, 10, 17}) {
      for (std::size_t custom : {0, 23}) {
        add(base, "ext:" + std::to_string(k) + ":" + std::to_string(custom),
            "custom=" + std::to_string(custom), static_cast<double>(k));
      }
    }
  } else if (recipe == "feat_norm_ablation") {
    for (const std::string fs : {"HighEntropy", "All"}) {
      for (bool on : {true, false}) {
        for (double eps : eps_grid) {
          ExperimentConfig c = base;
          c.privacy.epsilon = eps;
          c.normalization.enabled = on;
          add(c, fs, on ? "norm=on" : "norm=off", eps);
        }
      }
    }
  } else if (recipe == "non_iid") {
    for (int i = 0; i <= 5; ++i) {
      ExperimentConfig c = base;
      c.partition.limited_knowledge_fraction = 0.2 * i;
      add(c, base.feature_set, "", 0.2 * i, true);
    }
  } else {
    throw ConfigError("recipe", "unknown sweep recipe: " + recipe);
  }
  return jobs;
}

// Runs one recipe over the config's seeds on an in-memory corpus and writes
// <recipe>_runs.csv, <recipe>_summary.csv, <recipe>_series.csv,
// <recipe>_grid.csv and <recipe>.json (config snapshot plus summary).
inline std::vector<SummaryRow> stage_sweep(const StageContext& ctx, const std::string& recipe) {
  using namespace pipeline_detail;
  std::vector<std::string> view_names;
  const auto jobs = recipe_jobs(recipe, ctx.config, &view_names);
  std::filesystem::create_directories(ctx.out_dir);
  const PreparedData data = prepare_synthetic(ctx.config.generator, *ctx.catalog);
  std::map<std::string, FeatureView> views;
  std::vector<std::uint32_t> ranking;
  for (const auto& name : view_names) {
    if (name.rfind("ext:", 0) == 0) {
      if (ranking.empty()) ranking = importance_ranking(data, ctx.config);
      const auto colon = name.find(':', 4);
      const std::size_t k = std::stoul(name.substr(4, colon - 4));
      const std::size_t custom = std::stoul(name.substr(colon + 1));
      views.emplace(name, make_view(data, name, ext_high_entropy_mask(*ctx.catalog, ranking, k, custom)));
    } else {
      views.emplace(name, make_view(data, name));
    }
  }
  const auto results = run_jobs(data, views, jobs, ctx.config.workers, ctx.log);
  std::vector<RunRecord> records;
  for (const auto& r : results) records.push_back(r.record);
  const auto rows = summarize_runs(records);
  const bool non_iid = recipe == "non_iid";
  auto file = [&](const std::string& suffix) { return ctx.path((recipe + suffix).c_str()); };
  {
    auto out = open_out(file("_runs.csv"));
    write_runs_csv(out, results, non_iid);
  }
  {
    auto out = open_out(file("_summary.csv"));
    write_summary_csv(out, rows);
  }
  {
    auto out = open_out(file("_grid.csv"));
    write_grid_csv(out, rows);
  }
  {
    const std::string x_name = recipe == "participants"       ? "participants"
                               : recipe == "ext_high_entropy" ? "added_api_features"
                               : non_iid                      ? "limited_knowledge_fraction"
                                                              : "epsilon";
    auto out = open_out(file("_series.csv"));
    write_series_csv(out, rows, x_name);
  }
  if (non_iid) {
    auto out = open_out(file("_non_iidness.csv"));
    write_non_iid_csv(out, results);
  }
  Json j;
  j["format"] = "fpfed-sweep/1";
  j["recipe"] = recipe;
  j["config"] = to_json(ctx.config);
  Json arr = Json::array();
  for (const auto& r : rows) {
    arr.push_back({{"feature_set", r.feature_set},
                   {"variant", r.variant},
                   {"participants", r.participants},
                   {"epsilon", epsilon_json(r.epsilon)},
                   {"x", r.x},
                   {"runs", r.runs},
                   {"mean_auprc", r.mean},
                   {"std_auprc", r.stddev}});
  }
  j["summary"] = std::move(arr);
  write_json(file(".json"), j);
  return rows;
}

}  // namespace fpfed

#endif  // FPFED_PIPELINE_HPP_
