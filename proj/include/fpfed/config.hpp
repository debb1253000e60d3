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
#ifndef FPFED_CONFIG_HPP_
#define FPFED_CONFIG_HPP_

// Experiment configuration: a JSON document with full defaulting. Every
// field is optional; unknown fields are rejected so typos surface early.
// Errors carry the dotted path of the offending field.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fpfed/dp.hpp"
#include "fpfed/error.hpp"
#include "fpfed/fedavg.hpp"
#include "fpfed/fednorm.hpp"
#include "fpfed/partition.hpp"
#include "fpfed/synthgen.hpp"

namespace fpfed {

using Json = nlohmann::ordered_json;

struct PrivacyConfig {
  double epsilon = dp::kInf;  // inf disables noise entirely
  double delta = dp::kDefaultDelta;
  double norm_fraction = 0.7;  // share of epsilon spent on normalisation
};

struct NormalizationConfig {
  bool enabled = true;
  NormMode mode = NormMode::kStd;
  double clip_mu = 1.0;
  double clip_var = 1.0;
  double variance_floor = 0.25;
};

struct TrainingConfig {
  std::size_t rounds = 20;
  double participants_per_round = 100.0;  // q = min(1, this / W)
  double sampling_q = 0.0;                // > 0 overrides the above
  std::size_t epochs = 1;
  double clip = 1.0;
  double l2_lambda = 1e-4;
  std::size_t max_iterations = 3;
  std::size_t history = 10;
  double gradient_tolerance = 1e-5;
  std::size_t eval_every = 1;

  double q_for(std::size_t participants) const {
    if (sampling_q > 0.0) return sampling_q;
    return std::min(1.0, participants_per_round / static_cast<double>(participants));
  }
};

struct ExperimentConfig {
  GeneratorConfig generator;
  PartitionConfig partition;
  PrivacyConfig privacy;
  NormalizationConfig normalization;
  TrainingConfig training;
  std::string feature_set = "All";
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  std::size_t workers = 1;
};

namespace config_detail {

inline std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

// Reads fields out of one JSON object, remembering which keys were used.
class Reader {
 public:
  Reader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const Json* raw(const std::string& key) {
    used_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string path(const std::string& key) const { return join(path_, key); }

  double number(const std::string& key, double dflt) {
    const Json* v = raw(key);
    if (!v) return dflt;
    if (!v->is_number()) throw ConfigError(path(key), "expected a number");
    const double x = v->get<double>();
    if (!std::isfinite(x)) throw ConfigError(path(key), "expected a finite number");
    return x;
  }

  // Accepts a number or the strings "inf" / "infinity".
  double extended_number(const std::string& key, double dflt) {
    const Json* v = raw(key);
    if (!v) return dflt;
    if (v->is_string()) {
      const auto s = v->get<std::string>();
      if (s == "inf" || s == "infinity" || s == "Infinity") return dp::kInf;
      throw ConfigError(path(key), "expected a number or \"inf\"");
    }
    if (!v->is_number()) throw ConfigError(path(key), "expected a number or \"inf\"");
    return v->get<double>();
  }

  std::uint64_t count(const std::string& key, std::uint64_t dflt) {
    const Json* v = raw(key);
    if (!v) return dflt;
    if (v->is_number_unsigned()) return v->get<std::uint64_t>();
    if (v->is_number_integer() && v->get<std::int64_t>() >= 0) return v->get<std::uint64_t>();
    throw ConfigError(path(key), "expected a non-negative integer");
  }

  bool boolean(const std::string& key, bool dflt) {
    const Json* v = raw(key);
    if (!v) return dflt;
    if (!v->is_boolean()) throw ConfigError(path(key), "expected true or false");
    return v->get<bool>();
  }

  std::string string(const std::string& key, const std::string& dflt) {
    const Json* v = raw(key);
    if (!v) return dflt;
    if (!v->is_string()) throw ConfigError(path(key), "expected a string");
    return v->get<std::string>();
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!used_.count(it.key())) throw ConfigError(path(it.key()), "unknown field");
    }
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> used_;
};

template <typename Fn>
void checked(const std::string& path, Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidInput& e) {
    throw ConfigError(path, e.what());
  }
}

}  // namespace config_detail

inline GeneratorConfig parse_generator(const Json& j, const std::string& path) {
  config_detail::Reader r(j, path);
  GeneratorConfig g;
  g.n_scripts = r.count("n_scripts", g.n_scripts);
  g.fp_prevalence = r.number("fp_prevalence", g.fp_prevalence);
  if (const Json* mix = r.raw("fp_type_mix")) {
    if (!mix->is_array() || mix->size() != g.fp_type_mix.size()) {
      throw ConfigError(r.path("fp_type_mix"), "expected an array of 15 weights");
    }
    for (std::size_t i = 0; i < g.fp_type_mix.size(); ++i) {
      if (!(*mix)[i].is_number()) {
        throw ConfigError(r.path("fp_type_mix") + "." + std::to_string(i), "expected a number");
      }
      g.fp_type_mix[i] = (*mix)[i].get<double>();
    }
  }
  g.near_miss_rate = r.number("near_miss_rate", g.near_miss_rate);
  g.benign_api_pool = r.count("benign_api_pool", g.benign_api_pool);
  g.mean_scripts_per_domain = r.number("mean_scripts_per_domain", g.mean_scripts_per_domain);
  g.mean_background_calls = r.number("mean_background_calls", g.mean_background_calls);
  g.train_fraction = r.number("train_fraction", g.train_fraction);
  g.signal_features_per_type = r.count("signal_features_per_type", g.signal_features_per_type);
  g.signal_rate_fp = r.number("signal_rate_fp", g.signal_rate_fp);
  g.signal_rate_near_miss = r.number("signal_rate_near_miss", g.signal_rate_near_miss);
  g.signal_rate_benign = r.number("signal_rate_benign", g.signal_rate_benign);
  g.companion_rate_fp = r.number("companion_rate_fp", g.companion_rate_fp);
  g.companion_rate_near_miss = r.number("companion_rate_near_miss", g.companion_rate_near_miss);
  g.background_custom_rate = r.number("background_custom_rate", g.background_custom_rate);
  g.seed = r.count("seed", g.seed);
  r.finish();
  config_detail::checked(path, [&] { g.validate(); });
  return g;
}

inline ExperimentConfig parse_experiment_config(const Json& j) {
  using config_detail::Reader;
  ExperimentConfig c;
  Reader top(j, "");
  if (const Json* g = top.raw("generator")) c.generator = parse_generator(*g, "generator");
  if (const Json* p = top.raw("partition")) {
    Reader r(*p, "partition");
    c.partition.participants = r.count("participants", c.partition.participants);
    c.partition.domains_per_participant =
        r.count("domains_per_participant", c.partition.domains_per_participant);
    c.partition.zipf_exponent = r.number("zipf_exponent", c.partition.zipf_exponent);
    c.partition.limited_knowledge_fraction =
        r.number("limited_knowledge_fraction", c.partition.limited_knowledge_fraction);
    r.finish();
    config_detail::checked("partition", [&] { c.partition.validate(); });
  }
  if (const Json* p = top.raw("privacy")) {
    Reader r(*p, "privacy");
    c.privacy.epsilon = r.extended_number("epsilon", c.privacy.epsilon);
    if (!(c.privacy.epsilon > 0.0)) throw ConfigError("privacy.epsilon", "must be positive or inf");
    c.privacy.delta = r.number("delta", c.privacy.delta);
    if (!(c.privacy.delta > 0.0 && c.privacy.delta < 1.0)) {
      throw ConfigError("privacy.delta", "must lie in (0,1)");
    }
    c.privacy.norm_fraction = r.number("norm_fraction", c.privacy.norm_fraction);
    if (!(c.privacy.norm_fraction >= 0.0 && c.privacy.norm_fraction < 1.0)) {
      throw ConfigError("privacy.norm_fraction", "must lie in [0,1)");
    }
    r.finish();
  }
  if (const Json* p = top.raw("normalization")) {
    Reader r(*p, "normalization");
    c.normalization.enabled = r.boolean("enabled", c.normalization.enabled);
    const auto mode = r.string("mode", std::string(to_string(c.normalization.mode)));
    config_detail::checked("normalization.mode",
                           [&] { c.normalization.mode = norm_mode_from_string(mode); });
    c.normalization.clip_mu = r.number("clip_mu", c.normalization.clip_mu);
    c.normalization.clip_var = r.number("clip_var", c.normalization.clip_var);
    c.normalization.variance_floor = r.number("variance_floor", c.normalization.variance_floor);
    if (!(c.normalization.clip_mu > 0.0)) throw ConfigError("normalization.clip_mu", "must be positive");
    if (!(c.normalization.clip_var > 0.0)) throw ConfigError("normalization.clip_var", "must be positive");
    if (!(c.normalization.variance_floor > 0.0)) {
      throw ConfigError("normalization.variance_floor", "must be positive");
    }
    r.finish();
  }
  if (const Json* p = top.raw("training")) {
    Reader r(*p, "training");
    auto& t = c.training;
    t.rounds = r.count("rounds", t.rounds);
    if (t.rounds < 1) throw ConfigError("training.rounds", "must be >= 1");
    t.participants_per_round = r.number("participants_per_round", t.participants_per_round);
    if (!(t.participants_per_round > 0.0)) {
      throw ConfigError("training.participants_per_round", "must be positive");
    }
    t.sampling_q = r.number("sampling_q", t.sampling_q);
    if (!(t.sampling_q >= 0.0 && t.sampling_q <= 1.0)) {
      throw ConfigError("training.sampling_q", "must lie in (0,1], or 0 for automatic");
    }
    t.epochs = r.count("epochs", t.epochs);
    if (t.epochs < 1) throw ConfigError("training.epochs", "must be >= 1");
    t.clip = r.number("clip", t.clip);
    if (!(t.clip > 0.0)) throw ConfigError("training.clip", "must be positive");
    t.l2_lambda = r.number("l2_lambda", t.l2_lambda);
    if (t.l2_lambda < 0.0) throw ConfigError("training.l2_lambda", "must be >= 0");
    t.max_iterations = r.count("max_iterations", t.max_iterations);
    if (t.max_iterations < 1) throw ConfigError("training.max_iterations", "must be >= 1");
    t.history = r.count("history", t.history);
    if (t.history < 1) throw ConfigError("training.history", "must be >= 1");
    t.gradient_tolerance = r.number("gradient_tolerance", t.gradient_tolerance);
    t.eval_every = r.count("eval_every", t.eval_every);
    r.finish();
  }
  c.feature_set = top.string("feature_set", c.feature_set);
  if (const Json* s = top.raw("seeds")) {
    if (!s->is_array() || s->empty()) throw ConfigError("seeds", "expected a non-empty array");
    c.seeds.clear();
    for (std::size_t i = 0; i < s->size(); ++i) {
      if (!(*s)[i].is_number_unsigned() && !((*s)[i].is_number_integer() && (*s)[i].get<std::int64_t>() >= 0)) {
        throw ConfigError("seeds." + std::to_string(i), "expected a non-negative integer");
      }
      c.seeds.push_back((*s)[i].get<std::uint64_t>());
    }
  }
  c.workers = top.count("workers", c.workers);
  if (c.workers < 1) throw ConfigError("workers", "must be >= 1");
  top.finish();
  return c;
}

inline Json epsilon_json(double eps) {
  if (std::isinf(eps)) return "inf";
  return eps;
}

inline Json to_json(const ExperimentConfig& c) {
  Json j;
  j["generator"] = generator_config_json(c.generator);
  j["partition"] = {{"participants", c.partition.participants},
                    {"domains_per_participant", c.partition.domains_per_participant},
                    {"zipf_exponent", c.partition.zipf_exponent},
                    {"limited_knowledge_fraction", c.partition.limited_knowledge_fraction}};
  j["privacy"] = {{"epsilon", epsilon_json(c.privacy.epsilon)},
                  {"delta", c.privacy.delta},
                  {"norm_fraction", c.privacy.norm_fraction}};
  j["normalization"] = {{"enabled", c.normalization.enabled},
                        {"mode", std::string(to_string(c.normalization.mode))},
                        {"clip_mu", c.normalization.clip_mu},
                        {"clip_var", c.normalization.clip_var},
                        {"variance_floor", c.normalization.variance_floor}};
  const auto& t = c.training;
  j["training"] = {{"rounds", t.rounds},
                   {"participants_per_round", t.participants_per_round},
                   {"sampling_q", t.sampling_q},
                   {"epochs", t.epochs},
                   {"clip", t.clip},
                   {"l2_lambda", t.l2_lambda},
                   {"max_iterations", t.max_iterations},
                   {"history", t.history},
                   {"gradient_tolerance", t.gradient_tolerance},
                   {"eval_every", t.eval_every}};
  j["feature_set"] = c.feature_set;
  j["seeds"] = c.seeds;
  j["workers"] = c.workers;
  return j;
}

// Sets a dotted path inside `j` from command-line text. The value is parsed
// as JSON when possible and taken as a plain string otherwise.
inline void set_dotted(Json& j, const std::string& dotted, const std::string& text) {
  if (dotted.empty()) throw ConfigError("", "empty override path");
  Json value;
  try {
    value = Json::parse(text);
  } catch (const nlohmann::json::exception&) {
    value = text;
  }
  Json* node = &j;
  std::size_t start = 0;
  while (true) {
    const auto dot = dotted.find('.', start);
    const std::string key = dotted.substr(start, dot == std::string::npos ? dot : dot - start);
    if (key.empty()) throw ConfigError(dotted, "malformed override path");
    if (!node->is_object()) throw ConfigError(dotted.substr(0, start ? start - 1 : 0), "not an object");
    if (dot == std::string::npos) {
      (*node)[key] = std::move(value);
      return;
    }
    node = &(*node)[key];
    if (node->is_null()) *node = Json::object();
    start = dot + 1;
  }
}

// Named presets, applied before the config file and overrides.
inline Json preset_json(const std::string& name) {
  if (name == "default" || name.empty()) return Json::object();
  if (name == "smoke") {
    return Json::parse(R"({"generator":{"n_scripts":20000},"partition":{"participants":100},
                           "training":{"rounds":10},"seeds":[0]})");
  }
  if (name == "paper-trend") {
    return Json::parse(R"({"generator":{"n_scripts":100000},"partition":{"participants":1000},
                           "training":{"rounds":20,"participants_per_round":100},
                           "seeds":[0,1,2,3,4]})");
  }
  throw ConfigError("preset", "unknown preset: " + name);
}

// Recursive merge: objects merge key by key, anything else replaces.
inline void merge_json(Json& base, const Json& over) {
  if (!base.is_object() || !over.is_object()) {
    base = over;
    return;
  }
  for (auto it = over.begin(); it != over.end(); ++it) {
    if (base.contains(it.key()) && base[it.key()].is_object() && it.value().is_object()) {
      merge_json(base[it.key()], it.value());
    } else {
      base[it.key()] = it.value();
    }
  }
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("", path + ": " + e.what());
  }
}

inline void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace fpfed

#endif  // FPFED_CONFIG_HPP_
