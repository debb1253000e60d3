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
#ifndef FPFED_SYNTHGEN_HPP_
#define FPFED_SYNTHGEN_HPP_

// Synthetic trace corpora. Fingerprinting scripts are built so that the
// ground-truth labelers fire with exactly the intended types; near-miss
// scripts satisfy every condition of one labeler but one. On top of that,
// type-specific custom-feature and API-count correlations are planted so a
// linear model has something to generalise from.

#include <algorithm>
#include <array>
#include <cstdint>
#include <fstream>
#include <functional>
#include <random>
#include <string>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "fpfed/catalog.hpp"
#include "fpfed/error.hpp"
#include "fpfed/heuristics.hpp"
#include "fpfed/partition.hpp"
#include "fpfed/random.hpp"
#include "fpfed/trace.hpp"

namespace fpfed {

// Mix over the 15 non-empty type combinations, indexed by LabelSet mask - 1
// (bit 1 canvas, 2 canvas-font, 4 webrtc, 8 audio).
using TypeMix = std::array<double, 15>;

inline TypeMix default_type_mix() {
  TypeMix m{};
  auto at = [&](unsigned mask) -> double& { return m[mask - 1]; };
  at(1) = 0.45;   // canvas
  at(2) = 0.08;   // canvas font
  at(4) = 0.07;   // webrtc
  at(8) = 0.05;   // audio
  at(3) = 0.10;
  at(5) = 0.08;
  at(9) = 0.05;
  at(6) = 0.01;
  at(10) = 0.01;
  at(12) = 0.01;
  at(7) = 0.03;
  at(11) = 0.02;
  at(13) = 0.02;
  at(14) = 0.005;
  at(15) = 0.015;
  return m;
}

struct GeneratorConfig {
  std::size_t n_scripts = 100000;
  double fp_prevalence = 0.0041;
  TypeMix fp_type_mix = default_type_mix();
  double near_miss_rate = 0.01;            // fraction of non-FP scripts
  std::size_t benign_api_pool = 400;       // APIs benign scripts draw from
  double mean_scripts_per_domain = 10.0;   // 1 + geometric
  double mean_background_calls = 12.0;     // per script, 1 + geometric
  double train_fraction = 0.8;             // by domain
  std::size_t signal_features_per_type = 6;
  double signal_rate_fp = 0.9;
  double signal_rate_near_miss = 0.3;
  double signal_rate_benign = 0.02;
  double companion_rate_fp = 0.7;
  double companion_rate_near_miss = 0.35;
  double background_custom_rate = 0.5;     // mean random custom firings
  std::uint64_t seed = 0;

  void validate() const {
    if (n_scripts < 1) throw InvalidInput("n_scripts must be >= 1");
    if (!(fp_prevalence > 0.0 && fp_prevalence < 1.0)) {
      throw InvalidInput("fp_prevalence must lie in (0,1)");
    }
    double total = 0.0;
    for (double w : fp_type_mix) {
      if (!(w >= 0.0)) throw InvalidInput("fp_type_mix weights must be non-negative");
      total += w;
    }
    if (std::abs(total - 1.0) > 1e-9) throw InvalidInput("fp_type_mix must sum to 1");
    if (!(near_miss_rate >= 0.0 && near_miss_rate <= 1.0)) {
      throw InvalidInput("near_miss_rate must lie in [0,1]");
    }
    if (!(mean_scripts_per_domain >= 1.0)) throw InvalidInput("mean_scripts_per_domain must be >= 1");
    if (!(mean_background_calls >= 1.0)) throw InvalidInput("mean_background_calls must be >= 1");
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
      throw InvalidInput("train_fraction must lie in (0,1)");
    }
    for (double p : {signal_rate_fp, signal_rate_near_miss, signal_rate_benign, companion_rate_fp,
                     companion_rate_near_miss}) {
      if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("generator rates must lie in [0,1]");
    }
    if (!(background_custom_rate >= 0.0)) throw InvalidInput("background_custom_rate must be >= 0");
  }
};

enum class Split { kTrain, kTest };

inline const char* to_string(Split s) { return s == Split::kTrain ? "train" : "test"; }

struct GeneratedScript {
  LabeledScript script;
  std::size_t domain_index = 0;
  Split split = Split::kTrain;
  bool near_miss = false;
};

struct SyntheticCorpus {
  std::vector<std::string> domains;  // index order == popularity rank order
  std::vector<Split> domain_split;
  std::vector<GeneratedScript> scripts;

  // Training domains in rank order, re-ranked 1..N.
  DomainRanking train_ranking() const {
    std::vector<std::string> kept;
    for (std::size_t d = 0; d < domains.size(); ++d) {
      if (domain_split[d] == Split::kTrain) kept.push_back(domains[d]);
    }
    return DomainRanking(std::move(kept));
  }
};

struct GenerationSummary {
  std::size_t scripts = 0;
  std::size_t fingerprinting = 0;
  std::size_t near_miss = 0;
  std::size_t train_scripts = 0;
  std::size_t test_scripts = 0;
  std::size_t train_fingerprinting = 0;
  std::size_t test_fingerprinting = 0;
  std::array<std::size_t, 4> by_type{};
  std::size_t domains = 0;
  std::size_t train_domains = 0;
};

inline std::string domain_name(std::size_t index) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "site%06zu.example", index + 1);
  return buf;
}

class ScriptGenerator {
 public:
  using Visitor = std::function<void(GeneratedScript&&)>;

  ScriptGenerator(GeneratorConfig cfg, const FeatureCatalog& catalog)
      : cfg_(std::move(cfg)), catalog_(&catalog) {
    cfg_.validate();
    build_pools();
  }

  const GeneratorConfig& config() const noexcept { return cfg_; }

  // Custom-feature indices planted for each type, in catalog custom order.
  const std::array<std::vector<std::uint32_t>, 4>& signal_custom() const noexcept {
    return signal_custom_;
  }

  // Domain layout: script count per domain, in rank order.
  std::vector<std::size_t> domain_sizes() const {
    Rng rng = make_rng(cfg_.seed, "synthgen-layout");
    std::geometric_distribution<std::size_t> extra(1.0 / cfg_.mean_scripts_per_domain);
    std::vector<std::size_t> sizes;
    std::size_t total = 0;
    while (total < cfg_.n_scripts) {
      std::size_t s = std::min(1 + extra(rng), cfg_.n_scripts - total);
      sizes.push_back(s);
      total += s;
    }
    return sizes;
  }

  Split domain_split(std::size_t d) const {
    Rng rng = make_rng(cfg_.seed, "synthgen-split", d);
    return bernoulli(rng, cfg_.train_fraction) ? Split::kTrain : Split::kTest;
  }

  // Streams every script in (domain, position) order. Each domain uses its
  // own derived stream, so domain blocks can be produced independently.
  GenerationSummary for_each(const Visitor& visit) const {
    GenerationSummary sum;
    const auto sizes = domain_sizes();
    sum.domains = sizes.size();
    std::size_t global = 0;
    for (std::size_t d = 0; d < sizes.size(); ++d) {
      const Split split = domain_split(d);
      if (split == Split::kTrain) ++sum.train_domains;
      Rng rng = make_rng(cfg_.seed, "synthgen-domain", d);
      const std::string domain = domain_name(d);
      for (std::size_t k = 0; k < sizes[d]; ++k, ++global) {
        GeneratedScript g = make_script(domain, k, global, rng);
        g.domain_index = d;
        g.split = split;
        ++sum.scripts;
        const bool fp = g.script.label();
        if (fp) {
          ++sum.fingerprinting;
          for (std::size_t t = 0; t < 4; ++t) sum.by_type[t] += g.script.fp_types.has(kAllFpTypes[t]);
        }
        if (g.near_miss) ++sum.near_miss;
        if (split == Split::kTrain) {
          ++sum.train_scripts;
          sum.train_fingerprinting += fp;
        } else {
          ++sum.test_scripts;
          sum.test_fingerprinting += fp;
        }
        visit(std::move(g));
      }
    }
    return sum;
  }

 private:
  enum class Kind { kBenign, kNearMiss, kFingerprinting };

  static bool has_api(const FeatureCatalog& c, const std::string& a) {
    const auto& v = c.api_counts();
    return std::find(v.begin(), v.end(), a) != v.end();
  }

  void build_pools() {
    const FeatureCatalog& c = *catalog_;
    static const std::array<std::vector<std::string>, 4> companions = {{
        {"HTMLCanvasElement.getContext", "CanvasRenderingContext2D.textBaseline",
         "CanvasRenderingContext2D.fillRect", "CanvasRenderingContext2D.arc",
         "CanvasRenderingContext2D.globalCompositeOperation", "Document.createElement"},
        {"HTMLElement.offsetWidth", "HTMLElement.offsetHeight",
         "CanvasRenderingContext2D.textAlign", "Element.getBoundingClientRect"},
        {"RTCPeerConnection.setLocalDescription", "RTCPeerConnection.iceGatheringState",
         "RTCPeerConnection.close", "MediaDevices.enumerateDevices"},
        {"AudioContext.sampleRate", "OscillatorNode.type", "OscillatorNode.frequency",
         "OscillatorNode.connect", "DynamicsCompressorNode.threshold",
         "AnalyserNode.getFloatFrequencyData"},
    }};
    static const std::vector<std::string> generic = {
        "Navigator.plugins", "Screen.colorDepth", "Navigator.hardwareConcurrency",
        "BatteryManager.level", "Navigator.getBattery", "Navigator.deviceMemory",
        "NavigatorUAData.getHighEntropyValues"};
    std::unordered_set<std::string> reserved;
    for (std::size_t t = 0; t < 4; ++t) {
      for (const auto& a : companions[t]) {
        if (has_api(c, a) && !heuristics::is_trigger_api(a)) {
          companion_[t].push_back(a);
          reserved.insert(a);
        }
      }
    }
    for (const auto& a : generic) {
      if (has_api(c, a)) {
        generic_.push_back(a);
        reserved.insert(a);
      }
    }

    // Benign pool: a fixed pseudo-random subset of non-trigger APIs, with the
    // companion APIs appended at the unpopular tail.
    std::vector<std::string> pool;
    for (const auto& a : c.api_counts()) {
      if (!heuristics::is_trigger_api(a) && !reserved.count(a)) pool.push_back(a);
    }
    Rng shuffle_rng(derive_seed(0x706f6f6c, "benign-pool"));
    std::shuffle(pool.begin(), pool.end(), shuffle_rng);
    if (pool.size() > cfg_.benign_api_pool) pool.resize(cfg_.benign_api_pool);
    for (const auto& a : generic_) pool.insert(pool.begin() + std::min<std::size_t>(pool.size(), 5), a);
    for (std::size_t t = 0; t < 4; ++t) {
      for (const auto& a : companion_[t]) pool.push_back(a);
    }
    if (pool.empty()) throw InvalidInput("catalog leaves an empty benign API pool");
    benign_pool_ = std::move(pool);
    pool_zipf_.emplace(benign_pool_.size(), 1.0);

    // Custom features that do not touch labeler inputs.
    for (std::uint32_t j = 0; j < c.custom().size(); ++j) {
      if (!heuristics::is_trigger_api(c.custom()[j].api_name)) safe_custom_.push_back(j);
    }
    const std::size_t k = cfg_.signal_features_per_type;
    if (4 * k > safe_custom_.size()) throw InvalidInput("too few custom features to plant signal");
    // Spread evenly over the custom range, interleaving the types.
    std::unordered_set<std::uint32_t> signal;
    for (std::size_t j = 0; j < k; ++j) {
      for (std::size_t t = 0; t < 4; ++t) {
        const std::size_t pos = ((j * 4 + t) * safe_custom_.size()) / (4 * k);
        signal_custom_[t].push_back(safe_custom_[pos]);
        signal.insert(safe_custom_[pos]);
      }
    }
    for (auto j : safe_custom_) {
      if (!signal.count(j)) noise_custom_.push_back(j);
    }
  }

  static ApiCallRecord firing_call(const CustomFeatureSpec& spec) {
    ScalarSummary value;
    if (auto* len = std::get_if<CustomFeatureSpec::StringLength>(&spec.matcher)) {
      value = summarize_string(std::string(len->length, 'x'));
    } else {
      value = std::get<ScalarSummary>(spec.matcher);
    }
    if (spec.target == CustomTarget::kReturn) return ApiCallRecord(spec.api_name, {}, value);
    std::vector<ScalarSummary> args(spec.arg_index + 1, Null{});
    args[spec.arg_index] = value;
    return ApiCallRecord(spec.api_name, std::move(args));
  }

  static std::size_t geometric_plus_one(Rng& rng, double mean) {
    if (mean <= 1.0) return 1;
    return 1 + std::geometric_distribution<std::size_t>(1.0 / mean)(rng);
  }

  // --- labeler patterns ----------------------------------------------------

  enum class CanvasVariant { kFull, kWithSave, kNoText, kNoStyle, kNoExtract, kWithListener };
  enum class FontVariant { kFull, kFontsAtThreshold, kMeasureAtThreshold, kRepeatedFonts };
  enum class RtcVariant { kFull, kNoIce, kNoCreate };
  enum class AudioVariant { kFull, kContextOnly };

  static void emit_canvas(std::vector<ApiCallRecord>& out, CanvasVariant v, Rng& rng) {
    const std::string ctx = "CanvasRenderingContext2D.";
    if (v != CanvasVariant::kNoStyle) {
      const char* prop = bernoulli(rng, 0.7) ? "fillStyle" : "strokeStyle";
      out.emplace_back(ctx + prop, std::vector<ScalarSummary>{std::string("#f60")});
    } else {
      out.emplace_back(ctx + "fillStyle", std::vector<ScalarSummary>{}, std::string("#000000"));
    }
    if (v != CanvasVariant::kNoText) {
      const std::size_t n = 1 + rng() % 3;
      for (std::size_t i = 0; i < n; ++i) {
        const char* m = bernoulli(rng, 0.8) ? "fillText" : "strokeText";
        out.emplace_back(ctx + m, std::vector<ScalarSummary>{std::string("Cwm fjordbank glyphs vext quiz"),
                                                             2.0, 15.0});
      }
    }
    if (v != CanvasVariant::kNoExtract) {
      out.emplace_back("HTMLCanvasElement.toDataURL", std::vector<ScalarSummary>{},
                       summarize_string(std::string(1200 + rng() % 800, 'A')));
    }
    if (v == CanvasVariant::kWithSave) {
      out.emplace_back(ctx + "save");
      out.emplace_back(ctx + "restore");
    }
    if (v == CanvasVariant::kWithListener) {
      out.emplace_back("HTMLCanvasElement.addEventListener",
                       std::vector<ScalarSummary>{std::string("click")});
    }
  }

  static void emit_font(std::vector<ApiCallRecord>& out, FontVariant v, Rng& rng) {
    const std::string ctx = "CanvasRenderingContext2D.";
    const std::size_t above = heuristics::kFontThreshold + 1;
    std::size_t fonts = above + rng() % 30;
    std::size_t measures = heuristics::kMeasureTextThreshold + 1 + rng() % 30;
    std::size_t distinct = fonts;
    if (v == FontVariant::kFontsAtThreshold) fonts = distinct = heuristics::kFontThreshold;
    if (v == FontVariant::kMeasureAtThreshold) measures = heuristics::kMeasureTextThreshold;
    if (v == FontVariant::kRepeatedFonts) distinct = heuristics::kFontThreshold;
    for (std::size_t i = 0; i < fonts; ++i) {
      out.emplace_back(ctx + "font",
                       std::vector<ScalarSummary>{"72px Font" + std::to_string(i % distinct)});
    }
    for (std::size_t i = 0; i < measures; ++i) {
      out.emplace_back(ctx + "measureText", std::vector<ScalarSummary>{std::string("mmmmmmmmmmlli")});
    }
  }

  static void emit_rtc(std::vector<ApiCallRecord>& out, RtcVariant v, Rng& rng) {
    const std::string pc = "RTCPeerConnection.";
    if (v != RtcVariant::kNoCreate) {
      if (bernoulli(rng, 0.5)) {
        out.emplace_back(pc + "createDataChannel", std::vector<ScalarSummary>{std::string("")});
      } else {
        out.emplace_back(pc + "createOffer");
      }
    }
    if (v != RtcVariant::kNoIce) {
      if (bernoulli(rng, 0.5)) {
        out.emplace_back(pc + "onicecandidate", std::vector<ScalarSummary>{std::string("function")});
      } else {
        out.emplace_back(pc + "localDescription", std::vector<ScalarSummary>{},
                         std::string("v=0 o=- 0 0 IN IP4 127.0.0.1"));
      }
    }
  }

  static void emit_audio(std::vector<ApiCallRecord>& out, AudioVariant v, Rng& rng) {
    const char* iface = bernoulli(rng, 0.7) ? "OfflineAudioContext." : "AudioContext.";
    if (v == AudioVariant::kContextOnly) {
      out.emplace_back(std::string(iface) + "sampleRate", std::vector<ScalarSummary>{}, 44100.0);
      out.emplace_back(std::string(iface) + "state", std::vector<ScalarSummary>{},
                       std::string("suspended"));
      out.emplace_back("OscillatorNode.connect");
      return;
    }
    static const char* members[] = {"createOscillator", "createDynamicsCompressor", "destination",
                                    "startRendering", "oncomplete"};
    bool any = false;
    for (const char* m : members) {
      if (bernoulli(rng, 0.6)) {
        out.emplace_back(std::string(iface) + m);
        any = true;
      }
    }
    if (!any) out.emplace_back(std::string(iface) + "createOscillator");
  }

  static void emit_pattern(std::vector<ApiCallRecord>& out, FpType t, Rng& rng) {
    switch (t) {
      case FpType::kCanvas: emit_canvas(out, CanvasVariant::kFull, rng); break;
      case FpType::kCanvasFont: emit_font(out, FontVariant::kFull, rng); break;
      case FpType::kWebRtc: emit_rtc(out, RtcVariant::kFull, rng); break;
      case FpType::kAudio: emit_audio(out, AudioVariant::kFull, rng); break;
    }
  }

  // One pattern that misses exactly one condition of type `t`.
  static void emit_near_miss(std::vector<ApiCallRecord>& out, FpType t, Rng& rng) {
    switch (t) {
      case FpType::kCanvas: {
        static const CanvasVariant vs[] = {CanvasVariant::kWithSave, CanvasVariant::kNoText,
                                           CanvasVariant::kNoStyle, CanvasVariant::kNoExtract,
                                           CanvasVariant::kWithListener};
        emit_canvas(out, vs[rng() % 5], rng);
        break;
      }
      case FpType::kCanvasFont: {
        static const FontVariant vs[] = {FontVariant::kFontsAtThreshold,
                                         FontVariant::kMeasureAtThreshold,
                                         FontVariant::kRepeatedFonts};
        emit_font(out, vs[rng() % 3], rng);
        break;
      }
      case FpType::kWebRtc:
        emit_rtc(out, bernoulli(rng, 0.5) ? RtcVariant::kNoIce : RtcVariant::kNoCreate, rng);
        break;
      case FpType::kAudio: emit_audio(out, AudioVariant::kContextOnly, rng); break;
    }
  }

  GeneratedScript make_script(const std::string& domain, std::size_t position, std::size_t global,
                              Rng& rng) const {
    Kind kind = Kind::kBenign;
    LabelSet intended;
    if (bernoulli(rng, cfg_.fp_prevalence)) {
      kind = Kind::kFingerprinting;
      std::discrete_distribution<unsigned> mix(cfg_.fp_type_mix.begin(), cfg_.fp_type_mix.end());
      intended = LabelSet::from_mask(mix(rng) + 1);
    } else if (bernoulli(rng, cfg_.near_miss_rate)) {
      kind = Kind::kNearMiss;
    }

    std::vector<ApiCallRecord> calls;
    const std::size_t background = geometric_plus_one(rng, cfg_.mean_background_calls);
    for (std::size_t i = 0; i < background; ++i) {
      calls.emplace_back(benign_pool_[pool_zipf_->draw(rng)]);
    }
    std::poisson_distribution<int> noise(cfg_.background_custom_rate);
    for (int i = noise(rng); i > 0; --i) {
      calls.push_back(firing_call(catalog_->custom()[noise_custom_[rng() % noise_custom_.size()]]));
    }

    std::array<double, 4> signal_rate;
    std::array<double, 4> companion_rate{};
    signal_rate.fill(cfg_.signal_rate_benign);
    double generic_rate = 0.0;
    if (kind == Kind::kFingerprinting) {
      for (std::size_t t = 0; t < 4; ++t) {
        if (intended.has(kAllFpTypes[t])) {
          emit_pattern(calls, kAllFpTypes[t], rng);
          signal_rate[t] = cfg_.signal_rate_fp;
          companion_rate[t] = cfg_.companion_rate_fp;
        }
      }
      generic_rate = cfg_.companion_rate_fp;
    } else if (kind == Kind::kNearMiss) {
      const std::size_t t = rng() % 4;
      emit_near_miss(calls, kAllFpTypes[t], rng);
      signal_rate[t] = cfg_.signal_rate_near_miss;
      companion_rate[t] = cfg_.companion_rate_near_miss;
      generic_rate = cfg_.companion_rate_near_miss;
    }
    for (std::size_t t = 0; t < 4; ++t) {
      for (auto j : signal_custom_[t]) {
        if (bernoulli(rng, signal_rate[t])) calls.push_back(firing_call(catalog_->custom()[j]));
      }
      for (const auto& a : companion_[t]) {
        if (bernoulli(rng, companion_rate[t])) calls.emplace_back(a);
      }
    }
    for (const auto& a : generic_) {
      if (bernoulli(rng, generic_rate)) calls.emplace_back(a);
    }
    std::shuffle(calls.begin(), calls.end(), rng);

    GeneratedScript g;
    const std::string url = "https://" + domain + "/js/s" + std::to_string(position) + ".js";
    g.script.trace.script_id =
        canonical_script_id(url, trace_json::hex16(derive_seed(cfg_.seed, "script-hash", global)));
    g.script.trace.source_domain = domain;
    g.script.trace.calls = std::move(calls);
    g.script.fp_types = intended;
    g.near_miss = kind == Kind::kNearMiss;
    return g;
  }

  GeneratorConfig cfg_;
  const FeatureCatalog* catalog_;
  std::array<std::vector<std::string>, 4> companion_;
  std::vector<std::string> generic_;
  std::vector<std::string> benign_pool_;
  std::optional<ZipfSampler> pool_zipf_;
  std::vector<std::uint32_t> safe_custom_;
  std::vector<std::uint32_t> noise_custom_;
  std::array<std::vector<std::uint32_t>, 4> signal_custom_;
};

inline SyntheticCorpus generate(const GeneratorConfig& cfg, const FeatureCatalog& catalog,
                                GenerationSummary* summary = nullptr) {
  ScriptGenerator gen(cfg, catalog);
  SyntheticCorpus c;
  const auto sizes = gen.domain_sizes();
  for (std::size_t d = 0; d < sizes.size(); ++d) {
    c.domains.push_back(domain_name(d));
    c.domain_split.push_back(gen.domain_split(d));
  }
  c.scripts.reserve(cfg.n_scripts);
  auto s = gen.for_each([&](GeneratedScript&& g) { c.scripts.push_back(std::move(g)); });
  if (summary) *summary = s;
  return c;
}

inline nlohmann::ordered_json generator_config_json(const GeneratorConfig& g) {
  nlohmann::ordered_json j;
  j["n_scripts"] = g.n_scripts;
  j["fp_prevalence"] = g.fp_prevalence;
  j["fp_type_mix"] = g.fp_type_mix;
  j["near_miss_rate"] = g.near_miss_rate;
  j["benign_api_pool"] = g.benign_api_pool;
  j["mean_scripts_per_domain"] = g.mean_scripts_per_domain;
  j["mean_background_calls"] = g.mean_background_calls;
  j["train_fraction"] = g.train_fraction;
  j["signal_features_per_type"] = g.signal_features_per_type;
  j["signal_rate_fp"] = g.signal_rate_fp;
  j["signal_rate_near_miss"] = g.signal_rate_near_miss;
  j["signal_rate_benign"] = g.signal_rate_benign;
  j["companion_rate_fp"] = g.companion_rate_fp;
  j["companion_rate_near_miss"] = g.companion_rate_near_miss;
  j["background_custom_rate"] = g.background_custom_rate;
  j["seed"] = g.seed;
  return j;
}

inline nlohmann::ordered_json generation_summary_json(const GenerationSummary& s) {
  nlohmann::ordered_json j;
  j["scripts"] = s.scripts;
  j["fingerprinting"] = s.fingerprinting;
  j["near_miss"] = s.near_miss;
  j["by_type"] = {{"canvas", s.by_type[0]},
                  {"canvas_font", s.by_type[1]},
                  {"webrtc", s.by_type[2]},
                  {"audio", s.by_type[3]}};
  j["domains"] = s.domains;
  j["train_domains"] = s.train_domains;
  j["train_scripts"] = s.train_scripts;
  j["test_scripts"] = s.test_scripts;
  j["train_fingerprinting"] = s.train_fingerprinting;
  j["test_fingerprinting"] = s.test_fingerprinting;
  return j;
}

}  // namespace fpfed

#endif  // FPFED_SYNTHGEN_HPP_
