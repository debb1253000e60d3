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
#include <set>

#include <gtest/gtest.h>

#include "fpfed/features.hpp"
#include "fpfed/heuristics.hpp"
#include "fpfed/synthgen.hpp"

namespace fpfed {
namespace {

const FeatureCatalog& catalog() {
  static const FeatureCatalog c = synthetic_catalog();
  return c;
}

TEST(Generator, PrevalenceWithinBinomialBand) {
  GeneratorConfig cfg;  // n = 100000, prevalence 0.41%
  GenerationSummary s;
  ScriptGenerator gen(cfg, catalog());
  s = gen.for_each([](GeneratedScript&&) {});
  EXPECT_EQ(s.scripts, 100000u);
  const double mean = 100000 * 0.0041;
  const double sd = std::sqrt(mean * (1 - 0.0041));
  EXPECT_NEAR(static_cast<double>(s.fingerprinting), mean, 3 * sd);
  EXPECT_GT(s.train_fingerprinting, 0u);
  EXPECT_GT(s.test_fingerprinting, 0u);
}

TEST(Generator, LabelerAgreesWithIntentExactly) {
  for (std::uint64_t seed : {0, 1, 2, 3}) {
    GeneratorConfig cfg;
    cfg.n_scripts = 8000;
    cfg.fp_prevalence = 0.2;
    cfg.near_miss_rate = 0.25;
    cfg.seed = seed;
    std::size_t mismatches = 0, near_miss_fp = 0, near_miss = 0;
    std::set<unsigned> masks;
    ScriptGenerator(cfg, catalog()).for_each([&](GeneratedScript&& g) {
      const auto got = heuristics::label(g.script.trace);
      if (got != g.script.fp_types) ++mismatches;
      if (g.near_miss) {
        ++near_miss;
        if (got.is_fingerprinting()) ++near_miss_fp;
      }
      masks.insert(g.script.fp_types.mask());
    });
    EXPECT_EQ(mismatches, 0u) << "seed " << seed;
    EXPECT_EQ(near_miss_fp, 0u) << "seed " << seed;
    EXPECT_GT(near_miss, 0u);
    EXPECT_EQ(masks.size(), 16u) << "every type combination and benign appear";
  }
}

TEST(Generator, DeterministicPerSeed) {
  GeneratorConfig cfg;
  cfg.n_scripts = 3000;
  cfg.seed = 17;
  auto a = generate(cfg, catalog());
  auto b = generate(cfg, catalog());
  ASSERT_EQ(a.scripts.size(), b.scripts.size());
  for (std::size_t i = 0; i < a.scripts.size(); ++i) {
    ASSERT_EQ(a.scripts[i].script.trace, b.scripts[i].script.trace);
  }
  cfg.seed = 18;
  auto c = generate(cfg, catalog());
  EXPECT_NE(format_trace_line(a.scripts[5].script.trace), format_trace_line(c.scripts[5].script.trace));
}

TEST(Generator, SplitIsByDomainDisjointAndExhaustive) {
  GeneratorConfig cfg;
  cfg.n_scripts = 20000;
  GenerationSummary s;
  auto corpus = generate(cfg, catalog(), &s);
  EXPECT_EQ(s.train_scripts + s.test_scripts, s.scripts);
  std::set<std::string> ids;
  for (const auto& g : corpus.scripts) {
    EXPECT_EQ(g.split, corpus.domain_split[g.domain_index]);
    EXPECT_EQ(g.script.trace.source_domain, corpus.domains[g.domain_index]);
    ids.insert(g.script.trace.script_id);
  }
  EXPECT_EQ(ids.size(), corpus.scripts.size());
  const double train_share = static_cast<double>(s.train_domains) / s.domains;
  EXPECT_NEAR(train_share, 0.8, 0.03);
  auto ranking = corpus.train_ranking();
  EXPECT_EQ(ranking.size(), s.train_domains);
}

TEST(Generator, DomainSizesCoverAllScripts) {
  GeneratorConfig cfg;
  cfg.n_scripts = 5000;
  auto sizes = ScriptGenerator(cfg, catalog()).domain_sizes();
  std::size_t total = 0;
  for (auto s : sizes) {
    EXPECT_GE(s, 1u);
    total += s;
  }
  EXPECT_EQ(total, 5000u);
  EXPECT_NEAR(5000.0 / sizes.size(), 10.0, 1.0);
}

TEST(Generator, PlantedSignalSeparatesClasses) {
  GeneratorConfig cfg;
  cfg.n_scripts = 20000;
  cfg.fp_prevalence = 0.05;
  ScriptGenerator gen(cfg, catalog());
  FeatureExtractor ex(catalog());
  const auto offset = catalog().api_count_size();
  const auto& planted = gen.signal_custom()[0];  // canvas
  ASSERT_EQ(planted.size(), cfg.signal_features_per_type);
  double fp_hits = 0, fp_n = 0, benign_hits = 0, benign_n = 0;
  gen.for_each([&](GeneratedScript&& g) {
    const bool canvas = g.script.fp_types.canvas;
    const bool benign = !g.script.label() && !g.near_miss;
    if (!canvas && !benign) return;
    auto v = ex.extract(g.script.trace);
    for (auto j : planted) {
      const double hit = v.values[offset + j];
      (canvas ? fp_hits : benign_hits) += hit;
      (canvas ? fp_n : benign_n) += 1;
    }
  });
  EXPECT_NEAR(fp_hits / fp_n, 0.9, 0.05);
  EXPECT_LT(benign_hits / benign_n, 0.05);
}

TEST(Generator, RejectsInfeasibleConfigs) {
  GeneratorConfig cfg;
  cfg.fp_type_mix[0] += 0.1;
  EXPECT_THROW(ScriptGenerator(cfg, catalog()), InvalidInput);
  cfg = GeneratorConfig{};
  cfg.fp_prevalence = 1.0;
  EXPECT_THROW(ScriptGenerator(cfg, catalog()), InvalidInput);
  cfg = GeneratorConfig{};
  cfg.train_fraction = 0.0;
  EXPECT_THROW(ScriptGenerator(cfg, catalog()), InvalidInput);
  cfg = GeneratorConfig{};
  cfg.fp_type_mix[3] = -0.01;
  cfg.fp_type_mix[4] += 0.01;
  EXPECT_THROW(ScriptGenerator(cfg, catalog()), InvalidInput);
}

TEST(Generator, ManifestJsonListsParameters) {
  GeneratorConfig cfg;
  cfg.seed = 9;
  auto j = generator_config_json(cfg);
  EXPECT_EQ(j["seed"], 9);
  EXPECT_EQ(j["fp_type_mix"].size(), 15u);
  EXPECT_DOUBLE_EQ(j["fp_prevalence"].get<double>(), 0.0041);
}

}  // namespace
}  // namespace fpfed
