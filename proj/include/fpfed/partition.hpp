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
#ifndef FPFED_PARTITION_HPP_
#define FPFED_PARTITION_HPP_

// Distribution of the training corpus over simulated participants: each
// participant draws D domains without replacement from a Zipf law over
// domain ranks and keeps every script loaded on them.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "fpfed/error.hpp"
#include "fpfed/features.hpp"
#include "fpfed/model.hpp"
#include "fpfed/random.hpp"

namespace fpfed {

// Domains in rank order; rank of domains()[i] is i + 1.
class DomainRanking {
 public:
  DomainRanking() = default;
  explicit DomainRanking(std::vector<std::string> domains) : domains_(std::move(domains)) {
    std::unordered_set<std::string> seen;
    for (const auto& d : domains_) {
      if (d.empty()) throw InvalidInput("empty domain in ranking");
      if (!seen.insert(d).second) throw InvalidInput("duplicate domain in ranking: " + d);
    }
  }

  // Accepts (rank, domain) pairs in any order; ranks must be 1..n.
  static DomainRanking from_pairs(std::vector<std::pair<std::int64_t, std::string>> pairs) {
    std::sort(pairs.begin(), pairs.end());
    std::vector<std::string> d;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (pairs[i].first != static_cast<std::int64_t>(i + 1)) {
        throw InvalidInput("ranks must be unique and contiguous from 1");
      }
      d.push_back(std::move(pairs[i].second));
    }
    return DomainRanking(std::move(d));
  }

  std::size_t size() const noexcept { return domains_.size(); }
  const std::vector<std::string>& domains() const noexcept { return domains_; }
  const std::string& at_rank(std::size_t rank) const { return domains_.at(rank - 1); }

 private:
  std::vector<std::string> domains_;
};

inline DomainRanking load_ranking(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open ranking file: " + path);
  std::vector<std::pair<std::int64_t, std::string>> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    std::istringstream ss(line);
    std::int64_t rank;
    std::string domain, extra;
    if (!(ss >> rank >> domain) || (ss >> extra)) {
      throw ParseError(line_no, "expected '<rank> <domain>'");
    }
    pairs.emplace_back(rank, std::move(domain));
  }
  try {
    return DomainRanking::from_pairs(std::move(pairs));
  } catch (const InvalidInput& e) {
    throw ParseError(0, e.what());
  }
}

inline void save_ranking(const DomainRanking& r, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write ranking file: " + path);
  for (std::size_t i = 0; i < r.size(); ++i) out << (i + 1) << ' ' << r.domains()[i] << '\n';
}

// Zipf law over ranks 1..n: P(rank r) proportional to r^-exponent.
class ZipfSampler {
 public:
  ZipfSampler(std::size_t n, double exponent) : exponent_(exponent), cdf_(n) {
    if (!(exponent > 0.0)) throw InvalidInput("Zipf exponent must be positive");
    double acc = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      acc += std::pow(static_cast<double>(r + 1), -exponent);
      cdf_[r] = acc;
    }
  }

  std::size_t size() const noexcept { return cdf_.size(); }
  double weight(std::size_t index) const {
    return std::pow(static_cast<double>(index + 1), -exponent_);
  }

  // One draw (0-based rank index) from the full distribution.
  std::size_t draw(Rng& rng) const {
    std::uniform_real_distribution<double> u(0.0, cdf_.back());
    const double x = u(rng);
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), x);
    return std::min<std::size_t>(it - cdf_.begin(), cdf_.size() - 1);
  }

  // D distinct indices; each successive draw has probability proportional
  // to rank^-exponent among the indices not yet drawn. Rejection of repeats
  // realises exactly that conditional law.
  std::vector<std::size_t> draw_distinct(std::size_t count, Rng& rng) const {
    const std::size_t n = cdf_.size();
    if (count > n) throw InvalidInput("cannot draw more domains than the ranking holds");
    std::vector<std::size_t> out;
    out.reserve(count);
    std::vector<bool> taken(n, false);
    if (count * 2 <= n) {
      while (out.size() < count) {
        const std::size_t i = draw(rng);
        if (!taken[i]) {
          taken[i] = true;
          out.push_back(i);
        }
      }
      return out;
    }
    // Dense case: explicit renormalisation over the remaining mass.
    double remaining = cdf_.back();
    std::uniform_real_distribution<double> u(0.0, 1.0);
    while (out.size() < count) {
      double x = u(rng) * remaining, acc = 0.0;
      std::size_t pick = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (taken[i]) continue;
        acc += weight(i);
        pick = i;
        if (acc > x) break;
      }
      taken[pick] = true;
      remaining -= weight(pick);
      out.push_back(pick);
    }
    return out;
  }

 private:
  double exponent_;
  std::vector<double> cdf_;
};

inline std::vector<std::string> zipf_sample_domains(const DomainRanking& ranking, std::size_t count,
                                                    double exponent, Rng& rng) {
  if (count < 1) throw InvalidInput("must sample at least one domain");
  if (count > ranking.size()) throw InvalidInput("D exceeds the number of ranked domains");
  ZipfSampler z(ranking.size(), exponent);
  std::vector<std::string> out;
  for (auto i : z.draw_distinct(count, rng)) out.push_back(ranking.domains()[i]);
  return out;
}

// domain -> rows of the feature matrix of scripts loaded on that domain.
class DomainCorpus {
 public:
  void add(const std::string& domain, std::uint32_t row) {
    scripts_by_domain_[index_for(domain)].push_back(row);
  }
  void add_domain(const std::string& domain) { index_for(domain); }

  bool contains(const std::string& domain) const { return index_.count(domain) != 0; }
  const std::vector<std::uint32_t>& scripts(const std::string& domain) const {
    auto it = index_.find(domain);
    if (it == index_.end()) throw InvalidInput("unknown domain: " + domain);
    return scripts_by_domain_[it->second];
  }
  std::size_t domain_count() const noexcept { return scripts_by_domain_.size(); }

 private:
  std::size_t index_for(const std::string& domain) {
    auto [it, inserted] = index_.emplace(domain, scripts_by_domain_.size());
    if (inserted) scripts_by_domain_.emplace_back();
    return it->second;
  }
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::vector<std::uint32_t>> scripts_by_domain_;
};

struct ParticipantDataset {
  std::uint64_t participant_id = 0;
  std::vector<std::string> urls;
  std::vector<std::uint32_t> rows;  // deduplicated, first-seen order
  std::optional<FpType> limited_to;
};

inline ParticipantDataset assign_scripts(const std::vector<std::string>& domains,
                                         const DomainCorpus& corpus,
                                         std::uint64_t participant_id = 0) {
  ParticipantDataset p;
  p.participant_id = participant_id;
  p.urls = domains;
  std::unordered_set<std::uint32_t> seen;
  for (const auto& d : domains) {
    for (auto r : corpus.scripts(d)) {
      if (seen.insert(r).second) p.rows.push_back(r);
    }
  }
  return p;
}

// Drops fingerprinting scripts that do not exhibit `allowed`.
inline ParticipantDataset apply_limited_knowledge(ParticipantDataset p, FpType allowed,
                                                  const FeatureMatrix& matrix) {
  std::erase_if(p.rows, [&](std::uint32_t r) {
    return matrix.label(r) && !matrix.fp_types(r).has(allowed);
  });
  p.limited_to = allowed;
  return p;
}

struct PartitionConfig {
  std::size_t participants = 100;
  std::size_t domains_per_participant = 250;
  double zipf_exponent = 1.0;
  double limited_knowledge_fraction = 0.0;
  std::uint64_t seed = 0;

  void validate() const {
    if (participants < 1) throw InvalidInput("participants must be >= 1");
    if (domains_per_participant < 1) throw InvalidInput("D must be >= 1");
    if (!(zipf_exponent > 0.0)) throw InvalidInput("Zipf exponent must be positive");
    if (!(limited_knowledge_fraction >= 0.0 && limited_knowledge_fraction <= 1.0)) {
      throw InvalidInput("limited-knowledge fraction must lie in [0,1]");
    }
  }
};

// Participants are materialised on demand from per-participant seed streams,
// so any participant's data is independent of which others were built.
class Partition {
 public:
  Partition(const FeatureMatrix& matrix, const DomainCorpus& corpus, DomainRanking ranking,
            PartitionConfig cfg)
      : matrix_(&matrix),
        corpus_(&corpus),
        ranking_(std::move(ranking)),
        cfg_(cfg),
        zipf_(ranking_.size(), cfg.zipf_exponent) {
    cfg_.validate();
    if (cfg_.domains_per_participant > ranking_.size()) {
      throw InvalidInput("D exceeds the number of ranked domains");
    }
    for (const auto& d : ranking_.domains()) {
      if (!corpus.contains(d)) throw InvalidInput("ranked domain missing from corpus: " + d);
    }
  }

  std::size_t size() const noexcept { return cfg_.participants; }
  const PartitionConfig& config() const noexcept { return cfg_; }
  const DomainRanking& ranking() const noexcept { return ranking_; }
  const FeatureMatrix& matrix() const noexcept { return *matrix_; }

  ParticipantDataset participant(std::size_t k) const {
    if (k < cache_.size()) return cache_[k];
    Rng rng = make_rng(cfg_.seed, "participant", k);
    std::vector<std::string> domains;
    domains.reserve(cfg_.domains_per_participant);
    for (auto i : zipf_.draw_distinct(cfg_.domains_per_participant, rng)) {
      domains.push_back(ranking_.domains()[i]);
    }
    ParticipantDataset p = assign_scripts(domains, *corpus_, k);
    Rng lk = make_rng(cfg_.seed, "limited-knowledge", k);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double roll = u(lk);
    const auto type = kAllFpTypes[std::uniform_int_distribution<int>(0, 3)(lk)];
    if (roll < cfg_.limited_knowledge_fraction) p = apply_limited_knowledge(std::move(p), type, *matrix_);
    return p;
  }

  Dataset dataset(std::size_t k) const {
    return Dataset{matrix_, participant(k).rows, nullptr};
  }

  // Builds and keeps every participant in memory.
  void materialize() {
    std::vector<ParticipantDataset> all;
    all.reserve(size());
    for (std::size_t k = 0; k < size(); ++k) all.push_back(participant(k));
    cache_ = std::move(all);
  }

  void write_manifest(const std::string& path, bool include_participants) const {
    nlohmann::ordered_json j;
    j["format"] = "fpfed-partition/1";
    j["participants"] = cfg_.participants;
    j["domains_per_participant"] = cfg_.domains_per_participant;
    j["zipf_exponent"] = cfg_.zipf_exponent;
    j["limited_knowledge_fraction"] = cfg_.limited_knowledge_fraction;
    j["seed"] = cfg_.seed;
    j["ranked_domains"] = ranking_.size();
    if (include_participants) {
      auto arr = nlohmann::ordered_json::array();
      for (std::size_t k = 0; k < size(); ++k) {
        auto p = participant(k);
        nlohmann::ordered_json jp;
        jp["id"] = k;
        jp["urls"] = p.urls;
        jp["scripts"] = p.rows.size();
        if (p.limited_to) jp["limited_to"] = std::string(to_string(*p.limited_to));
        arr.push_back(std::move(jp));
      }
      j["participant_list"] = std::move(arr);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write partition manifest: " + path);
    out << j.dump(1) << '\n';
  }

 private:
  const FeatureMatrix* matrix_;
  const DomainCorpus* corpus_;
  DomainRanking ranking_;
  PartitionConfig cfg_;
  ZipfSampler zipf_;
  std::vector<ParticipantDataset> cache_;
};

// ---------------------------------------------------------------------------
// Non-IIDness: mean pairwise symmetrised KL divergence between participants'
// distributions over the 15 non-empty fingerprinting-type combinations.

inline constexpr std::size_t kTypeCombinations = 15;
inline constexpr double kKlSmoothing = 1e-3;

using ComboCounts = std::array<double, kTypeCombinations>;

inline ComboCounts combo_counts(const std::vector<std::uint32_t>& rows, const FeatureMatrix& m) {
  ComboCounts c{};
  for (auto r : rows) {
    const unsigned mask = m.fp_types(r).mask();
    if (mask != 0) c[mask - 1] += 1.0;
  }
  return c;
}

// Additive smoothing on the empirical proportions, so participants with the
// same type mix get the same distribution whatever their script counts.
inline std::array<double, kTypeCombinations> smoothed_distribution(const ComboCounts& c,
                                                                   double alpha = kKlSmoothing) {
  double total = 0.0;
  for (double x : c) total += x;
  std::array<double, kTypeCombinations> p{};
  for (std::size_t i = 0; i < kTypeCombinations; ++i) {
    p[i] = (c[i] / total + alpha) / (1.0 + alpha * kTypeCombinations);
  }
  return p;
}

inline double symmetric_kl(const std::array<double, kTypeCombinations>& p,
                           const std::array<double, kTypeCombinations>& q) {
  double a = 0.0, b = 0.0;
  for (std::size_t i = 0; i < kTypeCombinations; ++i) {
    a += p[i] * std::log(p[i] / q[i]);
    b += q[i] * std::log(q[i] / p[i]);
  }
  return 0.5 * (a + b);
}

// Score over the given participants' counts; those with no fingerprinting
// scripts are excluded.
inline double non_iidness_from_counts(const std::vector<ComboCounts>& counts,
                                      double alpha = kKlSmoothing) {
  std::vector<std::array<double, kTypeCombinations>> dists;
  for (const auto& c : counts) {
    double total = 0.0;
    for (double x : c) total += x;
    if (total > 0.0) dists.push_back(smoothed_distribution(c, alpha));
  }
  if (dists.size() < 2) {
    throw InsufficientData("Non-IIDness needs at least two participants with fingerprinting data");
  }
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < dists.size(); ++i) {
    for (std::size_t j = i + 1; j < dists.size(); ++j) {
      sum += symmetric_kl(dists[i], dists[j]);
      ++pairs;
    }
  }
  return sum / static_cast<double>(pairs);
}

// Samples up to `sample_size` participants uniformly without replacement
// and scores them.
inline double non_iidness_score(const Partition& partition, std::size_t sample_size, Rng& rng) {
  std::vector<std::size_t> ids(partition.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
  if (ids.size() > sample_size) {
    std::shuffle(ids.begin(), ids.end(), rng);
    ids.resize(sample_size);
    std::sort(ids.begin(), ids.end());
  }
  std::vector<ComboCounts> counts;
  counts.reserve(ids.size());
  for (auto k : ids) counts.push_back(combo_counts(partition.participant(k).rows, partition.matrix()));
  return non_iidness_from_counts(counts);
}

}  // namespace fpfed

#endif  // FPFED_PARTITION_HPP_
