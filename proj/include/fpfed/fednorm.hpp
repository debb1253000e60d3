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
#ifndef FPFED_FEDNORM_HPP_
#define FPFED_FEDNORM_HPP_

// Federated, differentially private per-feature mean/variance estimation
// and the feature scaling built on it.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fpfed/dp.hpp"
#include "fpfed/error.hpp"
#include "fpfed/model.hpp"
#include "fpfed/random.hpp"

namespace fpfed {

// Anything that can hand out participant datasets by index.
template <typename P>
concept ParticipantSource = requires(const P& p, std::size_t k) {
  { p.size() } -> std::convertible_to<std::size_t>;
  { p.dataset(k) } -> std::convertible_to<Dataset>;
};

// Plain list of datasets; handy for tests and small simulations.
struct DatasetList {
  std::vector<Dataset> items;
  std::size_t size() const noexcept { return items.size(); }
  Dataset dataset(std::size_t k) const { return items[k]; }
};

inline constexpr double kVarianceFloor = 1e-6;

struct NormStats {
  std::vector<double> mu;
  std::vector<double> s;
  double clip_mu = 1.0;
  double clip_var = 1.0;

  std::size_t dim() const noexcept { return mu.size(); }
};

enum class NormMode {
  kStd,    // (v - mu) / sqrt(s)
  kPaper,  // (v - mu) / s
};

inline std::string_view to_string(NormMode m) { return m == NormMode::kStd ? "std" : "paper"; }
inline NormMode norm_mode_from_string(std::string_view s) {
  if (s == "std") return NormMode::kStd;
  if (s == "paper") return NormMode::kPaper;
  throw InvalidInput("unknown normalisation mode: " + std::string(s));
}

// Column mean of feature f, upper-clipped at clip_mu. nullopt (abstain)
// for an empty dataset.
inline std::optional<double> local_mean(const Dataset& data, std::size_t f, double clip_mu) {
  if (data.empty()) return std::nullopt;
  double sum = 0.0;
  for (auto r : data.rows) {
    auto row = data.matrix->row(r);
    auto it = std::lower_bound(row.index.begin(), row.index.end(), f);
    if (it != row.index.end() && *it == f) sum += row.value[it - row.index.begin()];
  }
  return std::min(sum / static_cast<double>(data.size()), clip_mu);
}

// Sample variance (n - 1 denominator) of feature f, upper-clipped at
// clip_var. nullopt (abstain) when fewer than two rows.
inline std::optional<double> local_var(const Dataset& data, std::size_t f, double clip_var) {
  const std::size_t n = data.size();
  if (n < 2) return std::nullopt;
  std::vector<double> col;
  col.reserve(n);
  for (auto r : data.rows) {
    auto row = data.matrix->row(r);
    auto it = std::lower_bound(row.index.begin(), row.index.end(), f);
    col.push_back(it != row.index.end() && *it == f ? row.value[it - row.index.begin()] : 0.0);
  }
  double mean = 0.0;
  for (double v : col) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : col) ss += (v - mean) * (v - mean);
  return std::min(ss / static_cast<double>(n - 1), clip_var);
}

namespace fednorm_detail {

struct Contribution {
  std::uint32_t participant;
  double mean;  // clipped local mean
  double var;   // clipped local variance, 0 when the participant abstains
};

// Per-feature lists of participants whose clipped statistics are non-zero,
// in participant order. Participants not listed contribute exactly 0.
template <ParticipantSource P>
std::vector<std::vector<Contribution>> column_contributions(const P& participants,
                                                            std::size_t dim, double clip_mu,
                                                            double clip_var) {
  std::vector<std::vector<Contribution>> cols(dim);
  std::vector<double> sum(dim, 0.0), ss(dim, 0.0);
  std::vector<std::uint32_t> nnz(dim, 0);
  std::vector<std::uint32_t> touched;
  for (std::size_t k = 0; k < participants.size(); ++k) {
    const Dataset d = participants.dataset(k);
    if (d.empty()) continue;
    if (d.dim() != dim) throw InvalidInput("participant dimension mismatch");
    touched.clear();
    for (auto r : d.rows) {
      auto row = d.matrix->row(r);
      for (std::size_t i = 0; i < row.index.size(); ++i) {
        auto f = row.index[i];
        if (nnz[f] == 0) touched.push_back(f);
        ++nnz[f];
        sum[f] += row.value[i];
      }
    }
    const double n = static_cast<double>(d.size());
    for (auto f : touched) sum[f] /= n;  // now the mean
    for (auto r : d.rows) {
      auto row = d.matrix->row(r);
      for (std::size_t i = 0; i < row.index.size(); ++i) {
        const double dv = row.value[i] - sum[row.index[i]];
        ss[row.index[i]] += dv * dv;
      }
    }
    std::sort(touched.begin(), touched.end());
    for (auto f : touched) {
      const double mean = sum[f];
      const double zeros = n - nnz[f];
      const double var = d.size() >= 2 ? (ss[f] + zeros * mean * mean) / (n - 1.0) : 0.0;
      cols[f].push_back({static_cast<std::uint32_t>(k), std::min(mean, clip_mu),
                         d.size() >= 2 ? std::min(var, clip_var) : 0.0});
      sum[f] = ss[f] = 0.0;
      nnz[f] = 0;
    }
  }
  return cols;
}

}  // namespace fednorm_detail

// DP federated normalisation statistics. For every feature, participants
// are Poisson-sampled once for the mean query and once for the variance
// query; each sum is divided by qW and perturbed with N(0, (zS/qW)^2).
// Charges the ledger 2F subsampled-Gaussian queries.
template <ParticipantSource P>
NormStats dp_fed_norm(const P& participants, std::size_t dim, double q, double z, double clip_mu,
                      double clip_var, Rng& rng, dp::PrivacyLedger& ledger,
                      double variance_floor = kVarianceFloor) {
  const std::size_t w = participants.size();
  if (w == 0) throw InvalidInput("dp_fed_norm: no participants");
  if (!(clip_mu > 0.0) || !(clip_var > 0.0)) throw InvalidInput("clip bounds must be positive");
  const double denom = q * static_cast<double>(w);
  const double sigma_mu = dp::noise_stddev(z, clip_mu, q, static_cast<double>(w));
  const double sigma_s = dp::noise_stddev(z, clip_var, q, static_cast<double>(w));
  const auto cols = fednorm_detail::column_contributions(participants, dim, clip_mu, clip_var);

  auto sampled_sum = [&](const std::vector<fednorm_detail::Contribution>& col, bool var) {
    const auto picked = poisson_sample(rng, w, q);
    double s = 0.0;
    std::size_t i = 0;
    for (auto k : picked) {
      while (i < col.size() && col[i].participant < k) ++i;
      if (i < col.size() && col[i].participant == k) s += var ? col[i].var : col[i].mean;
    }
    return s;
  };

  NormStats out;
  out.clip_mu = clip_mu;
  out.clip_var = clip_var;
  out.mu.resize(dim);
  out.s.resize(dim);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (std::size_t f = 0; f < dim; ++f) {
    out.mu[f] = sampled_sum(cols[f], false) / denom + (z > 0 ? sigma_mu * noise(rng) : 0.0);
    out.s[f] = sampled_sum(cols[f], true) / denom + (z > 0 ? sigma_s * noise(rng) : 0.0);
  }
  for (double& v : out.s) v = std::max(v, variance_floor);
  ledger.charge("fednorm", q, z, static_cast<std::int64_t>(2 * dim));
  return out;
}

// Exact (non-private) statistics pooled over all rows; test and baseline use.
inline NormStats exact_stats(const Dataset& data, double variance_floor = kVarianceFloor) {
  const std::size_t dim = data.dim();
  NormStats st;
  st.mu.assign(dim, 0.0);
  st.s.assign(dim, 0.0);
  if (data.size() < 2) throw InvalidInput("exact_stats: need at least two rows");
  std::vector<std::uint32_t> nnz(dim, 0);
  const double n = static_cast<double>(data.size());
  for (auto r : data.rows) {
    auto row = data.matrix->row(r);
    for (std::size_t i = 0; i < row.index.size(); ++i) st.mu[row.index[i]] += row.value[i];
  }
  for (double& m : st.mu) m /= n;
  for (auto r : data.rows) {
    auto row = data.matrix->row(r);
    for (std::size_t i = 0; i < row.index.size(); ++i) {
      const double dv = row.value[i] - st.mu[row.index[i]];
      st.s[row.index[i]] += dv * dv;
      ++nnz[row.index[i]];
    }
  }
  for (std::size_t f = 0; f < dim; ++f) {
    st.s[f] = (st.s[f] + (n - nnz[f]) * st.mu[f] * st.mu[f]) / (n - 1.0);
    st.s[f] = std::max(st.s[f], variance_floor);
  }
  return st;
}

inline AffineNormalizer make_normalizer(const NormStats& st, NormMode mode,
                                        double variance_floor = kVarianceFloor) {
  AffineNormalizer n;
  n.shift = st.mu;
  n.scale.resize(st.dim());
  for (std::size_t f = 0; f < st.dim(); ++f) {
    const double s = std::max(st.s[f], variance_floor);
    n.scale[f] = mode == NormMode::kStd ? 1.0 / std::sqrt(s) : 1.0 / s;
  }
  return n;
}

inline FeatureVector normalize(const FeatureVector& v, const NormStats& st, NormMode mode,
                               double variance_floor = kVarianceFloor) {
  if (v.values.size() != st.dim()) throw InvalidInput("normalize: dimension mismatch");
  FeatureVector out = v;
  for (std::size_t f = 0; f < st.dim(); ++f) {
    const double s = std::max(st.s[f], variance_floor);
    const double denom = mode == NormMode::kStd ? std::sqrt(s) : s;
    out.values[f] = (v.values[f] - st.mu[f]) / denom;
  }
  return out;
}

inline void save_norm_stats(const NormStats& st, const std::string& path) {
  nlohmann::ordered_json j;
  j["format"] = "fpfed-normstats/1";
  j["clip_mu"] = st.clip_mu;
  j["clip_var"] = st.clip_var;
  j["mu"] = st.mu;
  j["s"] = st.s;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write stats file: " + path);
  out << j.dump() << '\n';
}

inline NormStats load_norm_stats(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open stats file: " + path);
  try {
    auto j = nlohmann::json::parse(in);
    NormStats st;
    st.clip_mu = j.at("clip_mu").get<double>();
    st.clip_var = j.at("clip_var").get<double>();
    st.mu = j.at("mu").get<std::vector<double>>();
    st.s = j.at("s").get<std::vector<double>>();
    if (st.mu.size() != st.s.size()) throw ParseError(0, "stats vectors differ in length");
    return st;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, std::string("stats file: ") + e.what());
  }
}

}  // namespace fpfed

#endif  // FPFED_FEDNORM_HPP_
