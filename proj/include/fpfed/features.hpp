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
#ifndef FPFED_FEATURES_HPP_
#define FPFED_FEATURES_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fpfed/catalog.hpp"
#include "fpfed/error.hpp"
#include "fpfed/heuristics.hpp"
#include "fpfed/trace.hpp"

namespace fpfed {

// Dense per-script feature vector in catalog (or masked) slot order.
struct FeatureVector {
  std::vector<double> values;
  bool label = false;
  LabelSet fp_types;

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

// Rows of sparse features with their labels, compressed-row storage.
class FeatureMatrix {
 public:
  struct RowView {
    std::span<const std::uint32_t> index;
    std::span<const double> value;
  };

  FeatureMatrix() = default;
  explicit FeatureMatrix(std::size_t cols) : cols_(cols) {}

  // Entries must be sorted by column with no duplicates.
  void add_row(std::span<const std::pair<std::uint32_t, double>> entries, LabelSet types) {
    for (const auto& [c, v] : entries) {
      if (c >= cols_) throw InvalidInput("feature column out of range");
      index_.push_back(c);
      value_.push_back(v);
    }
    row_ptr_.push_back(index_.size());
    types_.push_back(static_cast<std::uint8_t>(types.mask()));
  }

  std::size_t rows() const noexcept { return types_.size(); }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nnz() const noexcept { return index_.size(); }

  RowView row(std::size_t r) const {
    const std::size_t b = r == 0 ? 0 : row_ptr_[r - 1];
    const std::size_t e = row_ptr_[r];
    return {std::span(index_).subspan(b, e - b), std::span(value_).subspan(b, e - b)};
  }
  bool label(std::size_t r) const noexcept { return types_[r] != 0; }
  LabelSet fp_types(std::size_t r) const noexcept { return LabelSet::from_mask(types_[r]); }

  std::vector<double> dense_row(std::size_t r) const {
    std::vector<double> out(cols_, 0.0);
    auto rv = row(r);
    for (std::size_t k = 0; k < rv.index.size(); ++k) out[rv.index[k]] = rv.value[k];
    return out;
  }

  // Column projection onto `mask`, renumbering columns to mask positions.
  FeatureMatrix project(const FeatureMask& mask) const {
    mask.validate(cols_);
    std::vector<std::int64_t> remap(cols_, -1);
    for (std::size_t i = 0; i < mask.size(); ++i) remap[mask[i]] = static_cast<std::int64_t>(i);
    FeatureMatrix out(mask.size());
    std::vector<std::pair<std::uint32_t, double>> buf;
    for (std::size_t r = 0; r < rows(); ++r) {
      buf.clear();
      auto rv = row(r);
      for (std::size_t k = 0; k < rv.index.size(); ++k) {
        auto m = remap[rv.index[k]];
        if (m >= 0) buf.emplace_back(static_cast<std::uint32_t>(m), rv.value[k]);
      }
      out.add_row(buf, fp_types(r));
    }
    return out;
  }

 private:
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::uint32_t> index_;
  std::vector<double> value_;
  std::vector<std::uint8_t> types_;
};

// Precomputed lookup tables for extracting features against a catalog.
class FeatureExtractor {
 public:
  explicit FeatureExtractor(const FeatureCatalog& catalog) : catalog_(&catalog) {
    for (std::size_t i = 0; i < catalog.api_count_size(); ++i) {
      count_slot_.emplace(catalog.api_counts()[i], static_cast<std::uint32_t>(i));
    }
    for (std::size_t j = 0; j < catalog.custom_size(); ++j) {
      custom_by_api_[catalog.custom()[j].api_name].push_back(static_cast<std::uint32_t>(j));
    }
  }

  const FeatureCatalog& catalog() const noexcept { return *catalog_; }

  // Sorted (slot, value) pairs with value != 0.
  std::vector<std::pair<std::uint32_t, double>> extract_sparse(const ScriptTrace& trace) const {
    std::unordered_map<std::uint32_t, double> acc;
    const auto offset = static_cast<std::uint32_t>(catalog_->api_count_size());
    for (const auto& call : trace.calls) {
      if (auto it = count_slot_.find(call.api_name()); it != count_slot_.end()) {
        acc[it->second] += 1.0;
      }
      if (auto it = custom_by_api_.find(call.api_name()); it != custom_by_api_.end()) {
        for (auto j : it->second) {
          if (catalog_->custom()[j].matches(call)) acc[offset + j] = 1.0;
        }
      }
    }
    std::vector<std::pair<std::uint32_t, double>> out(acc.begin(), acc.end());
    std::sort(out.begin(), out.end());
    return out;
  }

  FeatureVector extract(const ScriptTrace& trace) const {
    FeatureVector v;
    v.values.assign(catalog_->slot_count(), 0.0);
    for (const auto& [slot, x] : extract_sparse(trace)) v.values[slot] = x;
    v.fp_types = heuristics::label(trace);
    v.label = v.fp_types.is_fingerprinting();
    return v;
  }

 private:
  const FeatureCatalog* catalog_;
  std::unordered_map<std::string, std::uint32_t> count_slot_;
  std::unordered_map<std::string, std::vector<std::uint32_t>> custom_by_api_;
};

inline FeatureVector extract(const ScriptTrace& trace, const FeatureCatalog& catalog) {
  return FeatureExtractor(catalog).extract(trace);
}

inline FeatureVector apply_mask(const FeatureVector& v, const FeatureMask& mask) {
  mask.validate(v.values.size());
  FeatureVector out;
  out.values.reserve(mask.size());
  for (auto s : mask.slots()) out.values.push_back(v.values[s]);
  out.label = v.label;
  out.fp_types = v.fp_types;
  return out;
}

// Slot indices ordered by |weight| descending, ties by index ascending.
inline std::vector<std::uint32_t> feature_importance(std::span<const double> weights) {
  std::vector<std::uint32_t> order(weights.size());
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return std::abs(weights[a]) > std::abs(weights[b]);
  });
  return order;
}

// Maps a ranking over masked positions back to catalog slots.
inline std::vector<std::uint32_t> ranking_to_slots(std::span<const std::uint32_t> ranking,
                                                   const FeatureMask& mask) {
  std::vector<std::uint32_t> out;
  out.reserve(ranking.size());
  for (auto r : ranking) {
    if (r >= mask.size()) throw InvalidInput("ranking index outside mask");
    out.push_back(mask[r]);
  }
  return out;
}

// High Entropy set extended by the k highest-ranked slots not already in it.
inline FeatureMask build_ext_high_entropy(const FeatureCatalog& catalog,
                                          std::span<const std::uint32_t> ranking_slots,
                                          std::size_t k) {
  const FeatureMask& he = catalog.mask("HighEntropy");
  std::vector<std::uint32_t> extra;
  for (auto s : ranking_slots) {
    if (extra.size() == k) break;
    if (s >= catalog.slot_count()) throw InvalidInput("ranking slot out of range");
    if (he.contains(s) || std::find(extra.begin(), extra.end(), s) != extra.end()) continue;
    extra.push_back(s);
  }
  if (extra.size() < k) {
    throw InvalidInput("ranking has only " + std::to_string(extra.size()) +
                       " slots outside HighEntropy, requested " + std::to_string(k));
  }
  return he | FeatureMask(std::move(extra));
}

}  // namespace fpfed

#endif  // FPFED_FEATURES_HPP_
