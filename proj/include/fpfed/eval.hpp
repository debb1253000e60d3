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
#ifndef FPFED_EVAL_HPP_
#define FPFED_EVAL_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "fpfed/error.hpp"

namespace fpfed {

struct PrPoint {
  double threshold = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

struct PrCurve {
  std::vector<PrPoint> points;  // thresholds strictly descending
  double prevalence = 0.0;
};

// One operating point per distinct score, predicting positive for
// score >= threshold.
inline PrCurve pr_curve(std::span<const double> scores, std::span<const bool> labels) {
  if (scores.size() != labels.size()) throw InvalidInput("pr_curve: length mismatch");
  if (scores.empty()) throw InvalidInput("pr_curve: empty input");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  const auto positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), true));
  if (positives == 0) throw UndefinedMetric("precision-recall undefined without positives");
  PrCurve c;
  c.prevalence = static_cast<double>(positives) / static_cast<double>(scores.size());
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double t = scores[order[i]];
    while (i < order.size() && scores[order[i]] == t) {
      (labels[order[i]] ? tp : fp)++;
      ++i;
    }
    c.points.push_back({t, static_cast<double>(tp) / static_cast<double>(tp + fp),
                        static_cast<double>(tp) / static_cast<double>(positives)});
  }
  return c;
}

// Average precision: sum over operating points of (R_n - R_{n-1}) * P_n.
inline double auprc(const PrCurve& curve) {
  double ap = 0.0, prev_recall = 0.0;
  for (const auto& p : curve.points) {
    ap += (p.recall - prev_recall) * p.precision;
    prev_recall = p.recall;
  }
  return ap;
}

inline double auprc(std::span<const double> scores, std::span<const bool> labels) {
  return auprc(pr_curve(scores, labels));
}

// --- run summaries ---------------------------------------------------------

struct RunRecord {
  std::size_t participants = 0;
  double epsilon = 0.0;  // +inf for the non-private setting
  std::string feature_set;
  std::string variant;  // free-form series discriminator, may be empty
  double x = 0.0;       // sweep coordinate for plot series
  std::uint64_t seed = 0;
  double auprc = 0.0;
};

struct SummaryRow {
  std::size_t participants = 0;
  double epsilon = 0.0;
  std::string feature_set;
  std::string variant;
  double x = 0.0;
  std::size_t runs = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation; 0 for a single run
};

inline std::vector<SummaryRow> summarize_runs(const std::vector<RunRecord>& records) {
  using Key = std::tuple<std::string, double, std::size_t, double, std::string>;
  std::map<Key, std::vector<const RunRecord*>> groups;
  for (const auto& r : records) {
    groups[{r.feature_set, r.epsilon, r.participants, r.x, r.variant}].push_back(&r);
  }
  std::vector<SummaryRow> rows;
  for (const auto& [key, runs] : groups) {
    SummaryRow s;
    s.feature_set = std::get<0>(key);
    s.epsilon = std::get<1>(key);
    s.participants = std::get<2>(key);
    s.x = std::get<3>(key);
    s.variant = std::get<4>(key);
    s.runs = runs.size();
    for (const auto* r : runs) s.mean += r->auprc;
    s.mean /= static_cast<double>(s.runs);
    if (s.runs > 1) {
      double ss = 0.0;
      for (const auto* r : runs) ss += (r->auprc - s.mean) * (r->auprc - s.mean);
      s.stddev = std::sqrt(ss / static_cast<double>(s.runs - 1));
    }
    rows.push_back(std::move(s));
  }
  return rows;
}

inline std::string format_epsilon(double eps) {
  if (std::isinf(eps)) return "inf";
  std::ostringstream s;
  s << eps;
  return s.str();
}

inline std::string format_number(double v) {
  std::ostringstream s;
  s.precision(6);
  s << std::fixed << v;
  return s.str();
}

inline void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "feature_set,variant,participants,epsilon,x,runs,mean_auprc,std_auprc\n";
  for (const auto& r : rows) {
    out << r.feature_set << ',' << r.variant << ',' << r.participants << ','
        << format_epsilon(r.epsilon) << ',' << format_number(r.x) << ',' << r.runs << ','
        << format_number(r.mean) << ',' << format_number(r.stddev) << '\n';
  }
}

// Pivot in the W x epsilon layout: one row per (feature set, variant, W),
// one "mean +- std" column per epsilon.
inline void write_grid_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  std::set<double> eps;
  for (const auto& r : rows) eps.insert(r.epsilon);
  out << "feature_set,variant,participants";
  for (double e : eps) out << ",eps=" << format_epsilon(e);
  out << '\n';
  std::map<std::tuple<std::string, std::string, std::size_t>, std::map<double, const SummaryRow*>>
      grid;
  for (const auto& r : rows) grid[{r.feature_set, r.variant, r.participants}][r.epsilon] = &r;
  for (const auto& [key, cells] : grid) {
    out << std::get<0>(key) << ',' << std::get<1>(key) << ',' << std::get<2>(key);
    for (double e : eps) {
      out << ',';
      if (auto it = cells.find(e); it != cells.end()) {
        out << format_number(it->second->mean) << " +- " << format_number(it->second->stddev);
      }
    }
    out << '\n';
  }
}

// Plot-data series: x, y (mean), std, series label.
inline void write_series_csv(std::ostream& out, const std::vector<SummaryRow>& rows,
                             const std::string& x_name) {
  out << x_name << ",mean_auprc,std_auprc,series\n";
  for (const auto& r : rows) {
    std::string series = r.feature_set + " eps=" + format_epsilon(r.epsilon);
    if (!r.variant.empty()) series += " " + r.variant;
    out << format_number(r.x) << ',' << format_number(r.mean) << ',' << format_number(r.stddev)
        << ',' << series << '\n';
  }
}

}  // namespace fpfed

#endif  // FPFED_EVAL_HPP_
