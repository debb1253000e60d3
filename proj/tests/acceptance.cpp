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

// Acceptance harness: one PASS/FAIL line per criterion, nonzero exit if
// any criterion fails. `acceptance N [M ...]` runs only the listed
// criteria; `--workers K` sets the pool used by the trend experiments.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "fpfed/dp.hpp"
#include "fpfed/eval.hpp"
#include "fpfed/experiment.hpp"
#include "fpfed/fedavg.hpp"
#include "fpfed/fednorm.hpp"
#include "fpfed/heuristics.hpp"
#include "fpfed/model.hpp"
#include "fpfed/partition.hpp"
#include "fpfed/pipeline.hpp"
#include "support/ap_oracle.hpp"
#include "support/gd_oracle.hpp"
#include "support/heuristic_cases.hpp"
#include "support/random_data.hpp"
#include "support/rdp_oracle.hpp"

namespace fpfed {
namespace {

using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string mean_sd(double m, double s) { return fmt("%.3f", m) + "+-" + fmt("%.3f", s); }

std::size_t g_workers = 1;

// --- 1. heuristics ----------------------------------------------------------

Verdict heuristic_exactness() {
  Verdict v;
  const auto t0 = Clock::now();
  const auto cases = testing::heuristic_cases();
  std::size_t mismatches = 0;
  for (const auto& c : cases) {
    if (heuristics::label(c.trace) != c.expected) {
      ++mismatches;
      v.note("mismatch: " + c.name);
    }
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  v.check(cases.size() == 24, "expected 24 cases, got " + std::to_string(cases.size()));
  v.check(mismatches == 0, std::to_string(mismatches) + " mismatches");
  v.check(secs < 1.0, "runtime " + fmt("%.3f s", secs));
  v.note(std::to_string(cases.size()) + " cases, " + std::to_string(mismatches) +
         " mismatches, " + fmt("%.3f s", secs));
  return v;
}

// --- 2. no-noise reductions ---------------------------------------------------

struct Federation {
  testing::Problem problem;
  DatasetList list;
};

Federation make_federation(std::mt19937_64& rng, std::size_t w, std::size_t dim) {
  Federation f{testing::random_problem(rng, 20 * w, dim, false), {}};
  for (std::size_t k = 0; k < w; ++k) {
    Dataset d{f.problem.matrix.get(), {}, nullptr};
    const std::size_t n = k % 5 == 2 ? 0 : 1 + rng() % 40;
    for (std::size_t i = 0; i < n; ++i) {
      d.rows.push_back(static_cast<std::uint32_t>(rng() % f.problem.matrix->rows()));
    }
    std::sort(d.rows.begin(), d.rows.end());
    d.rows.erase(std::unique(d.rows.begin(), d.rows.end()), d.rows.end());
    f.list.items.push_back(d);
  }
  return f;
}

Verdict no_noise_reductions() {
  Verdict v;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2);
  double err_avg = 0.0, err_norm = 0.0;
  bool local_equal = true;
  for (int rep = 0; rep < 10; ++rep) {
    auto fed = make_federation(rng, 15, 12);
    TrainingRunConfig cfg;
    cfg.local.clip = 0.3 + 0.2 * rep;
    cfg.local.optimizer.max_iterations = 10;
    std::vector<double> theta(13);
    std::normal_distribution<double> n(0.0, 0.1);
    for (double& t : theta) t = n(rng);
    Rng r(rep);
    dp::PrivacyLedger ledger;
    const auto next = run_round(theta, fed.list, nullptr, cfg, r, ledger);
    std::vector<double> want = theta;
    for (const auto& d : fed.list.items) {
      const auto delta = local_update(d, theta, cfg.local);
      for (std::size_t j = 0; j < want.size(); ++j) want[j] += delta[j] / 15.0;
    }
    for (std::size_t j = 0; j < want.size(); ++j) {
      err_avg = std::max(err_avg, std::abs(next[j] - want[j]));
    }

    const double clip = rep % 2 ? 0.5 : 50.0;
    const auto st = dp_fed_norm(fed.list, 12, 1.0, 0.0, clip, clip, r, ledger, 0.0);
    for (std::size_t f = 0; f < 12; ++f) {
      double mu = 0.0, s = 0.0;
      for (const auto& d : fed.list.items) {
        mu += local_mean(d, f, clip).value_or(0.0);
        s += local_var(d, f, clip).value_or(0.0);
      }
      err_norm = std::max({err_norm, std::abs(st.mu[f] - mu / 15.0), std::abs(st.s[f] - s / 15.0)});
    }

    auto single = make_federation(rng, 1, 8);
    if (single.list.items[0].rows.empty()) single.list.items[0].rows = {0, 1, 2, 3};
    TrainingRunConfig one;
    one.rounds = 6;
    one.local.clip = 0.5;
    one.local.epochs = 1 + rep % 2;
    one.local.optimizer.max_iterations = 8;
    dp::PrivacyLedger l1;
    const auto res = train(single.list, 8, nullptr, one, l1);
    std::vector<double> th(9, 0.0);
    for (std::size_t round = 0; round < one.rounds; ++round) {
      const auto delta = local_update(single.list.items[0], th, one.local);
      for (std::size_t j = 0; j < th.size(); ++j) th[j] += delta[j];
    }
    local_equal = local_equal && res.model.theta() == th;
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  v.check(err_avg <= 1e-12, "(a) max error " + fmt("%.3g", err_avg));
  v.check(err_norm <= 1e-12, "(b) max error " + fmt("%.3g", err_norm));
  v.check(local_equal, "(c) W=1 differs from local training");
  v.check(secs < 10.0, "runtime " + fmt("%.2f s", secs));
  v.note("(a) " + fmt("%.2g", err_avg) + " (b) " + fmt("%.2g", err_norm) + " (c) " +
         (local_equal ? "bitwise equal" : "differs") + ", " + fmt("%.2f s", secs));
  return v;
}

// --- 3. clipping ----------------------------------------------------------------

Verdict clipping_contract() {
  Verdict v;
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> scale(-6.0, 6.0);
  std::size_t norm_fail = 0, dir_fail = 0;
  for (int rep = 0; rep < 10000; ++rep) {
    std::vector<double> x(1 + rng() % 50);
    const double s = std::pow(10.0, scale(rng));
    for (double& e : x) e = n(rng) * s;
    const double clip = std::pow(10.0, scale(rng) / 2.0);
    const auto c = dp::clip_l2(x, clip);
    if (!(dp::l2_norm(c) <= clip + 1e-12)) ++norm_fail;
    const double nx = dp::l2_norm(x), nc = dp::l2_norm(c);
    double dot = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) dot += x[i] * c[i];
    if (std::abs(dot / (nx * nc) - 1.0) > 1e-12) ++dir_fail;
    if (nx <= clip && c != x) ++dir_fail;
  }
  std::size_t delta_fail = 0;
  for (int rep = 0; rep < 300; ++rep) {
    auto p = testing::random_problem(rng, 30, 10, rep % 2 == 1);
    LocalUpdateConfig cfg;
    cfg.clip = std::pow(10.0, -3.0 + 0.02 * rep);
    cfg.epochs = 1 + rep % 3;
    cfg.optimizer.max_iterations = 15;
    if (!(dp::l2_norm(local_update(p.data, p.theta, cfg)) <= cfg.clip)) ++delta_fail;
  }
  v.check(norm_fail == 0, std::to_string(norm_fail) + " norm violations");
  v.check(dir_fail == 0, std::to_string(dir_fail) + " direction violations");
  v.check(delta_fail == 0, std::to_string(delta_fail) + " local_update violations");
  v.note("10000 vectors, 300 local updates");
  return v;
}

// --- 4. accountant ----------------------------------------------------------------

Verdict accountant() {
  Verdict v;
  const auto t0 = Clock::now();
  bool exact = true;
  for (double z : {0.5, 0.9, 1.0, 2.3, 7.0}) {
    for (double a : dp::default_orders()) {
      exact = exact && dp::rdp_subsampled_gaussian(1.0, z, a) == a / (2.0 * z * z);
    }
  }
  double worst = 0.0;
  for (const auto& p : testing::rdp_grid()) {
    const double got = dp::rdp_subsampled_gaussian(p.q, p.z, p.alpha);
    const double want = testing::rdp_quadrature(p.q, p.z, p.alpha);
    worst = std::max(worst, std::abs(got - want) / want);
  }
  struct Case {
    double eps, q;
    std::int64_t rounds;
  };
  double lo = 1.0, hi = 0.0;
  for (auto c : {Case{1.0, 0.1, 20}, Case{5.0, 0.01, 20}, Case{10.0, 0.1, 100},
                 Case{1.0, 0.01, 200}, Case{3.0, 1.0, 10}, Case{5.0, 0.1, 20},
                 Case{10.0, 0.01, 20}}) {
    const std::vector<dp::QueryGroup> plan = {{"train", c.q, c.rounds}};
    const double z = dp::calibrate_noise(c.eps, 1e-5, plan);
    dp::PrivacyLedger l;
    l.charge("train", c.q, z, c.rounds);
    const double ratio = dp::compose_and_convert(l, 1e-5) / c.eps;
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  v.check(exact, "(a) q=1 differs from alpha/(2 z^2)");
  v.check(worst <= 1e-6, "(b) max relative error " + fmt("%.3g", worst));
  v.check(lo >= 0.99 && hi <= 1.0, "(c) replay ratio in [" + fmt("%.5f", lo) + ", " +
                                       fmt("%.5f", hi) + "]");
  v.check(secs < 30.0, "runtime " + fmt("%.1f s", secs));
  v.note("(b) max rel err " + fmt("%.2g", worst) + " (c) eps/target in [" + fmt("%.4f", lo) +
         ", " + fmt("%.4f", hi) + "], " + fmt("%.1f s", secs));
  return v;
}

// --- 5. optimizer ---------------------------------------------------------------

Verdict optimizer() {
  Verdict v;
  std::mt19937_64 rng(2024);
  double worst_fd = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    auto p = testing::random_problem(rng, 60, 20, rep % 2 == 0);
    std::vector<double> g(21), none, x = p.theta;
    loss_and_grad(p.theta, p.data, 1e-2, g);
    double gmax = 0.0, dmax = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double h = 1e-5 * std::max(1.0, std::abs(x[j]));
      x[j] = p.theta[j] + h;
      const double fp = loss_and_grad(x, p.data, 1e-2, none);
      x[j] = p.theta[j] - h;
      const double fm = loss_and_grad(x, p.data, 1e-2, none);
      x[j] = p.theta[j];
      dmax = std::max(dmax, std::abs((fp - fm) / (2.0 * h) - g[j]));
      gmax = std::max(gmax, std::abs(g[j]));
    }
    worst_fd = std::max(worst_fd, dmax / gmax);
  }
  double worst_gap = -1e300;
  for (int rep = 0; rep < 10; ++rep) {
    auto p = testing::random_problem(rng, 40, 5, false);
    LbfgsConfig cfg;
    cfg.max_iterations = 500;
    cfg.gradient_tolerance = 1e-10;
    const auto fit = lbfgs_fit(std::vector<double>(6, 0.0), p.data, 0.05, cfg);
    worst_gap = std::max(worst_gap, fit.value - testing::gradient_descent_loss(p.data, 0.05));
  }
  v.check(worst_fd <= 1e-6, "finite-difference relative error " + fmt("%.3g", worst_fd));
  v.check(worst_gap <= 1e-6, "loss above gradient-descent oracle by " + fmt("%.3g", worst_gap));
  v.note("max FD rel err " + fmt("%.2g", worst_fd) + ", max loss gap " + fmt("%.2g", worst_gap));
  return v;
}

// --- 6. AUPRC ----------------------------------------------------------------

Verdict auprc_oracle() {
  Verdict v;
  std::mt19937_64 rng(42);
  double worst = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> s(200);
    std::vector<bool> y(200);
    std::uniform_int_distribution<int> level(0, 40);  // coarse scores force ties
    std::bernoulli_distribution pos(0.05 + 0.01 * (rep % 20));
    for (std::size_t i = 0; i < 200; ++i) {
      y[i] = pos(rng);
      s[i] = level(rng) / 40.0 + (y[i] ? 0.1 : 0.0);
    }
    if (std::none_of(y.begin(), y.end(), [](bool b) { return b; })) y[0] = true;
    std::unique_ptr<bool[]> l(new bool[200]);
    for (std::size_t i = 0; i < 200; ++i) l[i] = y[i];
    const double got = auprc(s, std::span<const bool>(l.get(), 200));
    worst = std::max(worst, std::abs(got - testing::brute_force_ap(s, y)));
  }
  const bool yl[5] = {true, true, false, false, false};
  const std::vector<double> perfect = {0.9, 0.8, 0.3, 0.2, 0.1};
  const double ap_perfect = auprc(perfect, std::span<const bool>(yl, 5));
  const double ap_constant = auprc(std::vector<double>(5, 0.5), std::span<const bool>(yl, 5));
  v.check(worst <= 1e-12, "max deviation " + fmt("%.3g", worst));
  v.check(ap_perfect == 1.0, "AP(perfect) = " + fmt("%.17g", ap_perfect));
  v.check(std::abs(ap_constant - 0.4) <= 1e-12, "AP(constant) = " + fmt("%.17g", ap_constant));
  v.note("max deviation " + fmt("%.2g", worst) + ", AP(perfect)=1, AP(constant)=prevalence");
  return v;
}

// --- 7 / 8. trends on the synthetic corpus -----------------------------------------

struct Corpus {
  FeatureCatalog catalog = synthetic_catalog();
  ExperimentConfig base;
  GenerationSummary summary;
  PreparedData data;
  FeatureView view;
};

Corpus& corpus() {
  static Corpus* c = [] {
    auto* c = new Corpus;
    c->base.generator.n_scripts = 100000;
    c->base.seeds = {0, 1, 2, 3, 4};
    c->data = prepare_synthetic(c->base.generator, c->catalog, &c->summary);
    c->view = make_view(c->data, "All");
    return c;
  }();
  return *c;
}

struct CellStats {
  double mean = 0.0, sd = 0.0;
};

// Runs every (config, seed) pair on the pool and returns per-config stats.
std::vector<CellStats> run_cells(const std::vector<ExperimentConfig>& cells) {
  auto& c = corpus();
  std::vector<SweepJob> jobs;
  for (const auto& cfg : cells) {
    for (auto seed : c.base.seeds) {
      SweepJob j;
      j.cfg = cfg;
      j.cfg.workers = 1;
      j.view = "All";
      j.seed = seed;
      jobs.push_back(j);
    }
  }
  std::map<std::string, FeatureView> views;
  views.emplace("All", c.view);
  const auto results = run_jobs(c.data, views, jobs, g_workers, nullptr);
  std::vector<CellStats> out(cells.size());
  const std::size_t k = c.base.seeds.size();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    std::vector<double> v;
    for (std::size_t s = 0; s < k; ++s) v.push_back(results[i * k + s].record.auprc);
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(k);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    out[i] = {m, std::sqrt(ss / static_cast<double>(k - 1))};
  }
  return out;
}

Verdict trend_reproduction() {
  Verdict v;
  auto& c = corpus();
  const double prevalence = static_cast<double>(c.summary.fingerprinting) / c.summary.scripts;
  v.note("corpus " + std::to_string(c.summary.scripts) + " scripts, prevalence " +
         fmt("%.4f", prevalence));

  const std::vector<std::size_t> ws = {1000, 10000};
  const std::vector<double> eps = {1.0, 5.0, 10.0, dp::kInf};
  std::vector<ExperimentConfig> cells;
  for (std::size_t w : ws) {
    for (double e : eps) {
      for (bool norm : {true, false}) {
        ExperimentConfig cfg = c.base;
        cfg.partition.participants = w;
        cfg.privacy.epsilon = e;
        cfg.normalization.enabled = norm;
        cells.push_back(cfg);
      }
    }
  }
  ExperimentConfig fl100 = c.base;
  fl100.partition.participants = 100;
  fl100.training.sampling_q = 1.0;
  cells.push_back(fl100);
  ExperimentConfig local = c.base;
  local.partition.participants = 1;
  cells.push_back(local);
  const auto stats = run_cells(cells);
  auto at = [&](std::size_t wi, std::size_t ei, bool norm) {
    return stats[(wi * eps.size() + ei) * 2 + (norm ? 0 : 1)];
  };
  const CellStats fl = stats[stats.size() - 2];
  const CellStats loc = stats[stats.size() - 1];
  // Centralised reference on the union of the same participants' data.
  double central = 0.0;
  for (auto seed : c.base.seeds) central += run_centralized_pooled(c.data, c.view, fl100, seed);
  central /= static_cast<double>(c.base.seeds.size());
  const double central_all = run_centralized(c.view, c.base);

  // (a)
  v.check(std::abs(fl.mean - central) <= 0.02,
          "(a) FL " + fmt("%.3f", fl.mean) + " vs centralized " + fmt("%.3f", central));
  v.note("(a) FL W=100 " + mean_sd(fl.mean, fl.sd) + " vs centralized on pooled participants " +
         fmt("%.3f", central) + " (all training scripts " + fmt("%.3f", central_all) + ")");
  // (b) consecutive epsilon levels, within one pooled standard deviation.
  for (std::size_t wi = 0; wi < ws.size(); ++wi) {
    for (bool norm : {true, false}) {
      std::string row = "(b) W=" + std::to_string(ws[wi]) + (norm ? " norm" : " raw") + ":";
      for (std::size_t ei = 0; ei < eps.size(); ++ei) {
        const auto s = at(wi, ei, norm);
        row += " " + mean_sd(s.mean, s.sd);
        if (ei == 0) continue;
        const auto p = at(wi, ei - 1, norm);
        const double tol = std::sqrt(p.sd * p.sd + s.sd * s.sd);
        v.check(p.mean <= s.mean + tol, "(b) order broken at W=" + std::to_string(ws[wi]) +
                                            " eps=" + format_epsilon(eps[ei - 1]) + " -> " +
                                            format_epsilon(eps[ei]));
      }
      v.note(row);
    }
  }
  // (c)
  v.check(fl.mean - loc.mean >= 0.10,
          "(c) FL " + fmt("%.3f", fl.mean) + " vs local " + fmt("%.3f", loc.mean));
  v.note("(c) local W=1 " + mean_sd(loc.mean, loc.sd));
  // (d) every W with eps <= 5.
  for (std::size_t wi = 0; wi < ws.size(); ++wi) {
    for (std::size_t ei = 0; ei < 2; ++ei) {
      const auto on = at(wi, ei, true), off = at(wi, ei, false);
      v.check(on.mean >= off.mean, "(d) W=" + std::to_string(ws[wi]) + " eps=" +
                                       format_epsilon(eps[ei]) + " norm " + fmt("%.3f", on.mean) +
                                       " < raw " + fmt("%.3f", off.mean));
    }
  }
  return v;
}

Verdict non_iidness() {
  Verdict v;
  auto& c = corpus();
  std::string row;
  std::vector<double> means;
  for (double frac : {0.0, 0.5, 1.0}) {
    ExperimentConfig cfg = c.base;
    cfg.partition.participants = 1000;
    cfg.partition.limited_knowledge_fraction = frac;
    double sum = 0.0;
    std::vector<double> per_seed;
    for (auto seed : c.base.seeds) {
      per_seed.push_back(partition_non_iidness(c.data, cfg, seed));
      sum += per_seed.back();
    }
    means.push_back(sum / static_cast<double>(per_seed.size()));
    row += " " + fmt("%.2f", frac) + "->" + fmt("%.3f", means.back());
    static std::vector<double> previous;
    if (!previous.empty()) {
      for (std::size_t s = 0; s < per_seed.size(); ++s) {
        v.check(per_seed[s] >= previous[s], "seed " + std::to_string(c.base.seeds[s]) +
                                                " decreases at fraction " + fmt("%.1f", frac));
      }
    }
    previous = per_seed;
  }
  v.note("mean score" + row + " (ratio to IID " + fmt("%.2f", means[1] / means[0]) + ", " +
         fmt("%.2f", means[2] / means[0]) + ")");

  // Two participants with disjoint single-type mixes: the smoothed
  // distributions differ in two cells only and the symmetric divergence is
  // log((1 + a) / a) / (1 + 15 a).
  const double a = kKlSmoothing;
  double worst = 0.0;
  for (double n1 : {1.0, 7.0, 250.0}) {
    for (double n2 : {1.0, 3.0, 40.0}) {
      ComboCounts p{}, q{};
      p[0] = n1;  // canvas only
      q[7] = n2;  // audio only
      const double want = std::log((1.0 + a) / a) / (1.0 + 15.0 * a);
      worst = std::max(worst, std::abs(non_iidness_from_counts({p, q}) - want));
    }
  }
  v.check(worst <= 1e-9, "closed-form KL deviation " + fmt("%.3g", worst));
  v.note("closed-form deviation " + fmt("%.2g", worst));
  return v;
}

// --- 9. determinism -------------------------------------------------------------

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

std::map<std::string, std::string> snapshot(const std::filesystem::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    files[e.path().filename().string()] = slurp(e.path());
  }
  return files;
}

// Drops the "workers" line of embedded config snapshots, the one field that
// legitimately differs between runs with different pool sizes.
std::map<std::string, std::string> without_workers(std::map<std::string, std::string> files) {
  for (auto& [name, text] : files) {
    std::istringstream in(text);
    std::string line, kept;
    while (std::getline(in, line)) {
      if (line.find("\"workers\":") == std::string::npos) kept += line + '\n';
    }
    text = kept;
  }
  return files;
}

Verdict determinism() {
  Verdict v;
  const auto root = std::filesystem::temp_directory_path() /
                    ("fpfed-acceptance-" + std::to_string(::getpid()));
  std::filesystem::remove_all(root);
  const FeatureCatalog catalog = synthetic_catalog();
  auto context = [&](const std::string& sub, std::size_t workers) {
    StageContext ctx;
    ctx.config = parse_experiment_config(preset_json("smoke"));
    ctx.config.privacy.epsilon = 5.0;
    ctx.config.partition.participants = 60;
    ctx.config.partition.domains_per_participant = 100;
    ctx.config.training.participants_per_round = 20;
    ctx.config.workers = workers;
    ctx.out_dir = (root / sub).string();
    ctx.seed = 7;
    ctx.catalog = &catalog;
    return ctx;
  };
  using Stage = std::function<void(const StageContext&)>;
  const std::vector<std::pair<std::string, Stage>> stages = {
      {"generate", [](const StageContext& c) { stage_generate(c); }},
      {"partition", [](const StageContext& c) { stage_partition(c); }},
      {"train", [](const StageContext& c) { stage_train(c); }},
      {"evaluate", [](const StageContext& c) { stage_evaluate(c); }},
      {"account", [](const StageContext& c) { stage_account(c); }}};
  const auto a = context("a", 1), b = context("b", 1), c = context("c", 3);
  for (const auto& [name, run] : stages) {
    run(a);
    run(b);
    run(c);
  }
  const auto first = snapshot(a.out_dir);
  v.check(first == snapshot(b.out_dir), "pipeline artifacts differ between identical runs");
  v.check(without_workers(first) == without_workers(snapshot(c.out_dir)),
          "pipeline artifacts depend on the worker count");
  // Delete each stage's outputs in turn and re-run that stage alone.
  const std::map<std::string, std::vector<const char*>> outputs = {
      {"generate", {artifact::kGeneration, artifact::kTrainTraces, artifact::kTestTraces,
                    artifact::kRanking}},
      {"partition", {artifact::kPartition}},
      {"train", {artifact::kModel, artifact::kNormStats, artifact::kRounds, artifact::kLedger}},
      {"evaluate", {artifact::kMetrics, artifact::kPrCurve}},
      {"account", {artifact::kPrivacy}}};
  for (const auto& [name, run] : stages) {
    for (const char* f : outputs.at(name)) std::filesystem::remove(a.path(f));
    run(a);
    const auto again = snapshot(a.out_dir);
    v.check(again == first, "re-running " + name + " changed its artifacts");
  }
  // A small sweep, serial versus pooled.
  auto sa = context("sweep-a", 1), sb = context("sweep-b", 3);
  for (auto* s : {&sa, &sb}) {
    s->config.generator.n_scripts = 6000;
    s->config.partition.domains_per_participant = 40;
    s->config.training.rounds = 3;
    s->config.seeds = {0, 1};
    stage_sweep(*s, "non_iid");
  }
  v.check(without_workers(snapshot(sa.out_dir)) == without_workers(snapshot(sb.out_dir)),
          "sweep outputs depend on the worker count");
  v.note(std::to_string(first.size()) + " pipeline artifacts and a sweep compared byte for byte");
  std::filesystem::remove_all(root);
  return v;
}

}  // namespace
}  // namespace fpfed

int main(int argc, char** argv) {
  using namespace fpfed;
  std::set<int> only;
  g_workers = std::max(1u, std::thread::hardware_concurrency());
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--workers" && i + 1 < argc) {
      g_workers = std::max(1, std::atoi(argv[++i]));
    } else {
      only.insert(std::atoi(arg.c_str()));
    }
  }
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"heuristic exactness", heuristic_exactness},
      {"no-noise reductions", no_noise_reductions},
      {"clipping contract", clipping_contract},
      {"accountant correctness", accountant},
      {"optimizer", optimizer},
      {"AUPRC oracle", auprc_oracle},
      {"trend reproduction", trend_reproduction},
      {"non-IIDness score", non_iidness},
      {"determinism", determinism}};
  bool all = true;
  const auto start = Clock::now();
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!only.empty() && !only.count(id)) continue;
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    all = all && v.pass;
    std::printf("%s %d %s (%.1f s): %s\n", v.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(),
                secs, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("total %.1f s\n", std::chrono::duration<double>(Clock::now() - start).count());
  return all ? 0 : 1;
}
