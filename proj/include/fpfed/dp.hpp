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
#ifndef FPFED_DP_HPP_
#define FPFED_DP_HPP_

// Gaussian-mechanism primitives and Renyi-DP accounting for the
// Poisson-subsampled Gaussian mechanism.
//
// The subsampled-Gaussian RDP bound follows Mironov, Talwar & Zhang (2019):
// integer orders use the exact binomial expansion, fractional orders the
// two-sided series with erfc tails.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "fpfed/error.hpp"
#include "fpfed/random.hpp"

namespace fpfed::dp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kDefaultDelta = 1e-5;

inline double l2_norm(std::span<const double> v) {
  // Scaled accumulation avoids overflow for very large entries.
  double scale = 0.0;
  for (double x : v) scale = std::max(scale, std::abs(x));
  if (scale == 0.0 || !std::isfinite(scale)) return scale;
  double s = 0.0;
  for (double x : v) {
    double y = x / scale;
    s += y * y;
  }
  return scale * std::sqrt(s);
}

// v * min(1, S / ||v||_2). Vectors already inside the ball are returned
// unchanged (bitwise).
inline void clip_l2_inplace(std::span<double> v, double clip) {
  if (!(clip > 0.0) || !std::isfinite(clip)) throw InvalidInput("clip bound must be positive");
  for (double x : v) {
    if (!std::isfinite(x)) throw InvalidInput("clip_l2: non-finite input");
  }
  const double norm = l2_norm(v);
  if (norm <= clip) return;
  const double factor = clip / norm;
  for (double& x : v) x *= factor;
  // Rounding can leave the norm a few ulps above the bound.
  for (int i = 0; i < 4 && l2_norm(v) > clip; ++i) {
    for (double& x : v) x = std::nextafter(x, 0.0);
  }
}

inline std::vector<double> clip_l2(std::span<const double> v, double clip) {
  std::vector<double> out(v.begin(), v.end());
  clip_l2_inplace(out, clip);
  return out;
}

inline std::vector<double> gaussian_noise(double sigma, std::size_t dim, Rng& rng) {
  if (sigma < 0.0 || std::isnan(sigma)) throw InvalidInput("noise sigma must be >= 0");
  std::vector<double> out(dim, 0.0);
  if (sigma == 0.0) return out;
  std::normal_distribution<double> n(0.0, sigma);
  for (double& x : out) x = n(rng);
  return out;
}

// Per-coordinate noise standard deviation z*S/(qW) for a sum normalised by
// the expected number of participants.
inline double noise_stddev(double z, double clip, double q, double participants) {
  if (!(q * participants > 0.0)) throw InvalidInput("noise_stddev: q*W must be positive");
  if (z < 0.0 || clip <= 0.0) throw InvalidInput("noise_stddev: z >= 0 and S > 0 required");
  return z * clip / (q * participants);
}

struct PrivacyParams {
  double epsilon_target = kInf;
  double delta = kDefaultDelta;
  double noise_scale_z = 0.0;
  double clip_S = 1.0;
  double sampling_q = 1.0;
  std::int64_t rounds_R = 1;
  std::int64_t participants_W = 1;

  void validate() const {
    if (!(epsilon_target > 0.0)) throw InvalidInput("epsilon must be positive");
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidInput("delta must lie in (0,1)");
    if (noise_scale_z < 0.0) throw InvalidInput("noise scale must be >= 0");
    if (!(clip_S > 0.0)) throw InvalidInput("clip S must be positive");
    if (!(sampling_q > 0.0 && sampling_q <= 1.0)) throw InvalidInput("q must lie in (0,1]");
    if (rounds_R < 1) throw InvalidInput("rounds R must be >= 1");
    if (participants_W < 1) throw InvalidInput("participants W must be >= 1");
    if (sampling_q * static_cast<double>(participants_W) < 1.0) {
      throw InvalidInput("q*W must be >= 1");
    }
  }
};

namespace detail {

inline double log_add(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

// log(exp(a) - exp(b)) for a >= b.
inline double log_sub(double a, double b) {
  if (b == -kInf) return a;
  if (b >= a) return -kInf;
  return a + std::log1p(-std::exp(b - a));
}

inline double log_erfc(double x) {
  if (x < 20.0) return std::log(std::erfc(x));
  // Asymptotic series; accurate to double precision for x >= 20.
  const double x2 = x * x;
  const double inv = 1.0 / x2;
  const double series = 1.0 - 0.5 * inv + 0.75 * inv * inv - 1.875 * inv * inv * inv +
                        6.5625 * inv * inv * inv * inv;
  return -x2 - std::log(x) - 0.5 * std::log(std::numbers::pi) + std::log(series);
}

inline double log_a_int(double q, double sigma, std::int64_t alpha) {
  double log_a = -kInf;
  const double lq = std::log(q), l1q = std::log1p(-q);
  for (std::int64_t i = 0; i <= alpha; ++i) {
    const double log_coef = std::lgamma(alpha + 1.0) - std::lgamma(i + 1.0) -
                            std::lgamma(alpha - i + 1.0) + i * lq + (alpha - i) * l1q;
    const double s = log_coef + static_cast<double>(i * i - i) / (2.0 * sigma * sigma);
    log_a = log_add(log_a, s);
  }
  return log_a;
}

inline double log_a_frac(double q, double sigma, double alpha) {
  double log_a0 = -kInf, log_a1 = -kInf;
  const double z0 = sigma * sigma * std::log(1.0 / q - 1.0) + 0.5;
  const double lq = std::log(q), l1q = std::log1p(-q);
  const double s2 = std::sqrt(2.0) * sigma;
  double log_abs_coef = 0.0;  // log|binom(alpha, 0)|
  bool positive = true;
  for (int i = 0; i < 1000000; ++i) {
    const double j = alpha - i;
    const double log_t0 = log_abs_coef + i * lq + j * l1q;
    const double log_t1 = log_abs_coef + j * lq + i * l1q;
    const double log_e0 = std::log(0.5) + log_erfc((i - z0) / s2);
    const double log_e1 = std::log(0.5) + log_erfc((z0 - j) / s2);
    const double log_s0 = log_t0 + (i * i - i) / (2.0 * sigma * sigma) + log_e0;
    const double log_s1 = log_t1 + (j * j - j) / (2.0 * sigma * sigma) + log_e1;
    if (positive) {
      log_a0 = log_add(log_a0, log_s0);
      log_a1 = log_add(log_a1, log_s1);
    } else {
      log_a0 = log_sub(log_a0, log_s0);
      log_a1 = log_sub(log_a1, log_s1);
    }
    if (std::max(log_s0, log_s1) < -30.0 && i > alpha) break;
    // binom(alpha, i+1) = binom(alpha, i) * (alpha - i) / (i + 1)
    const double ratio = (alpha - i) / (i + 1.0);
    log_abs_coef += std::log(std::abs(ratio));
    if (ratio < 0.0) positive = !positive;
  }
  return log_add(log_a0, log_a1);
}

}  // namespace detail

// RDP of one Poisson-subsampled Gaussian query with sampling rate q and
// noise multiplier z, at a single order alpha > 1.
inline double rdp_subsampled_gaussian(double q, double z, double alpha) {
  if (!(alpha > 1.0)) throw InvalidInput("Renyi order must be > 1");
  if (!(q > 0.0 && q <= 1.0)) throw InvalidInput("sampling rate must lie in (0,1]");
  if (z < 0.0 || std::isnan(z)) throw InvalidInput("noise multiplier must be >= 0");
  if (z == 0.0) return kInf;
  if (std::isinf(alpha)) return kInf;
  if (q == 1.0) return alpha / (2.0 * z * z);
  const double log_a = (alpha == std::floor(alpha) && alpha < 1e6)
                           ? detail::log_a_int(q, z, static_cast<std::int64_t>(alpha))
                           : detail::log_a_frac(q, z, alpha);
  return std::max(0.0, log_a / (alpha - 1.0));
}

inline std::vector<double> rdp_subsampled_gaussian(double q, double z,
                                                   std::span<const double> orders) {
  std::vector<double> out;
  out.reserve(orders.size());
  for (double a : orders) out.push_back(rdp_subsampled_gaussian(q, z, a));
  return out;
}

// {1.25, 1.5, ..., 63.75, 64} U {128, 256}.
inline const std::vector<double>& default_orders() {
  static const std::vector<double> orders = [] {
    std::vector<double> o;
    for (int k = 5; k <= 256; ++k) o.push_back(k * 0.25);
    o.push_back(128.0);
    o.push_back(256.0);
    return o;
  }();
  return orders;
}

class PrivacyLedger {
 public:
  struct Entry {
    std::string mechanism;
    double q = 1.0;
    double z = 0.0;
    std::int64_t count = 0;
  };

  explicit PrivacyLedger(std::vector<double> orders = default_orders())
      : orders_(std::move(orders)), rdp_(orders_.size(), 0.0) {
    for (double a : orders_) {
      if (!(a > 1.0)) throw InvalidInput("Renyi order must be > 1");
    }
  }

  // Composes `count` identical subsampled-Gaussian queries.
  void charge(const std::string& mechanism, double q, double z, std::int64_t count = 1) {
    if (count < 0) throw InvalidInput("query count must be >= 0");
    log_.push_back({mechanism, q, z, count});
    if (count == 0) return;
    const auto& per = rdp_for(q, z);
    for (std::size_t i = 0; i < orders_.size(); ++i) rdp_[i] += static_cast<double>(count) * per[i];
  }

  void merge(const PrivacyLedger& other) {
    if (other.orders_ != orders_) throw InvalidInput("ledger order grids differ");
    for (std::size_t i = 0; i < orders_.size(); ++i) rdp_[i] += other.rdp_[i];
    log_.insert(log_.end(), other.log_.begin(), other.log_.end());
  }

  bool empty() const noexcept { return log_.empty(); }
  const std::vector<double>& orders() const noexcept { return orders_; }
  const std::vector<double>& accumulated_rdp() const noexcept { return rdp_; }
  const std::vector<Entry>& query_log() const noexcept { return log_; }

  // Total query count charged under `mechanism`.
  std::int64_t count(const std::string& mechanism) const {
    std::int64_t n = 0;
    for (const auto& e : log_) {
      if (e.mechanism == mechanism) n += e.count;
    }
    return n;
  }

 private:
  const std::vector<double>& rdp_for(double q, double z) {
    auto key = std::make_pair(q, z);
    auto it = cache_.find(key);
    if (it == cache_.end()) it = cache_.emplace(key, rdp_subsampled_gaussian(q, z, orders_)).first;
    return it->second;
  }

  std::vector<double> orders_;
  std::vector<double> rdp_;
  std::vector<Entry> log_;
  std::map<std::pair<double, double>, std::vector<double>> cache_;
};

struct EpsilonReport {
  double epsilon = kInf;
  double order = 0.0;
};

// eps = min_a [ rdp(a) + log(1/delta) / (a - 1) ].
inline EpsilonReport epsilon_at(std::span<const double> orders, std::span<const double> rdp,
                                double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidInput("delta must lie in (0,1)");
  EpsilonReport best;
  for (std::size_t i = 0; i < orders.size(); ++i) {
    const double eps = rdp[i] + std::log(1.0 / delta) / (orders[i] - 1.0);
    if (eps < best.epsilon) best = {eps, orders[i]};
  }
  return best;
}

inline double compose_and_convert(const PrivacyLedger& ledger, double delta) {
  if (ledger.empty()) throw InvalidInput("compose_and_convert: empty ledger");
  return epsilon_at(ledger.orders(), ledger.accumulated_rdp(), delta).epsilon;
}

// A batch of identical queries in a query plan.
struct QueryGroup {
  std::string mechanism;
  double q = 1.0;
  std::int64_t count = 1;
};

inline constexpr double kMinNoise = 1e-2;
inline constexpr double kMaxNoise = 1e3;

// Smallest noise multiplier z (to relative precision `rel_tol`) such that
// charging `plan` at z on top of `base` keeps eps <= target_eps. Returns 0
// for an infinite target.
inline double calibrate_noise(double target_eps, double delta, const std::vector<QueryGroup>& plan,
                              const PrivacyLedger& base = PrivacyLedger(),
                              double rel_tol = 1e-4) {
  if (std::isinf(target_eps) && target_eps > 0) return 0.0;
  if (!(target_eps > 0.0)) throw InvalidInput("target epsilon must be positive");
  if (plan.empty()) throw InvalidInput("calibrate_noise: empty query plan");
  auto eps_at = [&](double z) {
    PrivacyLedger l = base;
    for (const auto& g : plan) l.charge(g.mechanism, g.q, z, g.count);
    return compose_and_convert(l, delta);
  };
  if (eps_at(kMaxNoise) > target_eps) {
    throw CalibrationError("target epsilon unreachable with z <= 1000");
  }
  if (eps_at(kMinNoise) <= target_eps) return kMinNoise;
  double lo = kMinNoise, hi = kMaxNoise;  // eps(lo) > target >= eps(hi)
  while (hi / lo - 1.0 > rel_tol) {
    const double mid = std::sqrt(lo * hi);
    if (eps_at(mid) <= target_eps) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

// Noise for the two phases of training. `norm_fraction` of the target is
// spent on the normalisation queries alone; the training rounds get the
// rest of the budget under joint composition.
struct SplitCalibration {
  double z_norm = 0.0;
  double z_train = 0.0;
};

inline SplitCalibration calibrate_split(double target_eps, double delta,
                                        const std::vector<QueryGroup>& norm_plan,
                                        const std::vector<QueryGroup>& train_plan,
                                        double norm_fraction) {
  SplitCalibration out;
  if (std::isinf(target_eps)) return out;
  PrivacyLedger base;
  if (!norm_plan.empty()) {
    if (!(norm_fraction > 0.0 && norm_fraction < 1.0)) {
      throw InvalidInput("normalisation budget fraction must lie in (0,1)");
    }
    out.z_norm = calibrate_noise(norm_fraction * target_eps, delta, norm_plan);
    for (const auto& g : norm_plan) base.charge(g.mechanism, g.q, out.z_norm, g.count);
  }
  out.z_train = calibrate_noise(target_eps, delta, train_plan, base);
  return out;
}

}  // namespace fpfed::dp

#endif  // FPFED_DP_HPP_
