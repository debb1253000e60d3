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
#ifndef FPFED_LBFGS_HPP_
#define FPFED_LBFGS_HPP_

// Limited-memory BFGS with a strong-Wolfe line search (bracketing + zoom
// with safeguarded cubic interpolation, Nocedal & Wright Alg. 3.5/3.6).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <span>
#include <vector>

#include "fpfed/error.hpp"

namespace fpfed {

struct LbfgsConfig {
  std::size_t history = 10;
  std::size_t max_iterations = 100;
  double gradient_tolerance = 1e-5;
  double c1 = 1e-4;
  double c2 = 0.9;
  std::size_t max_line_search = 25;
};

struct LbfgsResult {
  std::vector<double> x;
  double value = 0.0;
  double gradient_norm = 0.0;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  std::size_t fallback_steps = 0;
  bool converged = false;
};

namespace lbfgs_detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

// Minimiser of the cubic through (a, fa, da) and (b, fb, db), or the
// midpoint when the interpolant is degenerate or leaves the safe interior.
inline double cubic_step(double a, double fa, double da, double b, double fb, double db) {
  const double lo = std::min(a, b), hi = std::max(a, b);
  const double d1 = da + db - 3.0 * (fa - fb) / (a - b);
  const double rad = d1 * d1 - da * db;
  double t = 0.5 * (a + b);
  if (rad >= 0.0 && std::isfinite(rad)) {
    const double d2 = std::copysign(std::sqrt(rad), b - a);
    const double denom = db - da + 2.0 * d2;
    if (denom != 0.0) {
      const double c = b - (b - a) * (db + d2 - d1) / denom;
      if (std::isfinite(c)) t = c;
    }
  }
  const double margin = 0.1 * (hi - lo);
  if (t < lo + margin || t > hi - margin) t = 0.5 * (a + b);
  return t;
}

}  // namespace lbfgs_detail

// Minimises `f`, which must have the signature
//   double f(std::span<const double> x, std::span<double> grad_out).
template <typename Objective>
LbfgsResult lbfgs_minimize(Objective&& f, std::vector<double> x0, const LbfgsConfig& cfg) {
  using lbfgs_detail::dot;
  using lbfgs_detail::norm2;
  const std::size_t n = x0.size();
  LbfgsResult res;
  res.x = std::move(x0);
  std::vector<double> g(n), d(n), x_new(n), g_new(n);

  auto eval = [&](std::span<const double> x, std::span<double> grad) {
    ++res.evaluations;
    return f(x, grad);
  };

  double fx = eval(res.x, g);
  if (!std::isfinite(fx)) throw LineSearchError("objective is not finite at the start point");

  std::deque<std::vector<double>> s_hist, y_hist;
  std::deque<double> rho_hist;
  std::vector<double> alpha_buf;

  for (res.iterations = 0; res.iterations < cfg.max_iterations; ++res.iterations) {
    const double gnorm = norm2(g);
    res.gradient_norm = gnorm;
    if (gnorm <= cfg.gradient_tolerance) {
      res.converged = true;
      break;
    }

    // Two-loop recursion: d = -H g.
    for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
    const std::size_t m = s_hist.size();
    alpha_buf.assign(m, 0.0);
    for (std::size_t k = m; k-- > 0;) {
      alpha_buf[k] = rho_hist[k] * dot(s_hist[k], d);
      for (std::size_t i = 0; i < n; ++i) d[i] -= alpha_buf[k] * y_hist[k][i];
    }
    if (m > 0) {
      const double gamma = dot(s_hist.back(), y_hist.back()) / dot(y_hist.back(), y_hist.back());
      for (double& v : d) v *= gamma;
    }
    for (std::size_t k = 0; k < m; ++k) {
      const double beta = rho_hist[k] * dot(y_hist[k], d);
      for (std::size_t i = 0; i < n; ++i) d[i] += (alpha_buf[k] - beta) * s_hist[k][i];
    }
    double dphi0 = dot(g, d);
    if (!(dphi0 < 0.0)) {
      // Lost descent (numerical breakdown): restart from steepest descent.
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
      dphi0 = -gnorm * gnorm;
    }
    const double step0 = s_hist.empty() ? std::min(1.0, 1.0 / gnorm) : 1.0;

    // phi(a) = f(x + a d); evaluates into x_new / g_new / f_last.
    double f_last = fx;
    auto phi = [&](double a, double& dphi) {
      for (std::size_t i = 0; i < n; ++i) x_new[i] = res.x[i] + a * d[i];
      f_last = eval(x_new, g_new);
      dphi = dot(g_new, d);
      return f_last;
    };

    auto line_search = [&]() -> double {
      const double armijo = cfg.c1 * dphi0;
      const double curvature = -cfg.c2 * dphi0;
      double a_prev = 0.0, f_prev = fx, d_prev = dphi0;
      double a = step0;
      auto zoom = [&](double lo, double f_lo, double d_lo, double hi, double f_hi,
                      double d_hi) -> double {
        for (std::size_t it = 0; it < cfg.max_line_search; ++it) {
          double a_j = lbfgs_detail::cubic_step(lo, f_lo, d_lo, hi, f_hi, d_hi);
          if (!std::isfinite(f_hi)) a_j = 0.5 * (lo + hi);
          double d_j = 0.0;
          const double f_j = phi(a_j, d_j);
          if (!std::isfinite(f_j) || f_j > fx + a_j * armijo || f_j >= f_lo) {
            hi = a_j;
            f_hi = f_j;
            d_hi = d_j;
          } else {
            if (std::abs(d_j) <= curvature) return a_j;
            if (d_j * (hi - lo) >= 0.0) {
              hi = lo;
              f_hi = f_lo;
              d_hi = d_lo;
            }
            lo = a_j;
            f_lo = f_j;
            d_lo = d_j;
          }
          if (std::abs(hi - lo) <= 1e-16 * std::max(1.0, std::abs(lo))) break;
        }
        // Accept the best sufficient-decrease point found, if any.
        if (lo > 0.0) {
          double dd = 0.0;
          phi(lo, dd);
          return lo;
        }
        throw LineSearchError("zoom failed to find an acceptable step");
      };
      for (std::size_t it = 0; it < cfg.max_line_search; ++it) {
        double d_a = 0.0;
        const double f_a = phi(a, d_a);
        if (!std::isfinite(f_a) || f_a > fx + a * armijo || (it > 0 && f_a >= f_prev)) {
          return zoom(a_prev, f_prev, d_prev, a, f_a, d_a);
        }
        if (std::abs(d_a) <= curvature) return a;
        if (d_a >= 0.0) return zoom(a, f_a, d_a, a_prev, f_prev, d_prev);
        a_prev = a;
        f_prev = f_a;
        d_prev = d_a;
        a *= 2.0;
      }
      throw LineSearchError("line search did not terminate");
    };

    try {
      line_search();
    } catch (const LineSearchError&) {
      // Fallback: backtracking gradient step with fresh curvature memory.
      ++res.fallback_steps;
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
      dphi0 = -gnorm * gnorm;
      double a = std::min(1.0, 1.0 / gnorm);
      bool ok = false;
      for (int k = 0; k < 60; ++k, a *= 0.5) {
        double dd = 0.0;
        const double f_a = phi(a, dd);
        if (std::isfinite(f_a) && f_a <= fx + cfg.c1 * a * dphi0) {
          ok = true;
          break;
        }
      }
      if (!ok) break;  // No progress possible at working precision.
    }

    std::vector<double> s(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = x_new[i] - res.x[i];
      y[i] = g_new[i] - g[i];
    }
    const double sy = dot(s, y);
    res.x.swap(x_new);
    g.swap(g_new);
    fx = f_last;
    if (sy > 1e-12 * norm2(s) * norm2(y)) {
      if (s_hist.size() == cfg.history) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
    }
  }
  res.value = fx;
  res.gradient_norm = norm2(g);
  if (res.gradient_norm <= cfg.gradient_tolerance) res.converged = true;
  return res;
}

}  // namespace fpfed

#endif  // FPFED_LBFGS_HPP_
