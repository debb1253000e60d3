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

#ifndef FPFED_TESTS_SUPPORT_RDP_ORACLE_HPP_
#define FPFED_TESTS_SUPPORT_RDP_ORACLE_HPP_

// Independent RDP reference for the Poisson-subsampled Gaussian mechanism,
// evaluated from the defining integral
//   A = E_{x ~ N(0, z^2)} [ ((1 - q) + q * exp((2x - 1) / (2 z^2)))^alpha ]
// with adaptive Gauss-Kronrod quadrature in extended precision. The
// integrand is A - 1 so that tiny divergences keep their relative accuracy.

#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace fpfed::testing {

inline double rdp_quadrature(double q, double z, double alpha) {
  using R = long double;
  const R s2 = static_cast<R>(z) * z;
  const R norm = 1.0L / (std::sqrt(2.0L * std::numbers::pi_v<R>) * z);
  auto f = [&](R x) -> R {
    const R density = norm * std::exp(-x * x / (2.0L * s2));
    if (density == 0.0L) return 0.0L;
    const R lr = std::expm1((2.0L * x - 1.0L) / (2.0L * s2));
    return density * std::expm1(static_cast<R>(alpha) * std::log1p(static_cast<R>(q) * lr));
  };
  // The integrand's mass moves from 0 towards alpha as the likelihood ratio
  // grows; cover that span plus wide Gaussian tails in sub-intervals.
  const R lo = -40.0L * z, hi = static_cast<R>(alpha) + 40.0L * z;
  const R step = 0.5L * z;
  R a_minus_1 = 0.0L;
  for (R a = lo; a < hi; a += step) {
    a_minus_1 += boost::math::quadrature::gauss_kronrod<R, 61>::integrate(f, a, a + step, 8,
                                                                          1e-14L);
  }
  return static_cast<double>(std::log1p(a_minus_1) / (static_cast<R>(alpha) - 1.0L));
}

struct RdpPoint {
  double q, z, alpha;
};

// Twenty (q, z, alpha) points mixing integer and fractional orders.
inline std::vector<RdpPoint> rdp_grid() {
  return {{0.001, 1.0, 2.0},  {0.001, 5.0, 1.5},  {0.001, 0.8, 8.0},  {0.005, 2.0, 3.75},
          {0.01, 1.0, 2.0},   {0.01, 1.0, 2.5},   {0.01, 1.2, 12.0},  {0.01, 3.0, 32.0},
          {0.02, 0.9, 5.25},  {0.05, 1.5, 6.0},   {0.05, 4.0, 64.0},  {0.1, 1.0, 1.25},
          {0.1, 2.0, 16.5},   {0.1, 0.7, 4.0},    {0.2, 3.0, 20.0},   {0.25, 1.1, 7.5},
          {0.3, 5.0, 48.0},   {0.5, 2.5, 10.0},   {0.5, 1.0, 3.0},    {0.9, 4.0, 25.75}};
}

// min over a > 1 of R*a/(2 z^2) + log(1/delta)/(a - 1): the continuous
// optimum of the order-grid conversion for an unsampled Gaussian.
inline double epsilon_unsampled_continuous(double z, double rounds, double delta) {
  const double c = rounds / (2.0 * z * z);
  const double l = std::log(1.0 / delta);
  return c + 2.0 * std::sqrt(c * l);
}

}  // namespace fpfed::testing

#endif  // FPFED_TESTS_SUPPORT_RDP_ORACLE_HPP_
