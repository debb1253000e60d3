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
#ifndef FPFED_TESTS_SUPPORT_GD_ORACLE_HPP_
#define FPFED_TESTS_SUPPORT_GD_ORACLE_HPP_

// Plain gradient descent with step 1/L, run long enough to be essentially
// converged on small strongly convex logistic problems.

#include <algorithm>
#include <vector>

#include "fpfed/model.hpp"

namespace fpfed::testing {

inline double gradient_descent_loss(const Dataset& d, double lambda, int iterations = 200000) {
  double lip = 0.0;
  for (auto r : d.rows) {
    double s = 1.0;
    for (double v : d.matrix->row(r).value) s += v * v;
    lip = std::max(lip, s);
  }
  const double step = 1.0 / (0.25 * lip + lambda);
  std::vector<double> x(d.dim() + 1, 0.0), g(x.size());
  double f = 0.0;
  for (int it = 0; it < iterations; ++it) {
    f = loss_and_grad(x, d, lambda, g);
    for (std::size_t j = 0; j < x.size(); ++j) x[j] -= step * g[j];
  }
  return f;
}

}  // namespace fpfed::testing

#endif  // FPFED_TESTS_SUPPORT_GD_ORACLE_HPP_
