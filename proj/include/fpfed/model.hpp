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
#ifndef FPFED_MODEL_HPP_
#define FPFED_MODEL_HPP_

// Logistic-regression scorer, its regularised log-loss over sparse
// (optionally affinely normalised) data, and the clipped local update.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fpfed/dp.hpp"
#include "fpfed/error.hpp"
#include "fpfed/features.hpp"
#include "fpfed/lbfgs.hpp"

namespace fpfed {

struct LogisticModel {
  std::vector<double> weights;
  double bias = 0.0;

  LogisticModel() = default;
  explicit LogisticModel(std::size_t dim) : weights(dim, 0.0) {}

  std::size_t dim() const noexcept { return weights.size(); }

  // theta = weights ++ [bias]
  std::vector<double> theta() const {
    std::vector<double> t(weights);
    t.push_back(bias);
    return t;
  }
  static LogisticModel from_theta(std::span<const double> theta) {
    if (theta.empty()) throw InvalidInput("theta must contain at least the bias");
    LogisticModel m;
    m.weights.assign(theta.begin(), theta.end() - 1);
    m.bias = theta.back();
    return m;
  }

  friend bool operator==(const LogisticModel&, const LogisticModel&) = default;
};

inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
inline double softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

inline double predict_proba(const LogisticModel& model, std::span<const double> v) {
  if (v.size() != model.dim()) throw InvalidInput("predict_proba: dimension mismatch");
  double z = model.bias;
  for (std::size_t i = 0; i < v.size(); ++i) z += model.weights[i] * v[i];
  return sigmoid(z);
}

// Per-feature affine map x -> (x - shift) * scale applied on the fly.
struct AffineNormalizer {
  std::vector<double> shift;
  std::vector<double> scale;

  bool empty() const noexcept { return shift.empty(); }
  std::size_t dim() const noexcept { return shift.size(); }
};

// A participant's (or a pooled) view over rows of a feature matrix.
struct Dataset {
  const FeatureMatrix* matrix = nullptr;
  std::vector<std::uint32_t> rows;
  const AffineNormalizer* normalizer = nullptr;

  std::size_t size() const noexcept { return rows.size(); }
  bool empty() const noexcept { return rows.empty(); }
  std::size_t dim() const noexcept { return matrix ? matrix->cols() : 0; }

  static Dataset all_rows(const FeatureMatrix& m, const AffineNormalizer* norm = nullptr) {
    Dataset d{&m, {}, norm};
    d.rows.resize(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) d.rows[i] = static_cast<std::uint32_t>(i);
    return d;
  }
};

namespace model_detail {

// Effective weights/bias on raw features for an affine-normalised input:
// w.((v - mu) * s) + b = (w*s).v + (b - (w*s).mu)
struct Effective {
  std::vector<double> w;
  double b = 0.0;
};

inline Effective effective(std::span<const double> w, double b, const AffineNormalizer* norm) {
  Effective e{{w.begin(), w.end()}, b};
  if (norm && !norm->empty()) {
    for (std::size_t j = 0; j < w.size(); ++j) {
      e.w[j] = w[j] * norm->scale[j];
      e.b -= e.w[j] * norm->shift[j];
    }
  }
  return e;
}

inline double margin(const FeatureMatrix::RowView& row, const Effective& e) {
  double z = e.b;
  for (std::size_t k = 0; k < row.index.size(); ++k) z += e.w[row.index[k]] * row.value[k];
  return z;
}

}  // namespace model_detail

// Mean binary cross-entropy + (lambda/2)|w|^2 and its gradient over theta.
inline double loss_and_grad(std::span<const double> theta, const Dataset& data, double l2_lambda,
                            std::span<double> grad) {
  if (data.empty()) throw InvalidInput("loss_and_grad: empty dataset");
  const std::size_t dim = data.dim();
  if (theta.size() != dim + 1) throw InvalidInput("loss_and_grad: dimension mismatch");
  if (data.normalizer && !data.normalizer->empty() && data.normalizer->dim() != dim) {
    throw InvalidInput("loss_and_grad: normaliser dimension mismatch");
  }
  const auto w = theta.first(dim);
  const double b = theta[dim];
  const auto eff = model_detail::effective(w, b, data.normalizer);

  std::vector<double> acc(dim, 0.0);
  double loss = 0.0, rsum = 0.0;
  for (auto r : data.rows) {
    const auto row = data.matrix->row(r);
    const double z = model_detail::margin(row, eff);
    const bool y = data.matrix->label(r);
    loss += softplus(z) - (y ? z : 0.0);
    const double resid = sigmoid(z) - (y ? 1.0 : 0.0);
    rsum += resid;
    for (std::size_t k = 0; k < row.index.size(); ++k) acc[row.index[k]] += resid * row.value[k];
  }
  const double inv_n = 1.0 / static_cast<double>(data.size());
  double reg = 0.0;
  for (double x : w) reg += x * x;
  loss = loss * inv_n + 0.5 * l2_lambda * reg;

  if (!grad.empty()) {
    const auto* norm = data.normalizer;
    const bool affine = norm && !norm->empty();
    for (std::size_t j = 0; j < dim; ++j) {
      double gj = affine ? (acc[j] - rsum * norm->shift[j]) * norm->scale[j] : acc[j];
      grad[j] = gj * inv_n + l2_lambda * w[j];
    }
    grad[dim] = rsum * inv_n;
  }
  return loss;
}

inline double loss_and_grad(const LogisticModel& model, const Dataset& data, double l2_lambda,
                            std::vector<double>* grad = nullptr) {
  const auto theta = model.theta();
  std::vector<double> g(grad ? theta.size() : 0);
  const double v = loss_and_grad(theta, data, l2_lambda, g);
  if (grad) *grad = std::move(g);
  return v;
}

// Scores every row of `data` (in data.rows order).
inline std::vector<double> predict_rows(const LogisticModel& model, const Dataset& data) {
  if (model.dim() != data.dim()) throw InvalidInput("predict_rows: dimension mismatch");
  const auto eff = model_detail::effective(model.weights, model.bias, data.normalizer);
  std::vector<double> out;
  out.reserve(data.size());
  for (auto r : data.rows) out.push_back(sigmoid(model_detail::margin(data.matrix->row(r), eff)));
  return out;
}

struct LocalUpdateConfig {
  std::size_t epochs = 1;
  double clip = 1.0;
  double l2_lambda = 1e-4;
  LbfgsConfig optimizer;

  void validate() const {
    if (epochs < 1) throw InvalidInput("local epochs must be >= 1");
    if (!(clip > 0.0)) throw InvalidInput("clip must be positive");
    if (l2_lambda < 0.0) throw InvalidInput("l2 lambda must be >= 0");
  }
};

inline LbfgsResult lbfgs_fit(std::vector<double> init, const Dataset& data, double l2_lambda,
                             const LbfgsConfig& cfg) {
  for (double x : init) {
    if (!std::isfinite(x)) throw InvalidInput("lbfgs_fit: non-finite initial point");
  }
  auto objective = [&](std::span<const double> x, std::span<double> g) {
    return loss_and_grad(x, data, l2_lambda, g);
  };
  return lbfgs_minimize(objective, std::move(init), cfg);
}

// Runs E epochs of the optimiser from theta_global, re-anchoring to the
// clipped displacement after each epoch. The returned delta has L2 norm at
// most cfg.clip; it is zero for an empty dataset.
inline std::vector<double> local_update(const Dataset& data, std::span<const double> theta_global,
                                        const LocalUpdateConfig& cfg) {
  cfg.validate();
  std::vector<double> delta(theta_global.size(), 0.0);
  if (data.empty()) return delta;
  std::vector<double> theta(theta_global.begin(), theta_global.end());
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    auto fit = lbfgs_fit(std::move(theta), data, cfg.l2_lambda, cfg.optimizer);
    for (std::size_t i = 0; i < delta.size(); ++i) delta[i] = fit.x[i] - theta_global[i];
    dp::clip_l2_inplace(delta, cfg.clip);
    theta.assign(theta_global.begin(), theta_global.end());
    for (std::size_t i = 0; i < delta.size(); ++i) theta[i] += delta[i];
  }
  return delta;
}

// Importance ranking of a model trained on `expected_dim` features.
inline std::vector<std::uint32_t> feature_importance(const LogisticModel& model,
                                                     std::size_t expected_dim) {
  if (model.dim() != expected_dim) {
    throw InvalidInput("feature_importance: model has " + std::to_string(model.dim()) +
                       " weights, expected " + std::to_string(expected_dim));
  }
  return feature_importance(model.weights);
}

// --- checkpoint file -------------------------------------------------------

struct Checkpoint {
  LogisticModel model;
  std::string feature_set;
  std::uint64_t catalog_digest = 0;
};

inline void save_checkpoint(const Checkpoint& c, const std::string& path) {
  nlohmann::ordered_json j;
  j["format"] = "fpfed-model/1";
  j["feature_set"] = c.feature_set;
  j["catalog_digest"] = trace_json::hex16(c.catalog_digest);
  j["dim"] = c.model.dim();
  j["bias"] = c.model.bias;
  j["weights"] = c.model.weights;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write checkpoint: " + path);
  out << j.dump(1) << '\n';
}

inline Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open checkpoint: " + path);
  try {
    auto j = nlohmann::json::parse(in);
    Checkpoint c;
    c.feature_set = j.at("feature_set").get<std::string>();
    c.catalog_digest = std::stoull(j.at("catalog_digest").get<std::string>(), nullptr, 16);
    c.model.bias = j.at("bias").get<double>();
    c.model.weights = j.at("weights").get<std::vector<double>>();
    if (c.model.dim() != j.at("dim").get<std::size_t>()) {
      throw ParseError(0, "checkpoint dim does not match weights");
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, std::string("checkpoint: ") + e.what());
  }
}

}  // namespace fpfed

#endif  // FPFED_MODEL_HPP_
