/*
 * Copyright 2026 The mdbench Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "mdb/logreg.hpp"

#include <algorithm>
#include <cmath>

#include "mdb/kernels.hpp"

namespace mdb {

LogRegParams LogRegParams::from(const Hyperparams& hp) {
  LogRegParams p;
  if (auto it = hp.find("C"); it != hp.end()) p.C = it->second;
  if (auto it = hp.find("max_epochs"); it != hp.end()) p.max_epochs = static_cast<int>(it->second);
  if (auto it = hp.find("tolerance"); it != hp.end()) p.tolerance = it->second;
  p.validate();
  return p;
}

void LogRegParams::validate() const {
  if (!(C > 0.0)) throw PreconditionError("logistic regression C must be > 0");
  if (max_epochs < 1) throw PreconditionError("logistic regression max_epochs must be >= 1");
}

Standardizer Standardizer::fit(const FeatureMatrix& x) {
  const std::size_t n = x.rows(), p = x.cols();
  Standardizer s;
  s.center.assign(p, 0.0);
  s.scale.assign(p, 1.0);
  if (n == 0) return s;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) s.center[j] += x.at(i, j);
  }
  for (auto& c : s.center) c /= static_cast<double>(n);
  std::vector<double> var(p, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      const double d = x.at(i, j) - s.center[j];
      var[j] += d * d;
    }
  }
  for (std::size_t j = 0; j < p; ++j) {
    const double sd = std::sqrt(var[j] / static_cast<double>(n));
    s.scale[j] = sd > 1e-12 ? sd : 1.0;
  }
  return s;
}

std::vector<double> Standardizer::apply(const FeatureMatrix& x) const {
  const std::size_t n = x.rows(), p = x.cols();
  std::vector<double> z(n * p);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) z[i * p + j] = (x.at(i, j) - center[j]) / scale[j];
  }
  return z;
}

namespace {

double penalty_value(std::span<const double> w, Penalty penalty, double C) {
  double s = 0.0;
  if (penalty == Penalty::L1) {
    for (const double v : w) s += std::abs(v);
  } else {
    for (const double v : w) s += 0.5 * v * v;
  }
  return s / C;
}

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

}  // namespace

double logreg_objective(std::span<const double> z, std::size_t cols, std::span<const std::uint8_t> y,
                        std::span<const double> w, double b, Penalty penalty, double C) {
  std::vector<double> scratch(cols);
  const auto r = kernels::omp::logistic_loss_grad(z, cols, y, w, b, scratch);
  return r.loss + penalty_value(w, penalty, C);
}

double logreg_smooth_gradient(std::span<const double> z, std::size_t cols,
                              std::span<const std::uint8_t> y, std::span<const double> w, double b,
                              Penalty penalty, double C, std::span<double> grad_w) {
  const auto r = kernels::omp::logistic_loss_grad(z, cols, y, w, b, grad_w);
  if (penalty == Penalty::L2) {
    for (std::size_t j = 0; j < cols; ++j) grad_w[j] += w[j] / C;
  }
  return r.grad_intercept;
}

FittedModel fit_logreg(const FeatureMatrix& x, Penalty penalty, const LogRegParams& params,
                       std::uint64_t seed) {
  params.validate();
  check_training_data(x, "logistic regression");
  if (x.has_raw_categoricals()) {
    throw PreconditionError("logistic regression needs the one-hot pathway (raw categorical columns present)");
  }
  const std::size_t n = x.rows(), p = x.cols();
  const Standardizer stdz = Standardizer::fit(x);
  const std::vector<double> z = stdz.apply(x);
  const std::span<const std::uint8_t> y(x.labels);
  const double C = params.C;

  std::vector<double> w(p, 0.0), w_next(p), g(p), scratch(p);
  const double rate = static_cast<double>(x.positives()) / static_cast<double>(n);
  double b = std::log(rate / (1.0 - rate));

  // Smooth part only (loss + L2 penalty); L1 is handled by the prox step.
  const auto smooth = [&](std::span<const double> wv, double bv) {
    const auto r = kernels::omp::logistic_loss_grad(z, p, y, wv, bv, scratch);
    return r.loss + (penalty == Penalty::L2 ? penalty_value(wv, penalty, C) : 0.0);
  };
  const auto full = [&](std::span<const double> wv, double bv) {
    return smooth(wv, bv) + (penalty == Penalty::L1 ? penalty_value(wv, penalty, C) : 0.0);
  };

  // Lipschitz bound of the summed loss gradient: ||[Z 1]||_F^2 / 4.
  double frob = static_cast<double>(n);
  for (const double v : z) frob += v * v;
  const double t_max = 1e6 * 4.0 / frob;
  double t = 4.0 / frob;

  TrainingMetadata meta;
  double f = full(w, b);
  meta.objective_trace.push_back(f);
  int epoch = 0;
  for (; epoch < params.max_epochs; ++epoch) {
    const double f_smooth = smooth(w, b);
    const double gb = logreg_smooth_gradient(z, p, y, w, b, penalty, C, g);
    t = std::min(2.0 * t, t_max);
    double b_next = b;
    double f_next = f;
    bool accepted = false;
    for (int tries = 0; tries < 60; ++tries, t *= 0.5) {
      b_next = b - t * gb;
      if (penalty == Penalty::L2) {
        double gnorm2 = gb * gb;
        for (std::size_t j = 0; j < p; ++j) {
          w_next[j] = w[j] - t * g[j];
          gnorm2 += g[j] * g[j];
        }
        f_next = full(w_next, b_next);
        if (f_next <= f - 0.5 * t * gnorm2) {
          accepted = true;
          break;
        }
      } else {
        for (std::size_t j = 0; j < p; ++j) w_next[j] = soft_threshold(w[j] - t * g[j], t / C);
        // Sufficient decrease of the smooth part against its quadratic model.
        double lin = gb * (b_next - b), quad = (b_next - b) * (b_next - b);
        for (std::size_t j = 0; j < p; ++j) {
          const double d = w_next[j] - w[j];
          lin += g[j] * d;
          quad += d * d;
        }
        const double s_next = smooth(w_next, b_next);
        if (s_next <= f_smooth + lin + quad / (2.0 * t) + 1e-12 * std::abs(f_smooth)) {
          f_next = s_next + penalty_value(w_next, penalty, C);
          accepted = true;
          break;
        }
      }
    }
    if (!accepted || f_next > f) {
      meta.converged = true;
      break;
    }
    const double decrease = (f - f_next) / std::max(std::abs(f), 1e-300);
    w.swap(w_next);
    b = b_next;
    f = f_next;
    meta.objective_trace.push_back(f);
    if (decrease < params.tolerance) {
      meta.converged = true;
      ++epoch;
      break;
    }
  }
  meta.iterations = static_cast<std::size_t>(epoch);

  Hyperparams hp{{"C", C},
                 {"max_epochs", static_cast<double>(params.max_epochs)},
                 {"tolerance", params.tolerance}};
  LinearState state{stdz.center, stdz.scale, std::move(w), b};
  return FittedModel(penalty == Penalty::L1 ? LearnerKind::LogRegL1 : LearnerKind::LogRegL2,
                     std::move(hp), seed, x.column_names(), std::move(state), std::move(meta));
}

}  // namespace mdb
