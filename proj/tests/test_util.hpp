// Copyright 2026 The rnnlab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Test-only helpers: random instances and a central finite-difference
// oracle that only ever runs forward passes.

#ifndef RNNLAB_TESTS_TEST_UTIL_HPP_
#define RNNLAB_TESTS_TEST_UTIL_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "rnnlab/rnnlab.hpp"

namespace rnnlab::testing {

inline constexpr double kFdStep = 1e-5;

inline Matrix random_matrix(std::size_t r, std::size_t c, std::mt19937_64& rng, double lo = -2.0,
                            double hi = 2.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(r, c);
  for (double& v : m.values()) v = u(rng);
  return m;
}

inline Vector random_vector(std::size_t n, std::mt19937_64& rng, double lo = -2.0,
                            double hi = 2.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vector v(n);
  for (double& x : v.values()) x = u(rng);
  return v;
}

inline ModelParams random_model(const ModelSpec& spec, std::mt19937_64& rng, double scale = 1.0) {
  ModelParams m = zero_params(spec);
  for (Matrix* w : m.tensors())
    for (double& v : w->values()) v = std::uniform_real_distribution<double>(-scale, scale)(rng);
  return m;
}

inline LabeledSequence random_utterance(std::size_t len, std::size_t dim, std::size_t classes,
                                        std::mt19937_64& rng) {
  LabeledSequence s;
  s.frames = random_matrix(len, dim, rng, -1.0, 1.0);
  s.labels.resize(len);
  for (auto& y : s.labels) y = std::uniform_int_distribution<std::size_t>(0, classes - 1)(rng);
  return s;
}

// Central difference of f around every entry of `x`.
inline std::vector<double> numeric_gradient(std::span<double> x, const std::function<double()>& f,
                                            double h = kFdStep) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + h;
    const double up = f();
    x[i] = keep - h;
    const double down = f();
    x[i] = keep;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

// ||a - n|| / max(||a||, ||n||), or the absolute difference when both are
// below `floor`.
inline double relative_error(std::span<const double> a, std::span<const double> n,
                             double floor = 1e-9) {
  double diff = 0.0, na = 0.0, nn = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - n[i]) * (a[i] - n[i]);
    na += a[i] * a[i];
    nn += n[i] * n[i];
  }
  const double scale = std::max(std::sqrt(na), std::sqrt(nn));
  return scale < floor ? std::sqrt(diff) : std::sqrt(diff) / scale;
}

// Worst per-matrix relative error between analytic grads and finite
// differences of `loss` over every parameter of `model`.
inline double max_param_gradient_error(ModelParams& model, const ModelParams& grads,
                                       const std::function<double()>& loss) {
  double worst = 0.0;
  auto ps = model.tensors();
  auto gs = grads.tensors();
  for (std::size_t k = 0; k < ps.size(); ++k) {
    const auto num = numeric_gradient(ps[k]->values(), loss);
    worst = std::max(worst, relative_error(gs[k]->values(), num));
  }
  return worst;
}

}  // namespace rnnlab::testing

#endif  // RNNLAB_TESTS_TEST_UTIL_HPP_
