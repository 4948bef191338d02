// Copyright 2026 The gruscreen Authors. All Rights Reserved.
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

#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gruscreen/error.hpp"
#include "gruscreen/nn/model.hpp"

namespace gruscreen::nn {

struct AdamHyper {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-7;
};

template <typename T>
struct AdamState {
  AdamHyper hyper;
  std::uint64_t step = 0;
  Params<T> m;
  Params<T> v;

  static AdamState fresh(const ModelConfig& config, AdamHyper hyper = {}) {
    return {hyper, 0, Params<T>::zeros_like(config), Params<T>::zeros_like(config)};
  }
};

/// Elementwise Adam update on flat tensors with the bias-corrected moments:
///   m <- b1 m + (1 - b1) g ;  v <- b2 v + (1 - b2) g^2
///   theta <- theta - lr * m_hat / (sqrt(v_hat) + eps)
/// `step` is the already-incremented step count (>= 1).
template <typename T>
void adam_update(std::span<T> theta, std::span<const T> grad, std::span<T> m, std::span<T> v,
                 std::uint64_t step, const AdamHyper& h) {
  if (grad.size() != theta.size() || m.size() != theta.size() || v.size() != theta.size()) {
    throw Error(ErrorCode::kShapeMismatch, "Adam tensors differ in size");
  }
  const double c1 = 1.0 - std::pow(h.beta1, static_cast<double>(step));
  const double c2 = 1.0 - std::pow(h.beta2, static_cast<double>(step));
  const T b1 = static_cast<T>(h.beta1);
  const T b2 = static_cast<T>(h.beta2);
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const T g = grad[i];
    m[i] = b1 * m[i] + (T(1) - b1) * g;
    v[i] = b2 * v[i] + (T(1) - b2) * g * g;
    const double m_hat = static_cast<double>(m[i]) / c1;
    const double v_hat = static_cast<double>(v[i]) / c2;
    theta[i] -= static_cast<T>(h.lr * m_hat / (std::sqrt(v_hat) + h.epsilon));
  }
}

/// One optimizer step over every trainable tensor. The embedding is left
/// untouched.
template <typename T>
void adam_step(GruStackModel<T>& model, const Params<T>& grads, AdamState<T>& state) {
  std::vector<std::span<const T>> g;
  std::vector<std::span<T>> m;
  std::vector<std::span<T>> v;
  grads.visit([&](const std::string&, std::span<const T> d, const auto&) { g.push_back(d); });
  state.m.visit([&](const std::string&, std::span<T> d, const auto&) { m.push_back(d); });
  state.v.visit([&](const std::string&, std::span<T> d, const auto&) { v.push_back(d); });
  std::size_t tensors = 0;
  model.params.visit([&](const std::string&, std::span<T> d, const auto&) { ++tensors; (void)d; });
  if (g.size() != tensors || m.size() != tensors || v.size() != tensors) {
    throw Error(ErrorCode::kShapeMismatch, "Adam state does not match the model");
  }
  ++state.step;
  std::size_t i = 0;
  model.params.visit([&](const std::string&, std::span<T> theta, const auto&) {
    adam_update<T>(theta, g[i], m[i], v[i], state.step, state.hyper);
    ++i;
  });
  ++model.version;
}

}  // namespace gruscreen::nn
