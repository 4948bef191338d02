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

// Reset-after GRU with gate blocks ordered z | r | h in every 3*units axis:
//   z  = sigmoid(x Wz + bz_in + h Uz + bz_rec)
//   r  = sigmoid(x Wr + br_in + h Ur + br_rec)
//   hc = tanh(x Wh + bh_in + r * (h Uh + bh_rec))
//   h' = z * h + (1 - z) * hc

#include <cmath>
#include <span>
#include <vector>

#include "gruscreen/error.hpp"
#include "gruscreen/nn/matrix.hpp"

namespace gruscreen::nn {

template <typename T>
struct GruLayer {
  Matrix<T> w_in;   // [input_dim x 3*units]
  Matrix<T> w_rec;  // [units x 3*units]
  std::vector<T> b_in;
  std::vector<T> b_rec;

  static GruLayer zeros(std::size_t input_dim, std::size_t units) {
    return {Matrix<T>(input_dim, 3 * units), Matrix<T>(units, 3 * units),
            std::vector<T>(3 * units, T(0)), std::vector<T>(3 * units, T(0))};
  }

  std::size_t input_dim() const { return w_in.rows(); }
  std::size_t units() const { return w_rec.rows(); }
  std::size_t param_count() const { return w_in.size() + w_rec.size() + b_in.size() + b_rec.size(); }

  void check_shapes() const {
    const std::size_t g = 3 * units();
    if (w_in.cols() != g || w_rec.cols() != g || b_in.size() != g || b_rec.size() != g) {
      throw Error(ErrorCode::kShapeMismatch, "inconsistent GRU parameter shapes");
    }
  }

  template <typename U>
  GruLayer<U> cast() const {
    return {w_in.template cast<U>(), w_rec.template cast<U>(),
            std::vector<U>(b_in.begin(), b_in.end()), std::vector<U>(b_rec.begin(), b_rec.end())};
  }

  friend bool operator==(const GruLayer&, const GruLayer&) = default;
};

template <typename T>
inline T sigmoid(T x) {
  return T(1) / (T(1) + std::exp(-x));
}

namespace detail {

// One time step. gx/gh are 3*units scratch buffers. Gate outputs are stored
// when the pointers are non-null.
template <typename T>
void gru_step(const GruLayer<T>& p, std::span<const T> x, std::span<const T> h_prev,
              std::span<T> h_out, std::span<T> gx, std::span<T> gh, T* z_out, T* r_out,
              T* rec_out, T* cand_out) {
  const std::size_t u = p.units();
  std::copy(p.b_in.begin(), p.b_in.end(), gx.begin());
  std::copy(p.b_rec.begin(), p.b_rec.end(), gh.begin());
  gemv_acc<T>(x, p.w_in, gx);
  gemv_acc<T>(h_prev, p.w_rec, gh);
  for (std::size_t k = 0; k < u; ++k) {
    const T z = sigmoid(gx[k] + gh[k]);
    const T r = sigmoid(gx[u + k] + gh[u + k]);
    const T rec = gh[2 * u + k];
    const T cand = std::tanh(gx[2 * u + k] + r * rec);
    h_out[k] = z * h_prev[k] + (T(1) - z) * cand;
    if (z_out) {
      z_out[k] = z;
      r_out[k] = r;
      rec_out[k] = rec;
      cand_out[k] = cand;
    }
  }
}

}  // namespace detail

/// Single GRU step on one input vector.
template <typename T>
std::vector<T> gru_cell_forward(std::span<const T> x, std::span<const T> h_prev, const GruLayer<T>& p) {
  p.check_shapes();
  if (x.size() != p.input_dim() || h_prev.size() != p.units()) {
    throw Error(ErrorCode::kShapeMismatch, "GRU cell input has the wrong size");
  }
  std::vector<T> h(p.units()), gx(3 * p.units()), gh(3 * p.units());
  detail::gru_step<T>(p, x, h_prev, h, gx, gh, nullptr, nullptr, nullptr, nullptr);
  return h;
}

/// Activations of one layer over one sequence. Gate matrices are only filled
/// when recorded for backpropagation.
template <typename T>
struct GruSequenceCache {
  Matrix<T> input;   // [seq x input_dim]
  Matrix<T> output;  // [seq x units]
  Matrix<T> z, r, rec, cand;
};

/// Runs the layer from a zero initial state over every row of `input`.
template <typename T>
GruSequenceCache<T> gru_forward_sequence(const GruLayer<T>& p, Matrix<T> input, bool record) {
  if (input.cols() != p.input_dim()) throw Error(ErrorCode::kShapeMismatch, "GRU input width");
  const std::size_t seq = input.rows();
  const std::size_t u = p.units();
  GruSequenceCache<T> c;
  c.output = Matrix<T>(seq, u);
  if (record) {
    c.z = Matrix<T>(seq, u);
    c.r = Matrix<T>(seq, u);
    c.rec = Matrix<T>(seq, u);
    c.cand = Matrix<T>(seq, u);
  }
  std::vector<T> zero(u, T(0)), gx(3 * u), gh(3 * u);
  for (std::size_t t = 0; t < seq; ++t) {
    std::span<const T> h_prev = t == 0 ? std::span<const T>(zero) : c.output.row(t - 1);
    detail::gru_step<T>(p, input.row(t), h_prev, c.output.row(t), gx, gh,
                        record ? c.z.row(t).data() : nullptr, record ? c.r.row(t).data() : nullptr,
                        record ? c.rec.row(t).data() : nullptr, record ? c.cand.row(t).data() : nullptr);
  }
  c.input = std::move(input);
  return c;
}

/// Backpropagation through time. `d_output` is the loss gradient w.r.t.
/// every output row; parameter gradients are accumulated into `grads`.
/// `d_input`, when given, receives the gradient w.r.t. the layer input.
template <typename T>
void gru_backward_sequence(const GruLayer<T>& p, const GruSequenceCache<T>& c,
                           const Matrix<T>& d_output, GruLayer<T>& grads, Matrix<T>* d_input) {
  const std::size_t seq = c.output.rows();
  const std::size_t u = p.units();
  if (c.z.rows() != seq) throw Error(ErrorCode::kStaleCache, "GRU cache has no recorded gates");
  if (d_input) *d_input = Matrix<T>(seq, p.input_dim());
  std::vector<T> dh(u), dh_next(u, T(0)), g_in(3 * u), g_rec(3 * u), zero(u, T(0));
  for (std::size_t t = seq; t-- > 0;) {
    std::span<const T> h_prev = t == 0 ? std::span<const T>(zero) : c.output.row(t - 1);
    auto d_out = d_output.row(t);
    for (std::size_t k = 0; k < u; ++k) {
      const T dht = d_out[k] + dh_next[k];
      const T z = c.z(t, k);
      const T r = c.r(t, k);
      const T cand = c.cand(t, k);
      const T d_z = dht * (h_prev[k] - cand);
      const T d_cand = dht * (T(1) - z);
      const T d_a_h = d_cand * (T(1) - cand * cand);
      const T d_r = d_a_h * c.rec(t, k);
      const T d_a_z = d_z * z * (T(1) - z);
      const T d_a_r = d_r * r * (T(1) - r);
      g_in[k] = d_a_z;
      g_in[u + k] = d_a_r;
      g_in[2 * u + k] = d_a_h;
      g_rec[k] = d_a_z;
      g_rec[u + k] = d_a_r;
      g_rec[2 * u + k] = d_a_h * r;
      dh[k] = dht * z;
    }
    outer_acc<T>(c.input.row(t), g_in, grads.w_in);
    outer_acc<T>(h_prev, g_rec, grads.w_rec);
    for (std::size_t j = 0; j < 3 * u; ++j) {
      grads.b_in[j] += g_in[j];
      grads.b_rec[j] += g_rec[j];
    }
    if (d_input) gemv_t_acc<T>(p.w_in, g_in, d_input->row(t));
    gemv_t_acc<T>(p.w_rec, g_rec, std::span<T>(dh));
    dh_next.swap(dh);
  }
}

}  // namespace gruscreen::nn
