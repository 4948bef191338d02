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

// Embedding (frozen) -> Dropout -> GRU (sequences) -> Dropout -> GRU
// (sequences) -> Dropout -> GRU (last state) -> Dense softmax.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gruscreen/error.hpp"
#include "gruscreen/nn/config.hpp"
#include "gruscreen/nn/gru.hpp"
#include "gruscreen/nn/init.hpp"
#include "gruscreen/nn/loss.hpp"
#include "gruscreen/nn/matrix.hpp"
#include "gruscreen/nn/random.hpp"
#include "gruscreen/text/encode.hpp"

namespace gruscreen::nn {

using text::EncodedSequence;

/// Range of the seeded uniform embedding initialization.
inline constexpr double kEmbeddingInitLimit = 0.05;

/// Every trainable tensor. Also used for gradients and optimizer moments.
template <typename T>
struct Params {
  std::array<GruLayer<T>, 3> gru;
  Matrix<T> dense_w;  // [units x num_classes]
  std::vector<T> dense_b;

  static Params zeros_like(const ModelConfig& c) {
    return {{GruLayer<T>::zeros(c.embed_dim, c.gru_units), GruLayer<T>::zeros(c.gru_units, c.gru_units),
             GruLayer<T>::zeros(c.gru_units, c.gru_units)},
            Matrix<T>(c.gru_units, c.num_classes),
            std::vector<T>(c.num_classes, T(0))};
  }

  /// Visits tensors in archive order with (name, flat data, shape).
  template <typename F>
  void visit(F&& f) {
    static constexpr std::array<std::string_view, 3> kLayer{"gru1", "gru2", "gru3"};
    for (std::size_t l = 0; l < 3; ++l) {
      auto& g = gru[l];
      f(std::string(kLayer[l]) + ".W_in", g.w_in.flat(), std::vector<std::size_t>{g.w_in.rows(), g.w_in.cols()});
      f(std::string(kLayer[l]) + ".W_rec", g.w_rec.flat(),
        std::vector<std::size_t>{g.w_rec.rows(), g.w_rec.cols()});
      f(std::string(kLayer[l]) + ".b_in", std::span<T>(g.b_in), std::vector<std::size_t>{g.b_in.size()});
      f(std::string(kLayer[l]) + ".b_rec", std::span<T>(g.b_rec), std::vector<std::size_t>{g.b_rec.size()});
    }
    f(std::string("dense_W"), dense_w.flat(), std::vector<std::size_t>{dense_w.rows(), dense_w.cols()});
    f(std::string("dense_b"), std::span<T>(dense_b), std::vector<std::size_t>{dense_b.size()});
  }

  template <typename F>
  void visit(F&& f) const {
    const_cast<Params*>(this)->visit([&](const std::string& name, std::span<T> data,
                                         const std::vector<std::size_t>& shape) {
      f(name, std::span<const T>(data), shape);
    });
  }

  std::size_t count() const {
    std::size_t n = 0;
    visit([&](const std::string&, std::span<const T> d, const auto&) { n += d.size(); });
    return n;
  }

  void fill(T value) {
    visit([&](const std::string&, std::span<T> d, const auto&) { std::fill(d.begin(), d.end(), value); });
  }

  /// this += other, tensor by tensor.
  void add(const Params& other) {
    std::vector<std::span<const T>> src;
    other.visit([&](const std::string&, std::span<const T> d, const auto&) { src.push_back(d); });
    std::size_t i = 0;
    visit([&](const std::string&, std::span<T> d, const auto&) {
      const auto& s = src[i++];
      for (std::size_t k = 0; k < d.size(); ++k) d[k] += s[k];
    });
  }

  template <typename U>
  Params<U> cast() const {
    return {{gru[0].template cast<U>(), gru[1].template cast<U>(), gru[2].template cast<U>()},
            dense_w.template cast<U>(),
            std::vector<U>(dense_b.begin(), dense_b.end())};
  }

  friend bool operator==(const Params&, const Params&) = default;
};

template <typename T>
struct GruStackModel {
  ModelConfig config;
  Matrix<T> embedding;  // [vocab_size x embed_dim], never updated
  Params<T> params;
  // Bumped on every optimizer step; ties forward caches to a parameter state.
  std::uint64_t version = 0;

  void check_shapes() const {
    const auto& c = config;
    if (embedding.rows() != c.vocab_size || embedding.cols() != c.embed_dim) {
      throw Error(ErrorCode::kShapeMismatch, "embedding shape");
    }
    const std::array<std::size_t, 3> inputs{c.embed_dim, c.gru_units, c.gru_units};
    for (std::size_t l = 0; l < 3; ++l) {
      params.gru[l].check_shapes();
      if (params.gru[l].input_dim() != inputs[l] || params.gru[l].units() != c.gru_units) {
        throw Error(ErrorCode::kShapeMismatch, "GRU layer shape");
      }
    }
    if (params.dense_w.rows() != c.gru_units || params.dense_w.cols() != c.num_classes ||
        params.dense_b.size() != c.num_classes) {
      throw Error(ErrorCode::kShapeMismatch, "dense layer shape");
    }
  }

  template <typename U>
  GruStackModel<U> cast() const {
    return {config, embedding.template cast<U>(), params.template cast<U>(), version};
  }

  bool same_weights(const GruStackModel& o) const {
    return config == o.config && embedding == o.embedding && params == o.params;
  }
};

/// Embedding uniform on [-0.05, 0.05]; input kernels glorot-uniform;
/// recurrent kernels orthogonal; biases zero; dense kernel glorot-uniform.
template <typename T>
GruStackModel<T> make_model(const ModelConfig& config, std::uint64_t seed) {
  config.validate();
  GruStackModel<T> m;
  m.config = config;
  m.embedding = uniform_init<T>(config.vocab_size, config.embed_dim, kEmbeddingInitLimit, derive_seed(seed, {0}));
  m.params = Params<T>::zeros_like(config);
  for (std::size_t l = 0; l < 3; ++l) {
    auto& g = m.params.gru[l];
    g.w_in = glorot_uniform_init<T>(g.w_in.rows(), g.w_in.cols(), derive_seed(seed, {1, l}));
    g.w_rec = orthogonal_init<T>(g.w_rec.rows(), g.w_rec.cols(), derive_seed(seed, {2, l}));
  }
  m.params.dense_w = glorot_uniform_init<T>(config.gru_units, config.num_classes, derive_seed(seed, {3}));
  return m;
}

enum class Mode { kTrain, kInfer };

/// Activations of one sample, kept for backpropagation.
template <typename T>
struct SampleTrace {
  std::array<Matrix<T>, 3> masks;  // inverted-dropout multipliers; empty when rate is 0
  std::array<GruSequenceCache<T>, 3> layers;
  std::vector<T> probs;
};

template <typename T>
struct ForwardCache {
  std::vector<SampleTrace<T>> samples;
  std::uint64_t model_version = 0;
  bool valid = false;
};

template <typename T>
struct ForwardPass {
  Matrix<T> probs;  // [batch x num_classes]
  ForwardCache<T> cache;
};

namespace detail {

template <typename T>
void check_sequence(const ModelConfig& c, const EncodedSequence& seq) {
  if (seq.size() != c.seq_len) throw Error(ErrorCode::kShapeMismatch, "sequence length differs from seq_len");
  for (auto idx : seq) {
    if (idx >= c.vocab_size) throw Error(ErrorCode::kIndexOutOfVocab, "index " + std::to_string(idx));
  }
}

template <typename T>
Matrix<T> dropout_mask(std::size_t rows, std::size_t cols, double rate, Rng& rng) {
  Matrix<T> mask(rows, cols);
  const T keep_scale = static_cast<T>(1.0 / (1.0 - rate));
  for (auto& v : mask.flat()) v = rng.uniform01() >= rate ? keep_scale : T(0);
  return mask;
}

template <typename T>
void apply_mask(Matrix<T>& x, const Matrix<T>& mask) {
  auto xs = x.flat();
  auto ms = mask.flat();
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] *= ms[i];
}

}  // namespace detail

/// Forward pass of one sample. With a dropout stream every dropout layer
/// draws a fresh mask; without one dropout is the identity.
template <typename T>
SampleTrace<T> forward_sample(const GruStackModel<T>& model, const EncodedSequence& seq, Rng* dropout_rng,
                              bool record) {
  const auto& c = model.config;
  detail::check_sequence<T>(c, seq);
  const bool dropout = dropout_rng != nullptr && c.dropout_rate > 0.0;
  SampleTrace<T> trace;
  Matrix<T> x(c.seq_len, c.embed_dim);
  for (std::size_t t = 0; t < c.seq_len; ++t) {
    auto src = model.embedding.row(seq[t]);
    std::copy(src.begin(), src.end(), x.row(t).begin());
  }
  for (std::size_t l = 0; l < 3; ++l) {
    if (dropout) {
      trace.masks[l] = detail::dropout_mask<T>(x.rows(), x.cols(), c.dropout_rate, *dropout_rng);
      detail::apply_mask(x, trace.masks[l]);
    }
    trace.layers[l] = gru_forward_sequence(model.params.gru[l], std::move(x), record);
    if (l < 2) x = trace.layers[l].output;
  }
  const auto last = trace.layers[2].output.row(c.seq_len - 1);
  trace.probs.assign(model.params.dense_b.begin(), model.params.dense_b.end());
  gemv_acc<T>(last, model.params.dense_w, trace.probs);
  softmax_inplace<T>(trace.probs);
  if (!record) {
    for (auto& layer : trace.layers) layer = {};
    for (auto& mask : trace.masks) mask = {};
  }
  return trace;
}

/// Per-sample dropout stream used by `forward` in train mode.
inline std::uint64_t sample_dropout_seed(std::uint64_t batch_seed, std::size_t sample) {
  return derive_seed(batch_seed, {sample});
}

/// Batch forward pass. Train mode applies inverted dropout and records a
/// cache for `backward`.
template <typename T>
ForwardPass<T> forward(const GruStackModel<T>& model, std::span<const EncodedSequence> batch, Mode mode,
                       std::uint64_t dropout_seed = 0) {
  model.check_shapes();
  ForwardPass<T> out;
  out.probs = Matrix<T>(batch.size(), model.config.num_classes);
  const bool train = mode == Mode::kTrain;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    Rng rng(sample_dropout_seed(dropout_seed, i));
    auto trace = forward_sample(model, batch[i], train ? &rng : nullptr, train);
    std::copy(trace.probs.begin(), trace.probs.end(), out.probs.row(i).begin());
    if (train) out.cache.samples.push_back(std::move(trace));
  }
  out.cache.valid = train;
  out.cache.model_version = model.version;
  return out;
}

template <typename T>
Matrix<T> predict(const GruStackModel<T>& model, std::span<const EncodedSequence> batch) {
  return forward(model, batch, Mode::kInfer).probs;
}

/// Accumulates `scale` times the gradient of -ln p(label) into `grads`.
template <typename T>
void backward_sample(const GruStackModel<T>& model, const SampleTrace<T>& trace, int label, T scale,
                     Params<T>& grads) {
  const auto& c = model.config;
  if (trace.layers[2].z.rows() != c.seq_len) throw Error(ErrorCode::kStaleCache, "sample was not recorded");
  if (label < 0 || static_cast<std::size_t>(label) >= c.num_classes) {
    throw Error(ErrorCode::kBadLabel, "label outside [0, num_classes)");
  }
  std::vector<T> d_logits(c.num_classes);
  const T p_true = trace.probs[static_cast<std::size_t>(label)];
  // the clipped loss is flat outside the clip range
  if (p_true == clip_probability(p_true)) {
    for (std::size_t k = 0; k < c.num_classes; ++k) {
      const T y = static_cast<std::size_t>(label) == k ? T(1) : T(0);
      d_logits[k] = (trace.probs[k] - y) * scale;
    }
  }
  const auto last = trace.layers[2].output.row(c.seq_len - 1);
  outer_acc<T>(last, d_logits, grads.dense_w);
  for (std::size_t k = 0; k < c.num_classes; ++k) grads.dense_b[k] += d_logits[k];

  Matrix<T> d_out(c.seq_len, c.gru_units);
  gemv_t_acc<T>(model.params.dense_w, d_logits, d_out.row(c.seq_len - 1));
  for (std::size_t l = 3; l-- > 0;) {
    Matrix<T> d_in;
    gru_backward_sequence(model.params.gru[l], trace.layers[l], d_out, grads.gru[l], l > 0 ? &d_in : nullptr);
    if (l == 0) break;
    if (trace.masks[l].size() != 0) detail::apply_mask(d_in, trace.masks[l]);
    d_out = std::move(d_in);
  }
}

/// Gradients of the mean cross-entropy over the cached batch. The embedding
/// is frozen and receives none.
template <typename T>
Params<T> backward(const GruStackModel<T>& model, const ForwardCache<T>& cache, std::span<const int> labels) {
  if (!cache.valid || cache.model_version != model.version) {
    throw Error(ErrorCode::kStaleCache, "forward cache does not belong to the current parameters");
  }
  if (labels.size() != cache.samples.size() || labels.empty()) {
    throw Error(ErrorCode::kShapeMismatch, "label count differs from cached batch");
  }
  auto grads = Params<T>::zeros_like(model.config);
  const T scale = T(1) / static_cast<T>(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) backward_sample(model, cache.samples[i], labels[i], scale, grads);
  return grads;
}

/// Index of the larger probability; ties go to the lower class.
template <typename T>
int argmax(std::span<const T> probs) {
  return static_cast<int>(std::max_element(probs.begin(), probs.end()) - probs.begin());
}

}  // namespace gruscreen::nn
