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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <thread>
#include <vector>

#include "gruscreen/error.hpp"
#include "gruscreen/nn/adam.hpp"
#include "gruscreen/nn/model.hpp"
#include "gruscreen/train/early_stopping.hpp"
#include "gruscreen/train/history.hpp"
#include "gruscreen/train/split.hpp"
#include "json.hpp"

namespace gruscreen::train {

using text::EncodedSequence;

struct TrainConfig {
  std::size_t epochs = 25;
  std::size_t batch_size = 128;
  std::size_t early_stop_patience = 3;
  double early_stop_min_delta = 1e-4;
  bool restore_best_weights = true;
  std::uint64_t seed = 1;
  // Worker threads for per-batch gradient work; 0 picks the hardware count.
  // Results do not depend on this value.
  std::size_t threads = 0;
  nn::AdamHyper adam;

  void validate() const {
    if (epochs < 1 || batch_size < 1 || early_stop_patience < 1) {
      throw Error(ErrorCode::kInvalidArgument, "epochs, batch_size and patience must be >= 1");
    }
  }
};

inline void to_json(nlohmann::json& j, const TrainConfig& c) {
  j = {{"epochs", c.epochs},
       {"batch_size", c.batch_size},
       {"early_stop_metric", "val_loss"},
       {"early_stop_patience", c.early_stop_patience},
       {"early_stop_min_delta", c.early_stop_min_delta},
       {"restore_best_weights", c.restore_best_weights},
       {"seed", c.seed},
       {"threads", c.threads},
       {"learning_rate", c.adam.lr},
       {"beta1", c.adam.beta1},
       {"beta2", c.adam.beta2},
       {"epsilon", c.adam.epsilon}};
}

inline void from_json(const nlohmann::json& j, TrainConfig& c) {
  if (j.contains("early_stop_metric") && j.at("early_stop_metric") != "val_loss") {
    throw Error(ErrorCode::kInvalidArgument, "only val_loss is supported as early_stop_metric");
  }
  c.epochs = j.value("epochs", c.epochs);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.early_stop_patience = j.value("early_stop_patience", c.early_stop_patience);
  c.early_stop_min_delta = j.value("early_stop_min_delta", c.early_stop_min_delta);
  c.restore_best_weights = j.value("restore_best_weights", c.restore_best_weights);
  c.seed = j.value("seed", c.seed);
  c.threads = j.value("threads", c.threads);
  c.adam.lr = j.value("learning_rate", c.adam.lr);
  c.adam.beta1 = j.value("beta1", c.adam.beta1);
  c.adam.beta2 = j.value("beta2", c.adam.beta2);
  c.adam.epsilon = j.value("epsilon", c.adam.epsilon);
}

/// Encoded sequences with their class labels.
struct Dataset {
  std::vector<EncodedSequence> x;
  std::vector<int> y;

  std::size_t size() const { return x.size(); }
  bool empty() const { return x.empty(); }
};

struct EvalResult {
  double loss = 0.0;
  double accuracy = 0.0;
};

namespace detail {

// Samples per gradient chunk. Chunks are reduced in index order, so the
// summation order is fixed no matter how many threads run.
inline constexpr std::size_t kChunk = 16;

inline std::size_t resolve_threads(std::size_t requested) {
  if (requested != 0) return requested;
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

// Runs fn(i) for i in [0, n) across `threads` workers with a static
// interleaved assignment.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> workers;
  workers.reserve(threads);
  for (std::size_t w = 0; w < threads; ++w) {
    workers.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += threads) fn(i);
    });
  }
}

template <typename T>
double sample_loss(const std::vector<T>& probs, int label) {
  return -std::log(static_cast<double>(nn::clip_probability(probs[static_cast<std::size_t>(label)])));
}

}  // namespace detail

/// Mean cross-entropy and accuracy in inference mode.
template <typename T>
EvalResult evaluate(const nn::GruStackModel<T>& model, const Dataset& data, std::size_t threads = 0) {
  if (data.empty()) throw Error(ErrorCode::kEmptyDataset, "evaluation set is empty");
  if (data.x.size() != data.y.size()) throw Error(ErrorCode::kLengthMismatch, "x vs y");
  model.check_shapes();
  std::vector<double> losses(data.size());
  std::vector<int> hits(data.size());
  detail::parallel_for(data.size(), detail::resolve_threads(threads), [&](std::size_t i) {
    auto trace = nn::forward_sample(model, data.x[i], nullptr, false);
    losses[i] = detail::sample_loss(trace.probs, data.y[i]);
    hits[i] = nn::argmax<T>(trace.probs) == data.y[i] ? 1 : 0;
  });
  EvalResult r;
  for (std::size_t i = 0; i < data.size(); ++i) {
    r.loss += losses[i];
    r.accuracy += hits[i];
  }
  r.loss /= static_cast<double>(data.size());
  r.accuracy /= static_cast<double>(data.size());
  return r;
}

/// Class-0 probabilities and argmax predictions for every sample.
template <typename T>
std::vector<std::vector<T>> predict_all(const nn::GruStackModel<T>& model, const std::vector<EncodedSequence>& xs,
                                        std::size_t threads = 0) {
  std::vector<std::vector<T>> out(xs.size());
  detail::parallel_for(xs.size(), detail::resolve_threads(threads), [&](std::size_t i) {
    out[i] = nn::forward_sample(model, xs[i], nullptr, false).probs;
  });
  return out;
}

template <typename T>
struct TrainHooks {
  // Replaces the validation pass when set (used to drive early stopping
  // from a scripted loss sequence).
  std::function<EvalResult(const nn::GruStackModel<T>&, std::size_t epoch)> validate;
  std::function<void(const EpochRecord&, const nn::GruStackModel<T>&)> on_epoch_end;
};

inline std::uint64_t batch_dropout_seed(std::uint64_t seed, std::size_t epoch, std::size_t batch) {
  return nn::derive_seed(seed, {0xD50, epoch, batch});
}

/// Mini-batch Adam training with early stopping on validation loss. Each
/// epoch visits every training sample once in a seeded order; the last
/// partial batch is kept. The model ends with the best-validation weights
/// when restore_best_weights is set.
template <typename T>
TrainingHistory train(nn::GruStackModel<T>& model, const Dataset& train_set, const Dataset& val_set,
                      const TrainConfig& cfg, const TrainHooks<T>& hooks = {}) {
  cfg.validate();
  model.check_shapes();
  if (train_set.empty()) throw Error(ErrorCode::kEmptyDataset, "training set is empty");
  if (train_set.x.size() != train_set.y.size()) throw Error(ErrorCode::kLengthMismatch, "train x vs y");
  if (!hooks.validate && val_set.empty()) throw Error(ErrorCode::kEmptyDataset, "validation set is empty");

  const std::size_t threads = detail::resolve_threads(cfg.threads);
  auto adam = nn::AdamState<T>::fresh(model.config, cfg.adam);
  EarlyStopping stopper(cfg.early_stop_patience, cfg.early_stop_min_delta);
  std::optional<nn::Params<T>> best_params;
  TrainingHistory history;

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    auto order = shuffled_indices(train_set.size(), nn::derive_seed(cfg.seed, {0xE90, epoch}));
    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t start = 0, batch = 0; start < order.size(); start += cfg.batch_size, ++batch) {
      const std::size_t len = std::min(cfg.batch_size, order.size() - start);
      const std::uint64_t batch_seed = batch_dropout_seed(cfg.seed, epoch, batch);
      const T scale = T(1) / static_cast<T>(len);
      const std::size_t chunks = (len + detail::kChunk - 1) / detail::kChunk;
      std::vector<nn::Params<T>> chunk_grads(chunks, nn::Params<T>::zeros_like(model.config));
      std::vector<double> chunk_loss(chunks, 0.0);
      std::vector<std::size_t> chunk_hits(chunks, 0);
      detail::parallel_for(chunks, threads, [&](std::size_t c) {
        const std::size_t end = std::min(len, (c + 1) * detail::kChunk);
        for (std::size_t k = c * detail::kChunk; k < end; ++k) {
          const std::size_t idx = order[start + k];
          nn::Rng rng(nn::sample_dropout_seed(batch_seed, k));
          auto trace = nn::forward_sample(model, train_set.x[idx], &rng, true);
          chunk_loss[c] += detail::sample_loss(trace.probs, train_set.y[idx]);
          chunk_hits[c] += nn::argmax<T>(trace.probs) == train_set.y[idx] ? 1 : 0;
          nn::backward_sample(model, trace, train_set.y[idx], scale, chunk_grads[c]);
        }
      });
      for (std::size_t c = 1; c < chunks; ++c) chunk_grads[0].add(chunk_grads[c]);
      for (std::size_t c = 0; c < chunks; ++c) {
        loss_sum += chunk_loss[c];
        correct += chunk_hits[c];
      }
      nn::adam_step(model, chunk_grads[0], adam);
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(train_set.size());
    rec.train_accuracy = static_cast<double>(correct) / static_cast<double>(train_set.size());
    EvalResult val = hooks.validate ? hooks.validate(model, epoch) : evaluate(model, val_set, threads);
    rec.val_loss = val.loss;
    rec.val_accuracy = val.accuracy;
    history.records.push_back(rec);
    if (stopper.update(epoch, val.loss)) best_params = model.params;
    if (hooks.on_epoch_end) hooks.on_epoch_end(rec, model);
    if (stopper.should_stop()) break;
  }
  history.stopped_epoch = history.records.size();
  history.best_epoch = stopper.best_epoch();
  if (cfg.restore_best_weights && best_params) {
    model.params = std::move(*best_params);
    ++model.version;
  }
  return history;
}

}  // namespace gruscreen::train
