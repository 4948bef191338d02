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


#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <vector>

#include "gruscreen/nn/adam.hpp"
#include "gruscreen/nn/gru.hpp"
#include "gruscreen/nn/init.hpp"
#include "gruscreen/nn/loss.hpp"
#include "gruscreen/nn/model.hpp"
#include "gruscreen/nn/param_count.hpp"
#include "gruscreen/nn/pretrained.hpp"
#include "support/grad_check.hpp"

namespace {

using namespace gruscreen::nn;
using gruscreen::Error;
using gruscreen::ErrorCode;
using gruscreen::text::EncodedSequence;

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no gruscreen::Error thrown";
  return ErrorCode::kInvalidArgument;
}

// ---- initializers

double orthogonality_gap(const Matrix<double>& m) {
  // Gram matrix over the smaller dimension
  const bool tall = m.rows() >= m.cols();
  const std::size_t k = tall ? m.cols() : m.rows();
  const std::size_t n = tall ? m.rows() : m.cols();
  double worst = 0.0;
  for (std::size_t a = 0; a < k; ++a) {
    double row_sum = 0.0;
    for (std::size_t b = 0; b < k; ++b) {
      double dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) dot += tall ? m(i, a) * m(i, b) : m(a, i) * m(b, i);
      row_sum += std::abs(dot - (a == b ? 1.0 : 0.0));
    }
    worst = std::max(worst, row_sum);
  }
  return worst;
}

TEST(Init, OrthogonalAcrossSeedsAndShapes) {
  const std::vector<std::pair<std::size_t, std::size_t>> shapes = {{50, 50}, {4, 2}, {50, 150}, {3, 9}, {1, 1},
                                                                   {7, 3},   {2, 5}, {16, 16},  {30, 90}, {100, 20}};
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    for (auto [r, c] : shapes) {
      auto m = orthogonal_init<double>(r, c, seed * 7919 + r);
      ASSERT_LE(orthogonality_gap(m), 1e-5) << r << "x" << c << " seed " << seed;
      // float storage too
      auto f = orthogonal_init<float>(r, c, seed * 7919 + r).cast<double>();
      ASSERT_LE(orthogonality_gap(f), 1e-5);
    }
  }
}

TEST(Init, OrthogonalSingularValuesAreOne) {
  for (auto [r, c] : std::vector<std::pair<int, int>>{{50, 50}, {4, 2}, {50, 150}, {12, 5}}) {
    auto m = orthogonal_init<double>(static_cast<std::size_t>(r), static_cast<std::size_t>(c), 99);
    Eigen::MatrixXd e(r, c);
    for (int i = 0; i < r; ++i) {
      for (int j = 0; j < c; ++j) e(i, j) = m(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(e);
    for (int i = 0; i < svd.singularValues().size(); ++i) EXPECT_NEAR(svd.singularValues()(i), 1.0, 1e-5);
  }
}

TEST(Init, OrthogonalDeterministicAndSeedSensitive) {
  EXPECT_EQ(orthogonal_init<float>(50, 150, 5), orthogonal_init<float>(50, 150, 5));
  EXPECT_FALSE(orthogonal_init<float>(50, 150, 5) == orthogonal_init<float>(50, 150, 6));
}

TEST(Init, GlorotWithinBound) {
  const double bound = 0.154919333848297;  // sqrt(6 / 250)
  auto m = glorot_uniform_init<double>(100, 150, 1);
  double lo = 1, hi = -1, sum = 0;
  for (double v : m.flat()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    sum += v;
  }
  EXPECT_GE(lo, -bound);
  EXPECT_LE(hi, bound);
  // spread reaches close to the bound, and centers on zero
  EXPECT_LT(lo, -0.95 * bound);
  EXPECT_GT(hi, 0.95 * bound);
  EXPECT_NEAR(sum / static_cast<double>(m.size()), 0.0, 0.005);
  for (std::uint64_t s = 0; s < 100; ++s) {
    auto one = glorot_uniform_init<double>(1, 1, s);
    ASSERT_LE(std::abs(one(0, 0)), std::sqrt(3.0));
  }
  EXPECT_EQ(glorot_uniform_init<float>(100, 150, 3), glorot_uniform_init<float>(100, 150, 3));
  EXPECT_EQ(code_of([] { glorot_uniform_init<float>(0, 3, 1); }), ErrorCode::kInvalidArgument);
}

// ---- GRU cell

GruLayer<double> filled_layer(std::size_t in, std::size_t u, double value) {
  auto p = GruLayer<double>::zeros(in, u);
  std::fill(p.w_in.flat().begin(), p.w_in.flat().end(), value);
  std::fill(p.w_rec.flat().begin(), p.w_rec.flat().end(), value);
  std::fill(p.b_in.begin(), p.b_in.end(), value);
  std::fill(p.b_rec.begin(), p.b_rec.end(), value);
  return p;
}

TEST(GruCell, AllOnesScalar) {
  auto p = filled_layer(1, 1, 1.0);
  std::vector<double> x{1.0}, h{0.0};
  auto out = gru_cell_forward<double>(x, h, p);
  EXPECT_NEAR(out[0], 0.0471680689567778, 1e-9);
}

TEST(GruCell, ZeroParamsHalveState) {
  auto p = GruLayer<double>::zeros(3, 1);
  std::vector<double> x{5.0, -2.0, 0.3}, h{0.4};
  EXPECT_NEAR(gru_cell_forward<double>(x, h, p)[0], 0.2, 1e-12);
}

TEST(GruCell, ZeroCandidatePathFromZeroState) {
  auto p = filled_layer(2, 2, 0.7);
  // zero every candidate-group column (gate order z | r | h)
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 4; j < 6; ++j) {
      p.w_in(i, j) = 0;
      p.w_rec(i, j) = 0;
    }
  }
  p.b_in[4] = p.b_in[5] = p.b_rec[4] = p.b_rec[5] = 0;
  std::vector<double> x{1.5, -0.5}, h{0.0, 0.0};
  auto out = gru_cell_forward<double>(x, h, p);
  EXPECT_EQ(out[0], 0.0);
  EXPECT_EQ(out[1], 0.0);
}

TEST(GruCell, HandComputedTwoUnit) {
  // Gate blocks differ so that a wrong gate order or bias layout shows.
  auto p = GruLayer<double>::zeros(1, 2);
  for (std::size_t j = 0; j < 6; ++j) {
    p.w_in(0, j) = 0.1 * static_cast<double>(j + 1);
    p.b_in[j] = -0.05 * static_cast<double>(j);
    p.b_rec[j] = 0.02 * static_cast<double>(j);
    for (std::size_t i = 0; i < 2; ++i) p.w_rec(i, j) = 0.1 * static_cast<double>(i) - 0.03 * static_cast<double>(j);
  }
  std::vector<double> x{0.8}, h{0.3, -0.6};
  auto out = gru_cell_forward<double>(x, h, p);
  // evaluated independently at 30 significant digits
  EXPECT_NEAR(out[0], 0.26335064371598173379, 1e-9);
  EXPECT_NEAR(out[1], -0.18225864251365403187, 1e-9);
}

TEST(GruCell, ShapeMismatch) {
  auto p = GruLayer<double>::zeros(2, 2);
  std::vector<double> x{1.0}, h{0.0, 0.0};
  EXPECT_EQ(code_of([&] { gru_cell_forward<double>(x, h, p); }), ErrorCode::kShapeMismatch);
}

TEST(GruCell, OutputBoundedForRandomInputs) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> d(-3, 3);
  for (int k = 0; k < 500; ++k) {
    auto p = GruLayer<double>::zeros(3, 4);
    for (auto& v : p.w_in.flat()) v = d(gen);
    for (auto& v : p.w_rec.flat()) v = d(gen);
    for (auto& v : p.b_in) v = d(gen);
    for (auto& v : p.b_rec) v = d(gen);
    std::vector<double> x{d(gen), d(gen), d(gen)}, h(4);
    for (auto& v : h) v = std::tanh(d(gen));
    auto out = gru_cell_forward<double>(x, h, p);
    for (double v : out) {
      ASSERT_TRUE(std::isfinite(v));
      ASSERT_LT(std::abs(v), 1.0);
    }
  }
}

// ---- loss

TEST(Loss, CrossEntropyExamples) {
  Matrix<double> probs(1, 2), onehot(1, 2);
  probs(0, 0) = 1.0;
  onehot(0, 0) = 1.0;
  EXPECT_NEAR(categorical_cross_entropy(probs, onehot), 1.00000005e-7, 1e-15);
  probs(0, 0) = probs(0, 1) = 0.5;
  EXPECT_NEAR(categorical_cross_entropy(probs, onehot), 0.693147180559945, 1e-12);

  Matrix<double> two(2, 2), labels(2, 2);
  two(0, 0) = 0.8;
  two(0, 1) = 0.2;
  two(1, 0) = 0.3;
  two(1, 1) = 0.7;
  labels(0, 0) = 1;
  labels(1, 1) = 1;
  EXPECT_NEAR(categorical_cross_entropy(two, labels), (-std::log(0.8) - std::log(0.7)) / 2, 1e-12);
  EXPECT_EQ(code_of([&] { categorical_cross_entropy(probs, labels); }), ErrorCode::kShapeMismatch);
}

// ---- model

TEST(ParamCount, DefaultConfig) {
  auto p = param_count(ModelConfig{});
  EXPECT_EQ(p.embedding, 1000000u);
  EXPECT_EQ(p.gru1, 22800u);
  EXPECT_EQ(p.gru2, 15300u);
  EXPECT_EQ(p.gru3, 15300u);
  EXPECT_EQ(p.dense, 102u);
  EXPECT_EQ(p.total, 1053502u);
  EXPECT_EQ(p.trainable, 53502u);
  EXPECT_EQ(p.non_trainable, 1000000u);
}

TEST(ParamCount, UnitConfig) {
  ModelConfig c;
  c.vocab_size = c.embed_dim = c.gru_units = c.num_classes = 1;
  auto p = param_count(c);
  EXPECT_EQ(p.embedding, 1u);
  EXPECT_EQ(p.gru1, 12u);
  EXPECT_EQ(p.gru2, 12u);
  EXPECT_EQ(p.gru3, 12u);
  EXPECT_EQ(p.dense, 2u);
}

TEST(ParamCount, MatchesAllocatedModel) {
  auto m = make_model<float>(ModelConfig{}, 1);
  EXPECT_EQ(m.params.count(), param_count(m.config).trainable);
  EXPECT_EQ(m.embedding.size(), param_count(m.config).embedding);
}

TEST(ModelConfig, RejectsInvalid) {
  ModelConfig c;
  c.embedding_trainable = true;
  EXPECT_EQ(code_of([&] { c.validate(); }), ErrorCode::kInvalidArgument);
  c = {};
  c.dropout_rate = 1.0;
  EXPECT_EQ(code_of([&] { c.validate(); }), ErrorCode::kInvalidArgument);
  c = {};
  c.gru_units = 0;
  EXPECT_EQ(code_of([&] { c.validate(); }), ErrorCode::kInvalidArgument);
}

std::vector<EncodedSequence> random_batch(std::size_t n, const ModelConfig& c, std::mt19937_64& gen) {
  std::vector<EncodedSequence> batch(n, EncodedSequence(c.seq_len));
  for (auto& s : batch) {
    for (auto& v : s) v = static_cast<std::uint32_t>(gen() % c.vocab_size);
  }
  return batch;
}

TEST(Forward, SoftmaxRowsSumToOne) {
  std::mt19937_64 gen(21);
  int cases = 0;
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    ModelConfig c = oracle::tiny_config(0.2);
    c.num_classes = 2 + seed % 3;
    auto m = make_model<float>(c, seed);
    // push the logits around
    for (auto& v : m.params.dense_b) v = static_cast<float>(static_cast<double>(gen() % 2000) / 100.0 - 10.0);
    auto batch = random_batch(20, c, gen);
    for (auto mode : {Mode::kInfer, Mode::kTrain}) {
      auto probs = forward(m, batch, mode, seed).probs;
      for (std::size_t i = 0; i < probs.rows(); ++i) {
        double s = 0;
        for (float p : probs.row(i)) {
          ASSERT_GE(p, 0.0f);
          s += p;
        }
        ASSERT_NEAR(s, 1.0, 1e-6);
        ++cases;
      }
    }
  }
  EXPECT_GE(cases, 1000);
}

TEST(Forward, ZeroDenseGivesUniform) {
  auto m = make_model<double>(oracle::tiny_config(0.2), 4);
  m.params.dense_w = Matrix<double>(3, 2);
  std::mt19937_64 gen(1);
  auto probs = forward(m, random_batch(4, m.config, gen), Mode::kTrain, 9).probs;
  for (double p : probs.flat()) EXPECT_DOUBLE_EQ(p, 0.5);
}

TEST(Forward, InferenceDeterministicAndDropoutFree) {
  auto m = make_model<float>(oracle::tiny_config(0.5), 8);
  std::mt19937_64 gen(2);
  auto batch = random_batch(6, m.config, gen);
  auto a = predict(m, batch);
  auto b = forward(m, batch, Mode::kInfer, 12345).probs;
  EXPECT_EQ(a, b);
  // train mode with a different seed should disagree somewhere
  auto t = forward(m, batch, Mode::kTrain, 1).probs;
  EXPECT_FALSE(t == a);
  EXPECT_EQ(t, forward(m, batch, Mode::kTrain, 1).probs);
}

TEST(Forward, PaddingIsAnOrdinaryIndex) {
  auto m = make_model<double>(oracle::tiny_config(0.2), 2);
  std::vector<EncodedSequence> pads = {EncodedSequence(5, 0), EncodedSequence(5, 0)};
  auto probs = predict(m, pads);
  EXPECT_EQ(probs(0, 0), probs(1, 0));
  // changing embedding row 0 changes the output
  m.embedding(0, 0) += 0.5;
  EXPECT_NE(predict(m, pads)(0, 0), probs(0, 0));
}

TEST(Forward, RejectsBadInput) {
  auto m = make_model<float>(oracle::tiny_config(0.2), 2);
  std::vector<EncodedSequence> bad = {EncodedSequence{1, 2, 3, 4, 20}};
  EXPECT_EQ(code_of([&] { predict(m, bad); }), ErrorCode::kIndexOutOfVocab);
  std::vector<EncodedSequence> short_seq = {EncodedSequence{1, 2}};
  EXPECT_EQ(code_of([&] { predict(m, short_seq); }), ErrorCode::kShapeMismatch);
}

TEST(Dropout, MaskExpectation) {
  const std::size_t cells = 8;
  std::vector<double> mean(cells, 0.0);
  const int masks = 20000;
  Rng rng(77);
  for (int k = 0; k < masks; ++k) {
    auto mask = detail::dropout_mask<double>(1, cells, 0.2, rng);
    for (std::size_t j = 0; j < cells; ++j) {
      ASSERT_TRUE(mask(0, j) == 0.0 || std::abs(mask(0, j) - 1.25) < 1e-12);
      mean[j] += mask(0, j) / masks;
    }
  }
  for (double m : mean) {
    EXPECT_GE(m, 0.97);
    EXPECT_LE(m, 1.03);
  }
}

TEST(Backward, MatchesFiniteDifferences) {
  std::mt19937_64 gen(31);
  for (double rate : {0.0, 0.2}) {
    for (std::uint64_t seed : {1u, 2u}) {
      auto m = oracle::tiny_model(rate, seed);
      auto batch = random_batch(2, m.config, gen);
      std::vector<int> labels = {0, 1};
      auto checks = oracle::gradient_check(m, batch, labels, 1000 + seed);
      EXPECT_EQ(checks.size(), 14u);
      for (const auto& [name, c] : checks) {
        EXPECT_LE(c.relative_error, 1e-4) << name << " rate " << rate;
        EXPECT_GT(c.analytic_norm, 0.0) << name;
      }
    }
  }
}

TEST(Backward, SymmetricPairHasZeroGradient) {
  // one sequence labelled both ways: the loss is minimal where both logits
  // agree, which equal dense columns and biases guarantee
  auto m = oracle::tiny_model(0.0, 5);
  for (std::size_t i = 0; i < m.params.dense_w.rows(); ++i) m.params.dense_w(i, 1) = m.params.dense_w(i, 0);
  m.params.dense_b[1] = m.params.dense_b[0];
  std::vector<EncodedSequence> batch = {EncodedSequence{3, 7, 1, 0, 0}, EncodedSequence{3, 7, 1, 0, 0}};
  std::vector<int> labels = {0, 1};
  auto pass = forward(m, batch, Mode::kTrain, 0);
  EXPECT_NEAR(pass.probs(0, 0), 0.5, 1e-15);
  auto g = backward(m, pass.cache, labels);
  g.visit([](const std::string& name, std::span<const double> d, const auto&) {
    for (double v : d) EXPECT_LE(std::abs(v), 1e-8) << name;
  });
}

TEST(Backward, DroppedPathHasZeroGradient) {
  auto m = oracle::tiny_model(0.999999, 3);
  std::vector<EncodedSequence> batch = {EncodedSequence{1, 2, 3, 4, 5}, EncodedSequence{6, 7, 8, 9, 10}};
  std::vector<int> labels = {0, 1};
  auto pass = forward(m, batch, Mode::kTrain, 17);
  for (const auto& s : pass.cache.samples) {
    for (const auto& mask : s.masks) {
      for (double v : mask.flat()) ASSERT_EQ(v, 0.0);
    }
  }
  auto g = backward(m, pass.cache, labels);
  // nothing reaches gru1, and no layer sees a nonzero input
  for (double v : g.gru[0].w_in.flat()) EXPECT_EQ(v, 0.0);
  for (double v : g.gru[0].w_rec.flat()) EXPECT_EQ(v, 0.0);
  for (double v : g.gru[0].b_in) EXPECT_EQ(v, 0.0);
  for (double v : g.gru[1].w_in.flat()) EXPECT_EQ(v, 0.0);
  for (double v : g.gru[2].w_in.flat()) EXPECT_EQ(v, 0.0);
  // the bias path of the last layer still learns
  double bias = 0;
  for (double v : g.gru[2].b_in) bias += std::abs(v);
  EXPECT_GT(bias, 0.0);
}

TEST(Backward, GradientShapesMirrorParams) {
  auto m = make_model<float>(ModelConfig{}, 1);
  std::mt19937_64 gen(4);
  auto batch = random_batch(2, m.config, gen);
  std::vector<int> labels = {1, 0};
  auto pass = forward(m, batch, Mode::kTrain, 3);
  auto g = backward(m, pass.cache, labels);
  EXPECT_EQ(g.count(), m.params.count());
  std::vector<std::vector<std::size_t>> a, b;
  g.visit([&](const std::string&, std::span<const float>, const std::vector<std::size_t>& s) { a.push_back(s); });
  m.params.visit([&](const std::string&, std::span<const float>, const std::vector<std::size_t>& s) { b.push_back(s); });
  EXPECT_EQ(a, b);
}

TEST(Backward, StaleCache) {
  auto m = make_model<float>(oracle::tiny_config(0.2), 1);
  std::mt19937_64 gen(4);
  auto batch = random_batch(2, m.config, gen);
  std::vector<int> labels = {1, 0};
  auto infer = forward(m, batch, Mode::kInfer);
  EXPECT_EQ(code_of([&] { backward(m, infer.cache, labels); }), ErrorCode::kStaleCache);
  auto pass = forward(m, batch, Mode::kTrain, 3);
  auto g = backward(m, pass.cache, labels);
  auto state = AdamState<float>::fresh(m.config);
  adam_step(m, g, state);
  EXPECT_EQ(code_of([&] { backward(m, pass.cache, labels); }), ErrorCode::kStaleCache);
}

// ---- Adam

TEST(Adam, FirstStepScalar) {
  std::vector<double> theta{0.0}, grad{0.1}, m{0.0}, v{0.0};
  adam_update<double>(theta, grad, m, v, 1, AdamHyper{});
  EXPECT_NEAR(theta[0], -0.000999999000001, 1e-15);
}

TEST(Adam, RepeatedGradientDoesNotGrowStep) {
  std::vector<double> theta{0.0}, grad{0.1}, m{0.0}, v{0.0};
  adam_update<double>(theta, grad, m, v, 1, AdamHyper{});
  const double first = -theta[0];
  const double before = theta[0];
  adam_update<double>(theta, grad, m, v, 2, AdamHyper{});
  const double second = before - theta[0];
  EXPECT_NEAR(first, 0.000999999000000999999, 1e-15);
  EXPECT_NEAR(second, 0.000999999000000999990, 1e-15);
  EXPECT_LE(std::abs(second), std::abs(first) + 1e-9);
}

TEST(Adam, ZeroGradientLeavesParams) {
  auto model = make_model<float>(oracle::tiny_config(0.2), 6);
  auto before = model;
  auto state = AdamState<float>::fresh(model.config);
  adam_step(model, Params<float>::zeros_like(model.config), state);
  EXPECT_EQ(model.params.gru[0].w_in, before.params.gru[0].w_in);
  EXPECT_TRUE(model.same_weights(before));
  EXPECT_EQ(state.step, 1u);
}

TEST(Adam, EmbeddingStaysFrozen) {
  auto model = make_model<float>(oracle::tiny_config(0.2), 6);
  const auto initial = model.embedding;
  auto state = AdamState<float>::fresh(model.config);
  std::mt19937_64 gen(8);
  for (int step = 0; step < 20; ++step) {
    auto batch = random_batch(4, model.config, gen);
    std::vector<int> labels = {0, 1, 1, 0};
    auto pass = forward(model, batch, Mode::kTrain, static_cast<std::uint64_t>(step));
    adam_step(model, backward(model, pass.cache, labels), state);
  }
  EXPECT_EQ(model.embedding, initial);
  EXPECT_FALSE(model.params.gru[0].w_in == make_model<float>(oracle::tiny_config(0.2), 6).params.gru[0].w_in);
}

TEST(Adam, ShapeMismatch) {
  std::vector<double> theta{0.0, 1.0}, grad{0.1}, m{0.0, 0.0}, v{0.0, 0.0};
  EXPECT_EQ(code_of([&] { adam_update<double>(theta, grad, m, v, 1, AdamHyper{}); }), ErrorCode::kShapeMismatch);
}

TEST(Pretrained, LoadsKnownWords) {
  auto model = make_model<float>(oracle::tiny_config(0.2), 1);
  auto vocab = gruscreen::text::fit_vocabulary({"alpha beta"}, 10);
  std::istringstream in("alpha 1 2 3 4\nunknown 0 0 0 0\nbeta 5 6 7 8\n");
  EXPECT_EQ(load_pretrained_embedding(in, vocab, model), 2u);
  EXPECT_EQ(model.embedding(1, 0), 1.0f);
  EXPECT_EQ(model.embedding(2, 3), 8.0f);
  std::istringstream bad("alpha 1 2\n");
  EXPECT_EQ(code_of([&] { load_pretrained_embedding(bad, vocab, model); }), ErrorCode::kShapeMismatch);
}

}  // namespace
