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
#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace gruscreen::nn {

/// Dense row-major matrix.
template <typename T>
class Matrix {
 public:
  using value_type = T;

  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T(0))
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  T& operator()(std::size_t r, std::size_t c) {
    assert(r < rows_ && c < cols_);
    return data_[r * cols_ + c];
  }
  const T& operator()(std::size_t r, std::size_t c) const {
    assert(r < rows_ && c < cols_);
    return data_[r * cols_ + c];
  }

  std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<T> flat() { return data_; }
  std::span<const T> flat() const { return data_; }
  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }

  void fill(T value) { std::fill(data_.begin(), data_.end(), value); }

  template <typename U>
  Matrix<U> cast() const {
    Matrix<U> out(rows_, cols_);
    for (std::size_t i = 0; i < data_.size(); ++i) out.data()[i] = static_cast<U>(data_[i]);
    return out;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

// out[j] += sum_i x[i] * w(i, j)
template <typename T>
inline void gemv_acc(std::span<const T> x, const Matrix<T>& w, std::span<T> out) {
  assert(x.size() == w.rows() && out.size() == w.cols());
  const std::size_t cols = w.cols();
  T* o = out.data();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const T xi = x[i];
    if (xi == T(0)) continue;
    const T* wr = w.data() + i * cols;
    for (std::size_t j = 0; j < cols; ++j) o[j] += xi * wr[j];
  }
}

// out[i] += sum_j w(i, j) * g[j]
template <typename T>
inline void gemv_t_acc(const Matrix<T>& w, std::span<const T> g, std::span<T> out) {
  assert(g.size() == w.cols() && out.size() == w.rows());
  const std::size_t cols = w.cols();
  for (std::size_t i = 0; i < w.rows(); ++i) {
    const T* wr = w.data() + i * cols;
    T acc = T(0);
    for (std::size_t j = 0; j < cols; ++j) acc += wr[j] * g[j];
    out[i] += acc;
  }
}

// w(i, j) += x[i] * g[j]
template <typename T>
inline void outer_acc(std::span<const T> x, std::span<const T> g, Matrix<T>& w) {
  assert(x.size() == w.rows() && g.size() == w.cols());
  const std::size_t cols = w.cols();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const T xi = x[i];
    if (xi == T(0)) continue;
    T* wr = w.data() + i * cols;
    for (std::size_t j = 0; j < cols; ++j) wr[j] += xi * g[j];
  }
}

}  // namespace gruscreen::nn
