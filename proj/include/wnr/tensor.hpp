// Copyright 2026 The windnr Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "wnr/errors.hpp"

namespace wnr {

// Dense row-major tensor. Activations use [positions, freq, channels] with
// channels fastest; positions is batch * time flattened.
template <typename T>
class Tensor {
 public:
  using value_type = T;

  Tensor() = default;
  explicit Tensor(std::vector<int> dims, T fill = T(0))
      : dims_(std::move(dims)), data_(count(dims_), fill) {}

  const std::vector<int>& dims() const { return dims_; }
  int dim(int i) const { return dims_.at(static_cast<std::size_t>(i)); }
  int rank() const { return static_cast<int>(dims_.size()); }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }
  std::vector<T>& storage() { return data_; }
  const std::vector<T>& storage() const { return data_; }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }
  void zero() { fill(T(0)); }

  // Keeps the payload; the element count must not change.
  void reshape(std::vector<int> dims) {
    if (count(dims) != data_.size()) {
      throw ShapeError("reshape " + shape_string() + " -> " + format_dims(dims));
    }
    dims_ = std::move(dims);
  }
  void resize(std::vector<int> dims) {
    dims_ = std::move(dims);
    data_.assign(count(dims_), T(0));
  }

  bool same_shape(const Tensor& o) const { return dims_ == o.dims_; }
  std::string shape_string() const { return format_dims(dims_); }

  template <typename U>
  Tensor<U> cast() const {
    Tensor<U> out(dims_);
    std::transform(data_.begin(), data_.end(), out.data(),
                   [](T v) { return static_cast<U>(v); });
    return out;
  }

  static std::size_t count(const std::vector<int>& dims) {
    return std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                           [](std::size_t a, int d) { return a * static_cast<std::size_t>(d); });
  }
  static std::string format_dims(const std::vector<int>& dims) {
    std::string s = "(";
    for (std::size_t i = 0; i < dims.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(dims[i]);
    }
    return s + ")";
  }

 private:
  std::vector<int> dims_;
  std::vector<T> data_;
};

}  // namespace wnr
