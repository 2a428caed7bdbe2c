// Copyright 2026 The windnr Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstdint>
#include <vector>

#include "wnr/tensor.hpp"

// Layer kernels with hand-derived reverse-mode gradients. Every frequency
// kernel has time extent 1, so no layer here mixes positions except the GRU.
// Backward functions accumulate (+=) parameter gradients into a parameter
// struct of the same shape and overwrite the input gradient.
namespace wnr::nn {

inline constexpr double kBatchNormEps = 1e-5;
inline constexpr double kBatchNormMomentum = 0.99;

// Multiply-accumulates executed by conv, dense and GRU kernels.
struct MacCounter {
  std::uint64_t macs = 0;
};

// Conv2D with kernel (1, k) and stride (1, s). kernel is {k, in_ch, out_ch}.
template <typename T>
struct Conv {
  Tensor<T> kernel;
  Tensor<T> bias;
  int stride = 1;

  int taps() const { return kernel.dim(0); }
  int in_channels() const { return kernel.dim(1); }
  int out_channels() const { return kernel.dim(2); }
};

template <typename T>
struct BatchNorm {
  Tensor<T> gamma;
  Tensor<T> beta;
  Tensor<T> running_mean;
  Tensor<T> running_var;
};

// kernel is {out, in}.
template <typename T>
struct Dense {
  Tensor<T> kernel;
  Tensor<T> bias;
};

// Input kernels W_* are {hidden, input}; recurrent kernels U_* are
// {hidden, hidden}; one bias per gate.
template <typename T>
struct Gru {
  Tensor<T> W_z, W_r, W_h;
  Tensor<T> U_z, U_r, U_h;
  Tensor<T> b_z, b_r, b_h;

  int input_dim() const { return W_z.dim(1); }
  int hidden_dim() const { return W_z.dim(0); }
};

// Same-ceil padding: out = ceil(in / s), total pad split floor-left/ceil-right.
struct ConvGeometry {
  int in = 0;
  int out = 0;
  int pad_left = 0;
  int pad_total = 0;
};
ConvGeometry conv_geometry(int in_extent, int taps, int stride);

template <typename T>
Tensor<T> conv_forward(const Tensor<T>& x, const Conv<T>& p, MacCounter* macs = nullptr);
template <typename T>
void conv_backward(const Tensor<T>& x, const Conv<T>& p, const Tensor<T>& grad_y,
                   Tensor<T>* grad_x, Conv<T>& grad_p);

// Per-channel (last axis) statistics of a training batch.
template <typename T>
struct BatchNormCache {
  Tensor<T> normalized;
  std::vector<double> mean;
  std::vector<double> var;
  std::vector<double> inv_std;
};

template <typename T>
Tensor<T> batchnorm_forward(const Tensor<T>& x, const BatchNorm<T>& p, bool training,
                            BatchNormCache<T>* cache = nullptr);
template <typename T>
void batchnorm_backward(const BatchNormCache<T>& cache, const BatchNorm<T>& p,
                        const Tensor<T>& grad_y, Tensor<T>* grad_x, BatchNorm<T>& grad_p);
// Exponential moving update of running statistics from a training batch.
template <typename T>
void batchnorm_update_running(BatchNorm<T>& p, const BatchNormCache<T>& cache);

template <typename T>
Tensor<T> relu_forward(const Tensor<T>& x);
// y is the forward output.
template <typename T>
Tensor<T> relu_backward(const Tensor<T>& y, const Tensor<T>& grad_y);

template <typename T>
T sigmoid(T v);
template <typename T>
Tensor<T> sigmoid_forward(const Tensor<T>& x);
template <typename T>
Tensor<T> sigmoid_backward(const Tensor<T>& y, const Tensor<T>& grad_y);

// Average pooling (1, 2) along the frequency axis of {N, F, C}; a trailing
// odd element is dropped.
template <typename T>
Tensor<T> avgpool_forward(const Tensor<T>& x);
template <typename T>
Tensor<T> avgpool_backward(const std::vector<int>& x_dims, const Tensor<T>& grad_y);

// x {N, in} -> {N, out}
template <typename T>
Tensor<T> dense_forward(const Tensor<T>& x, const Dense<T>& p, MacCounter* macs = nullptr);
template <typename T>
void dense_backward(const Tensor<T>& x, const Dense<T>& p, const Tensor<T>& grad_y,
                    Tensor<T>* grad_x, Dense<T>& grad_p);

// One step:
//   z = sig(W_z x + U_z h + b_z),  r = sig(W_r x + U_r h + b_r)
//   c = tanh(W_h x + U_h (r * h) + b_h),  h' = (1 - z) * h + z * c
template <typename T>
void gru_step(const T* x, const T* h_prev, const Gru<T>& p, T* h_out,
              T* z_out = nullptr, T* r_out = nullptr, T* c_out = nullptr,
              MacCounter* macs = nullptr);

// Saved gates per (batch, time) for BPTT, each {B, T, H}.
template <typename T>
struct GruCache {
  Tensor<T> z, r, c, h_prev;
};

// x {B, T, in} -> h {B, T, H}. h0 is {B, H} or null for zeros.
template <typename T>
Tensor<T> gru_forward(const Tensor<T>& x, const Gru<T>& p, const Tensor<T>* h0 = nullptr,
                      GruCache<T>* cache = nullptr, MacCounter* macs = nullptr);
template <typename T>
void gru_backward(const Tensor<T>& x, const Gru<T>& p, const GruCache<T>& cache,
                  const Tensor<T>& grad_h, Tensor<T>* grad_x, Gru<T>& grad_p);

}  // namespace wnr::nn
