// Copyright 2026 The windnr Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wnr/features.hpp"
#include "wnr/layers.hpp"
#include "wnr/stft.hpp"

namespace wnr {

// Rejection estimates the desired signal directly; extraction estimates the
// wind and subtracts it from the (delayed) input.
enum class Mode { kRejection, kExtraction };

std::string to_string(Mode mode);
Mode parse_mode(std::string_view name);  // ParameterError on unknown names
double default_alpha(Mode mode);         // 0.3 rejection, 1.0 extraction

struct ModelConfig {
  Mode mode = Mode::kRejection;
  double alpha = 0.3;
  std::vector<int> lf_filters{32, 64, 96, 128};
  std::vector<int> hf_filters{8, 16, 64};
  int lf_pointwise = 32;
  int hf_pointwise = 16;
  int gru_units = 128;
  int fc_out = 257;
  std::vector<int> stage2_filters{32, 32};
  ReorientConfig reorient;
  StftConfig stft;
  // Uniform width multiplier in (0, 1]; 1 is the reference network.
  double scale = 1.0;

  static ModelConfig for_mode(Mode mode, double scale = 1.0);

  // ceil(channels * scale), at least 2.
  int width(int channels) const;
  // Frequency extent of C_l / C_h (5 for the reference layout).
  int encoder_extent() const;
  int gru_input() const;
  int fc_input() const;
  void validate() const;  // ConfigError
};

inline constexpr int kConvTaps = 3;
// The input delay applied to every output sample: one analysis window.
inline constexpr int kLatencySamples = 512;

template <typename T>
struct ConvBnLayer {
  nn::Conv<T> conv;
  nn::BatchNorm<T> bn;
};

// Conv(1,3) + BN + ReLU blocks followed by a linear pointwise projection.
template <typename T>
struct Encoder {
  std::vector<ConvBnLayer<T>> layers;
  nn::Conv<T> pointwise;
};

template <typename T>
struct ParamRef {
  std::string name;
  Tensor<T>* tensor = nullptr;
  bool trainable = true;
};

template <typename T>
struct ConstParamRef {
  std::string name;
  const Tensor<T>* tensor = nullptr;
  bool trainable = true;
};

template <typename T>
struct Network {
  ModelConfig config;
  Encoder<T> lf;
  Encoder<T> hf;
  nn::Gru<T> gru;
  nn::Dense<T> fc;
  Encoder<T> stage2;

  // Every tensor allocated and zero-filled; BN running variance set to 1.
  static Network allocate(const ModelConfig& cfg);

  // Fixed order; names follow "<block>.<layer>.<tensor>", e.g. lf.conv1.kernel,
  // gru.U_z, stage2.pw.bias.
  std::vector<ParamRef<T>> params();
  std::vector<ConstParamRef<T>> params() const;

  std::int64_t param_count() const;  // trainable scalars only

  template <typename U>
  Network<U> cast() const;
};

using ShapeTrace = std::vector<std::pair<std::string, std::vector<int>>>;

struct ForwardOptions {
  bool training = false;
  nn::MacCounter* macs = nullptr;
  ShapeTrace* trace = nullptr;
};

template <typename T>
struct EncoderCache {
  std::vector<Tensor<T>> conv_inputs;  // one per conv layer plus the pointwise
  std::vector<nn::BatchNormCache<T>> bn;
  std::vector<Tensor<T>> activations;
};

template <typename T>
struct Stage1Cache {
  EncoderCache<T> lf;
  EncoderCache<T> hf;
  std::vector<int> hf_input_dims;
  Tensor<T> gru_input;  // {B, T, 5 * lf_pointwise}
  nn::GruCache<T> gru;
  Tensor<T> concat;     // {B*T, fc_input}
  Tensor<T> mask;       // {B*T, 257}
};

// Stage 1 on {B*T, L, 5} low/high sub-band tensors. Returns the sigmoid mask
// {B*T, fc_out}. gru_state ({B, H}) seeds the recurrence and receives the
// final hidden state; null means zeros and no carry-out.
template <typename T>
Tensor<T> run_stage1(const Network<T>& net, const Tensor<T>& low, const Tensor<T>& high,
                     int batch, int frames, Tensor<T>* gru_state, const ForwardOptions& opts,
                     Stage1Cache<T>* cache = nullptr);

// Stage 2 on {B*T, F, 2} intermediate features; returns {B*T, F, 2} with the
// two channels read as (Re M, Im M).
template <typename T>
Tensor<T> run_stage2(const Network<T>& net, const Tensor<T>& features,
                     const ForwardOptions& opts, EncoderCache<T>* cache = nullptr);

// Reverse passes; gradients accumulate into `grads` (same layout as net).
template <typename T>
Tensor<T> backward_stage2(const Network<T>& net, const EncoderCache<T>& cache,
                          const Tensor<T>& grad_mask, Network<T>& grads);
template <typename T>
void backward_stage1(const Network<T>& net, const Stage1Cache<T>& cache, int batch,
                     int frames, const Tensor<T>& grad_mask, Network<T>& grads);

// After a training forward pass: fold batch statistics into running stats.
template <typename T>
void update_running_stats(Network<T>& net, const Stage1Cache<T>& s1, const EncoderCache<T>& s2);

// ---------------------------------------------------------------------------
// Spectral-level operations on double-precision matrices.

struct IntermediateMask {
  int frames = 0;
  int bins = 0;
  std::vector<double> values;  // (0, 1)
};

struct ComplexMask {
  int frames = 0;
  int bins = 0;
  std::vector<double> mag;
  std::vector<double> phase;
};

// gru_state: {1, H}; carried across calls when non-null.
template <typename T>
IntermediateMask stage1_forward(const Network<T>& net, const SubBandTensor& low,
                                const SubBandTensor& high, Tensor<T>* gru_state,
                                const ForwardOptions& opts = {});

// Y_r = mask * cos(phase), Y_i = mask * sin(phase).
std::pair<std::vector<double>, std::vector<double>> intermediate_features(
    const IntermediateMask& mask, std::span<const double> phase);

template <typename T>
ComplexMask stage2_forward(const Network<T>& net, std::span<const double> y_real,
                           std::span<const double> y_imag, int frames,
                           const ForwardOptions& opts = {});

// Applies X_m * M_m * exp(j (X_p + M_p)) in the compressed domain, then
// decompresses with beta = 1 / alpha.
ComplexSpectrogram reconstruct(const MagPhase& x, const ComplexMask& m, double alpha,
                               const StftConfig& cfg = {});

// The full spectral path for consecutive frames of one stream: compression,
// both stages, reconstruction. Returns the linear-domain estimate (desired
// signal for rejection, wind for extraction).
template <typename T>
ComplexSpectrogram estimate_spectrum(const Network<T>& net, const ComplexSpectrogram& x,
                                     Tensor<T>* gru_state, const ForwardOptions& opts = {});

// ---------------------------------------------------------------------------
// Time-domain processing.

template <typename T>
struct StreamState {
  explicit StreamState(const ModelConfig& cfg);
  void reset();

  FrameTransform transform;
  std::vector<double> analysis;  // last win_len input samples
  std::vector<double> overlap;   // overlap-add accumulator, win_len samples
  std::vector<double> pending;   // completed hop waiting one block
  Tensor<T> gru_hidden;          // {1, H}
  std::int64_t blocks = 0;
};

// Offline processing. Output has the input's length and is delayed by
// kLatencySamples: out[n] corresponds to x[n - 512].
template <typename T>
AudioBuffer process(const Network<T>& net, const AudioBuffer& x);

// Streaming entry point: exactly `hop` new samples in, `hop` samples out.
// Concatenated outputs equal process() on the concatenated input.
template <typename T>
void process_frame(const Network<T>& net, std::span<const double> input,
                   std::span<double> output, StreamState<T>& state);

}  // namespace wnr
