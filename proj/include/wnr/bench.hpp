// Copyright 2026 The windnr Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wnr/model.hpp"
#include "wnr/weights.hpp"

namespace wnr {

// Reference figures for the full-size network on a Cortex-A53 core.
inline constexpr std::int64_t kReferenceParams = 249000;
inline constexpr double kReferenceRtf = 0.051;
inline constexpr double kReferenceMhz = 73.0;

struct LayerCount {
  std::string name;
  std::uint64_t count = 0;
};

// Multiply-accumulates per STFT frame, FFT excluded. Convolutions count
// out_positions * taps * in * out (padded taps included), the GRU
// 3 * (in * h + h * h), dense layers in * out.
std::uint64_t count_macs(const ModelConfig& cfg);
std::vector<LayerCount> mac_breakdown(const ModelConfig& cfg);

// Runs the spectral path on `frames` random frames with a counting forward
// pass and returns the per-frame total.
template <typename T>
std::uint64_t instrumented_macs_per_frame(const Network<T>& net, int frames = 8);

// Trainable parameters grouped by layer (e.g. lf.conv1, lf.bn1, gru, fc).
std::vector<LayerCount> param_breakdown(const ModelConfig& cfg);

struct ComplexityReport {
  std::int64_t params = 0;
  std::uint64_t macs_per_frame = 0;
  double frames_per_second = 62.5;
  double rtf = 0.0;         // median
  double rtf_iqr = 0.0;     // interquartile range
  std::vector<double> rtf_samples;
  double audio_seconds = 0.0;
  std::string precision;
  std::string platform;

  // macs_per_frame * frames_per_second, assuming one cycle per MAC.
  double mhz() const;
  double spread() const { return rtf > 0.0 ? rtf_iqr / rtf : 0.0; }
  std::string to_json() const;
  std::string to_table() const;
};

enum class Precision { kFloat32, kFloat64 };
std::string to_string(Precision p);
Precision parse_precision(const std::string& s);  // ParameterError

// Median wall-clock processing time / audio duration over `repetitions`
// single-threaded offline runs on seeded noise, after `warmup` untimed runs.
ComplexityReport measure_rtf(const WeightStore& weights, double audio_seconds, int repetitions,
                             int warmup = 2, Precision precision = Precision::kFloat32);

std::string platform_descriptor();

}  // namespace wnr
