// Copyright 2026 The windnr Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "wnr/audio.hpp"

namespace wnr {

using Complex = std::complex<double>;

// 32 ms Hann analysis at 16 kHz with 50% overlap.
struct StftConfig {
  int fft_len = 512;
  int win_len = 512;
  int hop = 256;

  int n_bins() const { return fft_len / 2 + 1; }
  // Throws ConfigError unless win_len == fft_len and hop == win_len / 2.
  void validate() const;
  bool operator==(const StftConfig&) const = default;
};

// T x F complex matrix, row-major (frame-major).
struct ComplexSpectrogram {
  int frames = 0;
  int bins = 0;
  std::vector<Complex> data;
  StftConfig config;

  ComplexSpectrogram() = default;
  ComplexSpectrogram(int t, int f, StftConfig cfg = {})
      : frames(t), bins(f), data(static_cast<std::size_t>(t) * f), config(cfg) {}

  Complex& at(int t, int f) { return data[static_cast<std::size_t>(t) * bins + f]; }
  const Complex& at(int t, int f) const {
    return data[static_cast<std::size_t>(t) * bins + f];
  }
  std::span<Complex> frame(int t) {
    return {data.data() + static_cast<std::size_t>(t) * bins,
            static_cast<std::size_t>(bins)};
  }
  std::span<const Complex> frame(int t) const {
    return {data.data() + static_cast<std::size_t>(t) * bins,
            static_cast<std::size_t>(bins)};
  }
};

// Number of frames for a signal of `num_samples` without padding.
int num_frames(std::size_t num_samples, const StftConfig& cfg);

// Per-frame analysis/synthesis shared by the offline transforms and the
// streaming engine, so both paths run identical arithmetic. Owns its FFT
// scratch; one instance must not be used from two threads at once.
class FrameTransform {
 public:
  explicit FrameTransform(const StftConfig& cfg = {});
  ~FrameTransform();
  FrameTransform(FrameTransform&&) noexcept;
  FrameTransform& operator=(FrameTransform&&) noexcept;

  const StftConfig& config() const { return cfg_; }
  std::span<const double> analysis_window() const { return analysis_window_; }
  // Hann divided by the steady-state overlap-added squared window.
  std::span<const double> synthesis_window() const { return synthesis_window_; }

  // win_len samples in, n_bins coefficients out.
  void analyze(std::span<const double> frame, std::span<Complex> bins);
  // n_bins coefficients in, win_len windowed samples out.
  void synthesize(std::span<const Complex> bins, std::span<double> frame);

 private:
  struct Scratch;
  StftConfig cfg_;
  std::vector<double> analysis_window_;
  std::vector<double> synthesis_window_;
  std::unique_ptr<Scratch> scratch_;
};

// Frame t covers samples [t*hop, t*hop + win_len); no implicit padding.
ComplexSpectrogram stft(const AudioBuffer& x, const StftConfig& cfg = {});

// Weighted overlap-add; output has (T-1)*hop + win_len samples.
AudioBuffer istft(const ComplexSpectrogram& spec);

}  // namespace wnr
