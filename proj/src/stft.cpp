// Copyright 2026 The windnr Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "wnr/stft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <utility>

#include "wnr/errors.hpp"

namespace wnr {
namespace {

// FFTW planning is not thread-safe; execution with the new-array interface
// is. Plans are created once per size and shared by all FrameTransforms.
struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
};

const PlanPair& plans_for(int n) {
  static std::mutex mu;
  static std::map<int, PlanPair> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  double* real = fftw_alloc_real(n);
  fftw_complex* cplx = fftw_alloc_complex(n / 2 + 1);
  PlanPair p;
  p.forward = fftw_plan_dft_r2c_1d(n, real, cplx, FFTW_ESTIMATE);
  p.inverse = fftw_plan_dft_c2r_1d(n, cplx, real, FFTW_ESTIMATE);
  fftw_free(real);
  fftw_free(cplx);
  return cache.emplace(n, p).first->second;
}

}  // namespace

struct FrameTransform::Scratch {
  double* real = nullptr;
  fftw_complex* cplx = nullptr;
  const PlanPair* plans = nullptr;

  explicit Scratch(int n)
      : real(fftw_alloc_real(n)),
        cplx(fftw_alloc_complex(n / 2 + 1)),
        plans(&plans_for(n)) {}
  ~Scratch() {
    fftw_free(real);
    fftw_free(cplx);
  }
  Scratch(const Scratch&) = delete;
  Scratch& operator=(const Scratch&) = delete;
};

void StftConfig::validate() const {
  if (fft_len <= 0 || win_len != fft_len || hop <= 0 || hop * 2 != win_len) {
    throw ConfigError("stft: need win_len == fft_len and hop == win_len/2 (got fft " +
                      std::to_string(fft_len) + ", win " + std::to_string(win_len) +
                      ", hop " + std::to_string(hop) + ")");
  }
}

int num_frames(std::size_t num_samples, const StftConfig& cfg) {
  const auto win = static_cast<std::size_t>(cfg.win_len);
  if (num_samples < win) return 0;
  return static_cast<int>((num_samples - win) / cfg.hop + 1);
}

FrameTransform::FrameTransform(const StftConfig& cfg)
    : cfg_(cfg),
      analysis_window_(cfg.win_len),
      synthesis_window_(cfg.win_len) {
  cfg_.validate();
  const int n = cfg_.win_len;
  // Periodic Hann.
  for (int i = 0; i < n; ++i) {
    analysis_window_[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n);
  }
  std::vector<double> overlap_sum(cfg_.hop, 0.0);
  for (int i = 0; i < n; ++i) overlap_sum[i % cfg_.hop] += analysis_window_[i] * analysis_window_[i];
  for (int i = 0; i < n; ++i) {
    synthesis_window_[i] = analysis_window_[i] / overlap_sum[i % cfg_.hop];
  }
  scratch_ = std::make_unique<Scratch>(cfg_.fft_len);
}

FrameTransform::~FrameTransform() = default;
FrameTransform::FrameTransform(FrameTransform&&) noexcept = default;
FrameTransform& FrameTransform::operator=(FrameTransform&&) noexcept = default;

void FrameTransform::analyze(std::span<const double> frame,
                             std::span<Complex> bins) {
  if (static_cast<int>(frame.size()) != cfg_.win_len ||
      static_cast<int>(bins.size()) != cfg_.n_bins()) {
    throw ShapeError("stft: analyze expects win_len samples and n_bins outputs");
  }
  for (int i = 0; i < cfg_.win_len; ++i) {
    scratch_->real[i] = frame[i] * analysis_window_[i];
  }
  fftw_execute_dft_r2c(scratch_->plans->forward, scratch_->real, scratch_->cplx);
  for (int k = 0; k < cfg_.n_bins(); ++k) {
    bins[k] = Complex(scratch_->cplx[k][0], scratch_->cplx[k][1]);
  }
}

void FrameTransform::synthesize(std::span<const Complex> bins,
                                std::span<double> frame) {
  if (static_cast<int>(frame.size()) != cfg_.win_len ||
      static_cast<int>(bins.size()) != cfg_.n_bins()) {
    throw ShapeError("istft: synthesize expects n_bins inputs and win_len outputs");
  }
  const int nb = cfg_.n_bins();
  for (int k = 0; k < nb; ++k) {
    scratch_->cplx[k][0] = bins[k].real();
    scratch_->cplx[k][1] = bins[k].imag();
  }
  // DC and Nyquist of a real signal carry no imaginary part.
  scratch_->cplx[0][1] = 0.0;
  scratch_->cplx[nb - 1][1] = 0.0;
  fftw_execute_dft_c2r(scratch_->plans->inverse, scratch_->cplx, scratch_->real);
  const double scale = 1.0 / cfg_.fft_len;
  for (int i = 0; i < cfg_.win_len; ++i) {
    frame[i] = scratch_->real[i] * scale * synthesis_window_[i];
  }
}

ComplexSpectrogram stft(const AudioBuffer& x, const StftConfig& cfg) {
  if (x.empty()) throw EmptyInputError("stft: empty input");
  require_pipeline_audio(x);
  FrameTransform ft(cfg);
  const int frames = num_frames(x.size(), cfg);
  ComplexSpectrogram out(frames, cfg.n_bins(), cfg);
  for (int t = 0; t < frames; ++t) {
    std::span<const double> window(x.samples.data() + static_cast<std::size_t>(t) * cfg.hop,
                                   static_cast<std::size_t>(cfg.win_len));
    ft.analyze(window, out.frame(t));
  }
  return out;
}

AudioBuffer istft(const ComplexSpectrogram& spec) {
  AudioBuffer out;
  if (spec.frames == 0) return out;
  const StftConfig& cfg = spec.config;
  if (spec.bins != cfg.n_bins()) throw ShapeError("istft: bin count does not match config");
  for (const auto& c : spec.data) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
      throw ParameterError("istft: non-finite spectrogram entry");
    }
  }
  FrameTransform ft(cfg);
  out.samples.assign(static_cast<std::size_t>(spec.frames - 1) * cfg.hop + cfg.win_len, 0.0);
  std::vector<double> frame(cfg.win_len);
  for (int t = 0; t < spec.frames; ++t) {
    ft.synthesize(spec.frame(t), frame);
    double* dst = out.samples.data() + static_cast<std::size_t>(t) * cfg.hop;
    for (int i = 0; i < cfg.win_len; ++i) dst[i] += frame[i];
  }
  return out;
}

}  // namespace wnr
