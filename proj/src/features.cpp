// Copyright 2026 The windnr Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "wnr/features.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "wnr/errors.hpp"

namespace wnr {
namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw ParameterError("power-law factor must lie in (0, 1], got " +
                         std::to_string(alpha));
  }
}

}  // namespace

double compress_value(double v, double alpha) {
  if (v == 0.0) return 0.0;
  if (alpha == 1.0) return v;
  const double m = std::pow(std::abs(v), alpha);
  return v < 0.0 ? -m : m;
}

CompressedSpectrogram power_law_compress(const ComplexSpectrogram& x, double alpha) {
  check_alpha(alpha);
  CompressedSpectrogram y;
  y.frames = x.frames;
  y.bins = x.bins;
  y.alpha = alpha;
  y.config = x.config;
  y.real.resize(x.data.size());
  y.imag.resize(x.data.size());
  for (std::size_t i = 0; i < x.data.size(); ++i) {
    y.real[i] = compress_value(x.data[i].real(), alpha);
    y.imag[i] = compress_value(x.data[i].imag(), alpha);
  }
  return y;
}

ComplexSpectrogram power_law_decompress(const CompressedSpectrogram& y) {
  check_alpha(y.alpha);
  const double beta = 1.0 / y.alpha;
  ComplexSpectrogram x(y.frames, y.bins, y.config);
  for (std::size_t i = 0; i < x.data.size(); ++i) {
    x.data[i] = Complex(compress_value(y.real[i], beta), compress_value(y.imag[i], beta));
  }
  return x;
}

MagPhase mag_phase(const CompressedSpectrogram& y) {
  MagPhase m;
  m.frames = y.frames;
  m.bins = y.bins;
  m.mag.resize(y.real.size());
  m.phase.resize(y.real.size());
  for (std::size_t i = 0; i < y.real.size(); ++i) {
    m.mag[i] = std::hypot(y.real[i], y.imag[i]);
    // atan2(+-0, +0) is +-0 and atan2(0, -0) is pi; force exact zero bins to 0.
    double p = (y.real[i] == 0.0 && y.imag[i] == 0.0) ? 0.0 : std::atan2(y.imag[i], y.real[i]);
    if (p == -std::numbers::pi) p = std::numbers::pi;  // imag == -0.0
    m.phase[i] = p;
  }
  return m;
}

int ReorientConfig::stride() const {
  return static_cast<int>(std::lround(band_len * (1.0 - overlap)));
}

void ReorientConfig::validate(int bins) const {
  if (band_len <= 0 || num_bands <= 0 || stride() <= 0) {
    throw ConfigError("reorient: band length, band count and stride must be positive");
  }
  const int needed = stride() * (num_bands - 1) + band_len;
  if (needed > bins) {
    throw ConfigError("reorient: " + std::to_string(num_bands) + " bands of " +
                      std::to_string(band_len) + " bins need " + std::to_string(needed) +
                      " bins, input has " + std::to_string(bins));
  }
}

SubBandTensor reorient(const MagPhase& m, const ReorientConfig& cfg) {
  cfg.validate(m.bins);
  SubBandTensor c;
  c.frames = m.frames;
  c.band_len = cfg.band_len;
  c.num_bands = cfg.num_bands;
  c.data.resize(static_cast<std::size_t>(m.frames) * cfg.band_len * cfg.num_bands);
  const int stride = cfg.stride();
  std::size_t o = 0;
  for (int t = 0; t < m.frames; ++t) {
    const double* row = m.mag.data() + static_cast<std::size_t>(t) * m.bins;
    for (int k = 0; k < cfg.band_len; ++k) {
      for (int i = 0; i < cfg.num_bands; ++i) c.data[o++] = row[i * stride + k];
    }
  }
  return c;
}

std::pair<SubBandTensor, SubBandTensor> split_bands(const SubBandTensor& c) {
  if (c.num_bands != 10) {
    throw ConfigError("split_bands: expected 10 sub-bands, got " + std::to_string(c.num_bands));
  }
  constexpr int kHalf = 5;
  SubBandTensor low{c.frames, c.band_len, kHalf, {}};
  SubBandTensor high{c.frames, c.band_len, kHalf, {}};
  const std::size_t rows = static_cast<std::size_t>(c.frames) * c.band_len;
  low.data.resize(rows * kHalf);
  high.data.resize(rows * kHalf);
  for (std::size_t r = 0; r < rows; ++r) {
    for (int i = 0; i < kHalf; ++i) {
      low.data[r * kHalf + i] = c.data[r * c.num_bands + i];
      high.data[r * kHalf + i] = c.data[r * c.num_bands + kHalf + i];
    }
  }
  return {std::move(low), std::move(high)};
}

}  // namespace wnr
