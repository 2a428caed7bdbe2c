// Copyright 2026 The windnr Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <utility>
#include <vector>

#include "wnr/stft.hpp"

namespace wnr {

// Sign-preserving power-law compressed spectrum. Row-major T x F.
struct CompressedSpectrogram {
  int frames = 0;
  int bins = 0;
  std::vector<double> real;
  std::vector<double> imag;
  double alpha = 1.0;
  StftConfig config;
};

struct MagPhase {
  int frames = 0;
  int bins = 0;
  std::vector<double> mag;
  std::vector<double> phase;  // (-pi, pi]
};

struct ReorientConfig {
  int band_len = 40;        // L
  double overlap = 0.4;     // r
  int num_bands = 10;       // N

  // round(L * (1 - r)); 24 bins for the reference configuration.
  int stride() const;
  // Throws ConfigError if a sub-band would run past `bins`.
  void validate(int bins) const;
};

// T x L x N, element (t, k, i) at ((t * L) + k) * N + i: sub-band index is
// the fastest axis so the tensor is already channels-last for the encoders.
struct SubBandTensor {
  int frames = 0;
  int band_len = 0;
  int num_bands = 0;
  std::vector<double> data;

  double at(int t, int k, int i) const {
    return data[(static_cast<std::size_t>(t) * band_len + k) * num_bands + i];
  }
};

double compress_value(double v, double alpha);

CompressedSpectrogram power_law_compress(const ComplexSpectrogram& x, double alpha);

// Inverts power_law_compress with beta = 1 / alpha.
ComplexSpectrogram power_law_decompress(const CompressedSpectrogram& y);

MagPhase mag_phase(const CompressedSpectrogram& y);

// Gathers overlapping sub-bands of the magnitude along a channel axis. Bins
// past the last band (the Nyquist bin for the reference layout) are dropped.
SubBandTensor reorient(const MagPhase& m, const ReorientConfig& cfg = {});

// Splits the N == 10 sub-bands into the low five and the high five.
std::pair<SubBandTensor, SubBandTensor> split_bands(const SubBandTensor& c);

}  // namespace wnr
