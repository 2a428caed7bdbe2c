// Copyright 2026 The windnr Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "wnr/audio.hpp"

namespace wnr {

struct WindGenParams {
  std::uint64_t seed = 0;
  double duration_s = 3.0;
  // w[n] = e[n] + a1 w[n-1] + a2 w[n-2]; default is a double pole at 0.9.
  std::array<double, 2> ar_coeffs{1.8, -0.81};
  double gust_rate_hz = 0.5;
  double gust_depth = 0.8;
  // Upper edge of the band that must hold >= 99% of the energy.
  double hf_cutoff_hz = 4000.0;

  void validate() const;  // ParameterError
};

bool ar2_stable(double a1, double a2);

// Gust-modulated AR(2) noise, normalized to 0.1 RMS. GenerationError when
// more than 1% of the energy lies above hf_cutoff_hz.
AudioBuffer gen_wind(const WindGenParams& p);

// Fraction of STFT power in bins strictly above `cutoff_hz`.
double energy_fraction_above(const AudioBuffer& x, double cutoff_hz);

// Frame-energy coefficient of variation (std / mean over 32 ms frames).
double frame_energy_cv(const AudioBuffer& x);

// Stand-ins for the clean material: voiced speech-like babble (gliding f0,
// moving formants, syllabic envelope) and plucked harmonic note sequences.
enum class DesiredKind { kSpeechLike, kMusicLike };
AudioBuffer synth_desired(std::uint64_t seed, double duration_s, DesiredKind kind);

// Writes `count` float WAV files alternating speech- and music-like content.
std::vector<std::filesystem::path> write_desired_corpus(const std::filesystem::path& dir,
                                                        int count, double duration_s,
                                                        std::uint64_t seed);

struct ManifestEntry {
  std::string mixture;  // paths relative to the manifest directory
  std::string desired;
  std::string wind;
  double snr_db = 0.0;
  std::uint64_t seed = 0;
  std::string split = "train";
};

struct DatasetManifest {
  std::filesystem::path root;
  std::vector<ManifestEntry> entries;

  std::filesystem::path resolve(const std::string& rel) const { return root / rel; }
  std::vector<ManifestEntry> split(const std::string& name) const;
  void append(const DatasetManifest& other);

  // One JSON object per line.
  void write(const std::filesystem::path& path) const;
  static DatasetManifest read(const std::filesystem::path& path);  // IoError, DatasetError
};

struct DatasetOptions {
  std::string split = "train";
  double clip_seconds = 3.0;
  // Each triplet is scaled so the mixture peaks here.
  double peak = 0.9;
};

// Every corpus file at every SNR: the desired clip (cropped or zero-padded),
// fresh wind per entry, mixed at the exact SNR. Stems are stored on a 2^-23
// grid so mixture == desired + wind holds exactly after the float WAV round
// trip. Unreadable corpus files are skipped with a warning; DatasetError if
// nothing was produced.
DatasetManifest build_dataset(const std::vector<std::filesystem::path>& corpus,
                              const WindGenParams& gen, const std::vector<double>& snr_set,
                              const std::filesystem::path& out_dir,
                              const DatasetOptions& opts = {});

}  // namespace wnr
