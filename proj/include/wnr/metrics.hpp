// Copyright 2026 The windnr Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "wnr/audio.hpp"
#include "wnr/stft.hpp"

namespace wnr {

inline constexpr double kSiSdrCapDb = 100.0;
inline constexpr double kLeakageFloor = 1e-8;

// Scale-invariant SDR in dB, clamped to [-100, 100]. Both signals are made
// zero-mean first. UndefinedMetricError for a silent reference.
double si_sdr(std::span<const double> estimate, std::span<const double> reference);
double si_sdr(const AudioBuffer& estimate, const AudioBuffer& reference);

// -sqrt(mean((log10|D| - log10|W|)^2)) over all cells, magnitudes floored
// at kLeakageFloor. More negative means less wind left in D.
double leakage(const ComplexSpectrogram& d_hat, const ComplexSpectrogram& w);

// 10 log10(|desired|^2 / |wind|^2).
double snr_db(std::span<const double> desired, std::span<const double> wind);

struct Mixture {
  AudioBuffer mixture;
  AudioBuffer wind;  // the scaled wind actually contained in the mixture
};

// Scales `wind` so the pair sits at exactly `snr_db`.
Mixture mix_at_snr(const AudioBuffer& desired, const AudioBuffer& wind, double snr_db);

// Sample range compared during evaluation: the estimate at n + latency is
// paired with the reference at n, and the partially overlapped first and
// last hop of the reconstruction are excluded.
struct EvalWindow {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end > begin ? end - begin : 0; }
};
EvalWindow eval_window(std::size_t num_samples, std::size_t latency, const StftConfig& cfg = {});

struct FileScore {
  std::string name;
  double snr_db = 0.0;
  double si_sdr_in = 0.0;   // mixture vs desired
  double si_sdr_out = 0.0;  // estimate vs desired
  double leakage_in = 0.0;  // mixture vs wind
  double leakage_out = 0.0; // estimate vs wind
};

// `estimate` is the model output, delayed by `latency` samples relative to
// the stems.
FileScore score_file(const std::string& name, double snr_db, const AudioBuffer& mixture,
                     const AudioBuffer& desired, const AudioBuffer& wind,
                     const AudioBuffer& estimate, std::size_t latency);

struct EvalReport {
  std::vector<FileScore> files;

  double mean_si_sdr_in() const;
  double mean_si_sdr_out() const;
  double mean_leakage_in() const;
  double mean_leakage_out() const;
  // Aggregates, then one "file.<i>.<field>=value" block per file.
  std::string to_text() const;
  std::string to_json() const;
};

}  // namespace wnr
