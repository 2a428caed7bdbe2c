// Copyright 2026 The windnr Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace wnr {

inline constexpr int kSampleRateHz = 16000;

// Mono time-domain signal. Nominal amplitude range is [-1, 1].
struct AudioBuffer {
  std::vector<double> samples;
  int sample_rate_hz = kSampleRateHz;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }
};

// Throws ConfigError on a rate other than 16 kHz, ParameterError on NaN/Inf.
void require_pipeline_audio(const AudioBuffer& audio);

enum class SampleFormat { kPcm16, kFloat32 };

// Reads RIFF/WAVE mono 16 kHz PCM16 or IEEE float32. Anything else raises
// UnsupportedFormatError; a malformed container raises CorruptFileError.
AudioBuffer read_wav(const std::filesystem::path& path);

// PCM16 samples are scaled by 32768 and saturated.
void write_wav(const std::filesystem::path& path, const AudioBuffer& audio,
               SampleFormat format = SampleFormat::kFloat32);

AudioBuffer decode_wav(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> encode_wav(const AudioBuffer& audio,
                                     SampleFormat format);

}  // namespace wnr
