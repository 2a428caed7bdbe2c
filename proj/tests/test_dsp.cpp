// Copyright 2026 The windnr Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "wnr/audio.hpp"
#include "wnr/errors.hpp"
#include "wnr/features.hpp"
#include "wnr/stft.hpp"

using namespace wnr;

namespace {

AudioBuffer noise(std::size_t n, std::uint64_t seed, double sd = 0.1) {
  AudioBuffer x;
  x.samples = oracle::randn(n, seed, sd);
  return x;
}

ComplexSpectrogram random_spec(int t, int f, std::uint64_t seed, double sd = 1.0) {
  ComplexSpectrogram s(t, f);
  const auto v = oracle::randn(static_cast<std::size_t>(2 * t * f), seed, sd);
  for (std::size_t i = 0; i < s.data.size(); ++i) s.data[i] = {v[2 * i], v[2 * i + 1]};
  return s;
}

}  // namespace

TEST_SUITE("stft") {
  TEST_CASE("512 zero samples give one all-zero frame") {
    AudioBuffer x;
    x.samples.assign(512, 0.0);
    const auto s = stft(x);
    CHECK(s.frames == 1);
    CHECK(s.bins == 257);
    for (const auto& c : s.data) CHECK(std::abs(c) == 0.0);
  }

  TEST_CASE("one second gives 61 frames") {
    CHECK(stft(noise(16000, 1)).frames == 61);
    CHECK(num_frames(16000, {}) == 61);
    CHECK(num_frames(511, {}) == 0);
    CHECK(num_frames(768, {}) == 2);
  }

  TEST_CASE("1 kHz sine peaks at bin 32") {
    AudioBuffer x;
    for (int n = 0; n < 16000; ++n) x.samples.push_back(std::sin(2 * std::numbers::pi * 1000 * n / 16000.0));
    const auto s = stft(x);
    for (int t = 0; t < s.frames; ++t) {
      int best = 0;
      for (int f = 1; f < s.bins; ++f) {
        if (std::abs(s.at(t, f)) > std::abs(s.at(t, best))) best = f;
      }
      CHECK(best == 32);
    }
  }

  TEST_CASE("frames match a direct windowed DFT") {
    const auto x = noise(1280, 2);
    const auto s = stft(x);
    REQUIRE(s.frames == 4);
    for (int t = 0; t < s.frames; ++t) {
      const auto ref = oracle::dft_frame(x.samples.data() + t * 256, 512);
      for (int f = 0; f < 257; ++f) CHECK(std::abs(s.at(t, f) - ref[f]) < 1e-10);
    }
  }

  TEST_CASE("input errors") {
    CHECK_THROWS_AS(stft(AudioBuffer{}), EmptyInputError);
    auto x = noise(1024, 3);
    x.sample_rate_hz = 44100;
    CHECK_THROWS_AS(stft(x), ConfigError);
    x.sample_rate_hz = 16000;
    x.samples[5] = std::nan("");
    CHECK_THROWS_AS(stft(x), ParameterError);
    StftConfig bad;
    bad.hop = 128;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
  }

  TEST_CASE("frame t ignores samples after t*hop + win_len - 1") {
    const auto x = noise(4096, 4);
    const auto a = stft(x);
    for (int t = 0; t < 10; ++t) {
      auto y = x;
      for (std::size_t n = static_cast<std::size_t>(t) * 256 + 512; n < y.size(); ++n) y.samples[n] += 1.0;
      const auto b = stft(y);
      for (int u = 0; u <= t; ++u) {
        for (int f = 0; f < 257; ++f) REQUIRE(a.at(u, f) == b.at(u, f));
      }
      CHECK(a.at(t + 1, 5) != b.at(t + 1, 5));
    }
  }
}

TEST_SUITE("istft") {
  TEST_CASE("zero spectrogram gives zero audio") {
    ComplexSpectrogram s(5, 257);
    const auto y = istft(s);
    CHECK(y.size() == 4 * 256 + 512);
    for (double v : y.samples) CHECK(v == 0.0);
  }

  TEST_CASE("single frame is the doubly windowed frame") {
    const auto x = noise(512, 5);
    const auto y = istft(stft(x));
    REQUIRE(y.size() == 512);
    FrameTransform ft;
    for (int n = 0; n < 512; ++n) {
      CHECK(y.samples[n] == doctest::Approx(x.samples[n] * ft.analysis_window()[n] *
                                            ft.synthesis_window()[n]).epsilon(1e-9));
    }
  }

  TEST_CASE("synthesis window makes the squared-window overlap sum one") {
    FrameTransform ft;
    for (int n = 0; n < 256; ++n) {
      const double a = ft.analysis_window()[n] * ft.synthesis_window()[n] +
                       ft.analysis_window()[n + 256] * ft.synthesis_window()[n + 256];
      CHECK(a == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  TEST_CASE("interior round trip above 60 dB for 100 random signals") {
    double worst = 1e9;
    for (int i = 0; i < 100; ++i) {
      const std::size_t n = 2048 + static_cast<std::size_t>(i) * 97;
      const auto x = noise(n, 100 + i, 0.01 + 0.01 * i);
      const auto y = istft(stft(x));
      worst = std::min(worst, oracle::snr_db(x.samples, y.samples, 512, y.size() - 512));
    }
    MESSAGE("worst interior SNR " << worst << " dB");
    CHECK(worst >= 60.0);
  }
}

TEST_SUITE("power law") {
  TEST_CASE("examples") {
    ComplexSpectrogram s(1, 2);
    s.at(0, 0) = {0, 0};
    s.at(0, 1) = {-4, 9};
    auto c = power_law_compress(s, 0.5);
    CHECK(c.real[0] == 0.0);
    CHECK(c.imag[0] == 0.0);
    CHECK(c.real[1] == doctest::Approx(-2.0).epsilon(1e-15));
    CHECK(c.imag[1] == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(power_law_compress(s, 0.3).real[0] == 0.0);

    CompressedSpectrogram y;
    y.frames = 1;
    y.bins = 1;
    y.real = {-2};
    y.imag = {3};
    y.alpha = 0.5;
    const auto d = power_law_decompress(y);
    CHECK(d.at(0, 0).real() == doctest::Approx(-4.0).epsilon(1e-15));
    CHECK(d.at(0, 0).imag() == doctest::Approx(9.0).epsilon(1e-15));
  }

  TEST_CASE("alpha one is the identity in both directions") {
    const auto s = random_spec(7, 257, 6);
    const auto c = power_law_compress(s, 1.0);
    for (std::size_t i = 0; i < s.data.size(); ++i) {
      CHECK(c.real[i] == s.data[i].real());
      CHECK(c.imag[i] == s.data[i].imag());
    }
    const auto d = power_law_decompress(c);
    for (std::size_t i = 0; i < s.data.size(); ++i) CHECK(d.data[i] == s.data[i]);
  }

  TEST_CASE("round trip within 1e-6 relative and signs preserved") {
    for (double alpha : {0.3, 0.5, 1.0}) {
      const auto s = random_spec(20, 257, 7, 3.0);
      const auto c = power_law_compress(s, alpha);
      const auto d = power_law_decompress(c);
      double worst = 0.0;
      for (std::size_t i = 0; i < s.data.size(); ++i) {
        CHECK(std::signbit(c.real[i]) == std::signbit(s.data[i].real()));
        CHECK(std::signbit(c.imag[i]) == std::signbit(s.data[i].imag()));
        worst = std::max({worst, oracle::rel_err(d.data[i].real(), s.data[i].real()),
                          oracle::rel_err(d.data[i].imag(), s.data[i].imag())});
      }
      CHECK(worst <= 1e-6);
    }
  }

  TEST_CASE("compression is monotone in magnitude") {
    for (double alpha : {0.3, 0.7}) {
      double prev = -1.0;
      for (int i = 0; i <= 1000; ++i) {
        const double v = std::abs(compress_value(i * 0.013, alpha));
        CHECK(v >= prev);
        prev = v;
      }
    }
  }

  TEST_CASE("alpha out of range") {
    const auto s = random_spec(1, 4, 8);
    CHECK_THROWS_AS(power_law_compress(s, 0.0), ParameterError);
    CHECK_THROWS_AS(power_law_compress(s, 1.5), ParameterError);
    CHECK_THROWS_AS(power_law_compress(s, std::nan("")), ParameterError);
    auto c = power_law_compress(s, 0.5);
    c.alpha = -1;
    CHECK_THROWS_AS(power_law_decompress(c), ParameterError);
  }
}

TEST_SUITE("mag_phase") {
  TEST_CASE("examples") {
    CompressedSpectrogram y;
    y.frames = 1;
    y.bins = 4;
    y.real = {0, 3, -1, -1};
    y.imag = {0, 4, 0, -0.0};
    const auto m = mag_phase(y);
    CHECK(m.mag[0] == 0.0);
    CHECK(m.phase[0] == 0.0);
    CHECK(m.mag[1] == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(m.phase[1] == doctest::Approx(0.9272952180016122).epsilon(1e-14));
    CHECK(m.mag[2] == 1.0);
    CHECK(m.phase[2] == doctest::Approx(std::numbers::pi).epsilon(1e-15));
    CHECK(m.phase[3] == doctest::Approx(std::numbers::pi).epsilon(1e-15));
  }

  TEST_CASE("polar form reconstructs the compressed spectrum") {
    const auto c = power_law_compress(random_spec(10, 257, 9), 0.3);
    const auto m = mag_phase(c);
    for (std::size_t i = 0; i < c.real.size(); ++i) {
      CHECK(m.mag[i] >= 0.0);
      CHECK(m.phase[i] > -std::numbers::pi);
      CHECK(m.phase[i] <= std::numbers::pi);
      const std::complex<double> z = std::polar(m.mag[i], m.phase[i]);
      const std::complex<double> ref(c.real[i], c.imag[i]);
      CHECK(std::abs(z - ref) <= 1e-6 * std::abs(ref));
    }
  }
}

TEST_SUITE("reorient") {
  MagPhase ramp(int frames) {
    MagPhase m;
    m.frames = frames;
    m.bins = 257;
    for (int t = 0; t < frames; ++t)
      for (int f = 0; f < 257; ++f) m.mag.push_back(f + 1000.0 * t);
    m.phase.assign(m.mag.size(), 0.0);
    return m;
  }

  TEST_CASE("ramp lands at 24 i + k") {
    ReorientConfig cfg;
    CHECK(cfg.stride() == 24);
    const auto c = reorient(ramp(3));
    CHECK(c.frames == 3);
    CHECK(c.band_len == 40);
    CHECK(c.num_bands == 10);
    for (int t = 0; t < 3; ++t)
      for (int k = 0; k < 40; ++k)
        for (int i = 0; i < 10; ++i) CHECK(c.at(t, k, i) == 24 * i + k + 1000.0 * t);
  }

  TEST_CASE("band 0 and the stride overlap") {
    const auto m = ramp(2);
    const auto c = reorient(m);
    for (int t = 0; t < 2; ++t) {
      for (int k = 0; k < 40; ++k) CHECK(c.at(t, k, 0) == m.mag[t * 257 + k]);
      for (int i = 0; i < 9; ++i)
        for (int k = 24; k < 40; ++k) CHECK(c.at(t, k, i) == c.at(t, k - 24, i + 1));
    }
  }

  TEST_CASE("bins past the last band are dropped") {
    const auto c = reorient(ramp(1));
    double top = 0;
    for (double v : c.data) top = std::max(top, v);
    CHECK(top == 255.0);
  }

  TEST_CASE("too few bins") {
    MagPhase m;
    m.frames = 1;
    m.bins = 200;
    m.mag.assign(200, 0.0);
    m.phase.assign(200, 0.0);
    CHECK_THROWS_AS(reorient(m), ConfigError);
  }

  TEST_CASE("split into low and high halves") {
    const auto c = reorient(ramp(4));
    const auto [low, high] = split_bands(c);
    CHECK(low.frames == 4);
    CHECK(low.band_len == 40);
    CHECK(low.num_bands == 5);
    CHECK(high.num_bands == 5);
    CHECK(low.at(0, 0, 4) == 96.0);
    CHECK(low.at(0, 39, 4) == 135.0);
    CHECK(135 * 31.25 == doctest::Approx(4218.75));
    for (int t = 0; t < 4; ++t)
      for (int k = 0; k < 40; ++k)
        for (int i = 0; i < 10; ++i) {
          CHECK(c.at(t, k, i) == (i < 5 ? low.at(t, k, i) : high.at(t, k, i - 5)));
        }
    SubBandTensor bad = c;
    bad.num_bands = 8;
    bad.data.resize(4 * 40 * 8);
    CHECK_THROWS_AS(split_bands(bad), ConfigError);
  }
}

TEST_SUITE("wav") {
  TEST_CASE("float32 round trip is exact for float values") {
    AudioBuffer x;
    for (double v : oracle::randn(777, 10, 0.3)) x.samples.push_back(static_cast<float>(v));
    const auto y = decode_wav(encode_wav(x, SampleFormat::kFloat32));
    CHECK(y.sample_rate_hz == 16000);
    REQUIRE(y.size() == x.size());
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(y.samples[i] == x.samples[i]);
  }

  TEST_CASE("pcm16 scales by 32768 and saturates") {
    AudioBuffer x;
    x.samples = {0.0, 0.5, -0.5, -1.0, 1.0, 2.0, 100.0 / 32768.0};
    const auto y = decode_wav(encode_wav(x, SampleFormat::kPcm16));
    REQUIRE(y.size() == x.size());
    CHECK(y.samples[0] == 0.0);
    CHECK(y.samples[1] == 0.5);
    CHECK(y.samples[2] == -0.5);
    CHECK(y.samples[3] == -1.0);
    CHECK(y.samples[4] == 32767.0 / 32768.0);
    CHECK(y.samples[5] == 32767.0 / 32768.0);
    CHECK(y.samples[6] == 100.0 / 32768.0);
  }

  TEST_CASE("hand-built pcm16 file decodes") {
    const std::vector<std::uint8_t> payload{0x00, 0x40, 0x00, 0xC0};
    const auto y = decode_wav(oracle::wav_bytes(1, 1, 16000, 16, payload));
    REQUIRE(y.size() == 2);
    CHECK(y.samples[0] == 0.5);
    CHECK(y.samples[1] == -0.5);
  }

  TEST_CASE("unsupported layouts are explicit errors") {
    const std::vector<std::uint8_t> payload(64, 0);
    CHECK_THROWS_AS(decode_wav(oracle::wav_bytes(1, 2, 16000, 16, payload)), UnsupportedFormatError);
    CHECK_THROWS_AS(decode_wav(oracle::wav_bytes(1, 1, 44100, 16, payload)), UnsupportedFormatError);
    CHECK_THROWS_AS(decode_wav(oracle::wav_bytes(1, 1, 16000, 24, std::vector<std::uint8_t>(63, 0))),
                    UnsupportedFormatError);
    CHECK_THROWS_AS(decode_wav(oracle::wav_bytes(3, 1, 16000, 64, payload)), UnsupportedFormatError);
  }

  TEST_CASE("malformed containers are corrupt-file errors") {
    auto b = oracle::wav_bytes(1, 1, 16000, 16, std::vector<std::uint8_t>(100, 0));
    for (std::size_t cut : {std::size_t{0}, std::size_t{10}, std::size_t{30}, b.size() - 50}) {
      std::vector<std::uint8_t> t(b.begin(), b.begin() + static_cast<std::ptrdiff_t>(cut));
      CHECK_THROWS_AS(decode_wav(t), CorruptFileError);
    }
    auto bad = b;
    bad[0] = 'X';
    CHECK_THROWS_AS(decode_wav(bad), CorruptFileError);
  }

  TEST_CASE("file round trip and missing files") {
    const auto path = std::filesystem::temp_directory_path() / "wnr_test_dsp.wav";
    AudioBuffer x;
    x.samples = {0.25, -0.125, 0.0625};
    write_wav(path, x);
    CHECK(read_wav(path).samples == x.samples);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(read_wav(path), IoError);
  }

  TEST_CASE("pipeline audio checks") {
    AudioBuffer x;
    x.samples = {0.1, 0.2};
    CHECK_NOTHROW(require_pipeline_audio(x));
    x.samples[1] = INFINITY;
    CHECK_THROWS_AS(require_pipeline_audio(x), ParameterError);
    x.samples[1] = 0.0;
    x.sample_rate_hz = 8000;
    CHECK_THROWS_AS(require_pipeline_audio(x), ConfigError);
  }
}
