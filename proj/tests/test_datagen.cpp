// Copyright 2026 The windnr Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <cmath>
#include <fstream>

#include "doctest.h"
#include "wnr/datagen.hpp"
#include "wnr/errors.hpp"
#include "wnr/metrics.hpp"

using namespace wnr;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("wnr_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::vector<std::uint8_t> file_bytes(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

double rms(const AudioBuffer& x) {
  double s = 0;
  for (double v : x.samples) s += v * v;
  return std::sqrt(s / static_cast<double>(x.size()));
}

// Fraction of STFT power in bins above `cutoff_hz`, summed directly.
double hf_fraction(const AudioBuffer& x, double cutoff_hz) {
  const auto s = stft(x);
  double hi = 0, all = 0;
  for (int t = 0; t < s.frames; ++t)
    for (int f = 0; f < s.bins; ++f) {
      const double p = std::norm(s.at(t, f));
      all += p;
      if (f * 31.25 > cutoff_hz) hi += p;
    }
  return hi / all;
}

}  // namespace

TEST_SUITE("wind") {
  TEST_CASE("AR(2) stability") {
    CHECK(ar2_stable(1.8, -0.81));
    CHECK(ar2_stable(0.0, 0.0));
    CHECK_FALSE(ar2_stable(1.0, 0.5));
    CHECK_FALSE(ar2_stable(0.0, -1.0));
    CHECK_FALSE(ar2_stable(2.0, -1.0));
  }

  TEST_CASE("seeded determinism") {
    WindGenParams p;
    p.seed = 3;
    p.duration_s = 2.0;
    const auto a = gen_wind(p), b = gen_wind(p);
    CHECK(a.samples == b.samples);
    CHECK(a.size() == 32000);
    p.seed = 4;
    CHECK(gen_wind(p).samples != a.samples);
  }

  TEST_CASE("default ten seconds keeps at most 1% of energy above 4 kHz") {
    for (std::uint64_t seed : {0, 1, 2}) {
      WindGenParams p;
      p.seed = seed;
      p.duration_s = 10.0;
      const auto w = gen_wind(p);
      const double frac = hf_fraction(w, 4000.0);
      MESSAGE("seed " << seed << " fraction above 4 kHz " << frac);
      CHECK(frac <= 0.01);
      CHECK(energy_fraction_above(w, 4000.0) == doctest::Approx(frac).epsilon(1e-6));
      CHECK(rms(w) == doctest::Approx(0.1).epsilon(1e-9));
    }
  }

  TEST_CASE("gusts raise the frame-energy spread") {
    WindGenParams p;
    p.seed = 7;
    p.duration_s = 10.0;
    p.gust_depth = 0.0;
    const double steady = frame_energy_cv(gen_wind(p));
    p.gust_depth = 0.8;
    const double gusty = frame_energy_cv(gen_wind(p));
    MESSAGE("cv steady " << steady << " gusty " << gusty);
    CHECK(steady < gusty);
  }

  TEST_CASE("parameter and spectral errors") {
    WindGenParams p;
    p.ar_coeffs = {1.0, 0.5};
    CHECK_THROWS_AS(gen_wind(p), ParameterError);
    p = WindGenParams{};
    p.gust_depth = 1.5;
    CHECK_THROWS_AS(gen_wind(p), ParameterError);
    p = WindGenParams{};
    p.duration_s = 0.0;
    CHECK_THROWS_AS(gen_wind(p), ParameterError);
    p = WindGenParams{};
    p.ar_coeffs = {0.0, 0.0};  // white: half the energy is above 4 kHz
    CHECK_THROWS_AS(gen_wind(p), GenerationError);
  }
}

TEST_SUITE("dataset") {
  TEST_CASE("cartesian count, exact SNRs and additivity") {
    const auto dir = fresh_dir("dataset");
    const auto corpus = write_desired_corpus(dir / "corpus", 10, 3.5, 1);
    CHECK(corpus.size() == 10);
    WindGenParams g;
    g.seed = 2;
    const std::vector<double> snrs{-20, -10, 0, 10, 20};
    const auto m = build_dataset(corpus, g, snrs, dir / "data");
    REQUIRE(m.entries.size() == 50);
    for (const auto& e : m.entries) {
      const auto x = read_wav(m.resolve(e.mixture));
      const auto d = read_wav(m.resolve(e.desired));
      const auto w = read_wav(m.resolve(e.wind));
      REQUIRE(x.size() == 48000);
      REQUIRE(d.size() == 48000);
      REQUIRE(w.size() == 48000);
      CHECK(std::abs(snr_db(d.samples, w.samples) - e.snr_db) <= 1e-6);
      for (std::size_t i = 0; i < x.size(); ++i) REQUIRE(x.samples[i] - w.samples[i] == d.samples[i]);
      double peak = 0;
      for (double v : x.samples) peak = std::max(peak, std::abs(v));
      CHECK(peak <= 0.9 + 1e-6);
    }
    int at_zero = 0;
    for (const auto& e : m.entries) at_zero += e.snr_db == 0.0;
    CHECK(at_zero == 10);
  }

  TEST_CASE("same seed and corpus give identical manifests and audio") {
    const auto dir = fresh_dir("determinism");
    const auto corpus = write_desired_corpus(dir / "corpus", 3, 3.0, 5);
    WindGenParams g;
    g.seed = 6;
    const auto a = build_dataset(corpus, g, {0, 5}, dir / "a");
    const auto b = build_dataset(corpus, g, {0, 5}, dir / "b");
    a.write(dir / "a.jsonl");
    b.write(dir / "b.jsonl");
    REQUIRE(a.entries.size() == b.entries.size());
    for (std::size_t i = 0; i < a.entries.size(); ++i) {
      CHECK(a.entries[i].seed == b.entries[i].seed);
      CHECK(file_bytes(a.resolve(a.entries[i].mixture)) == file_bytes(b.resolve(b.entries[i].mixture)));
      CHECK(file_bytes(a.resolve(a.entries[i].wind)) == file_bytes(b.resolve(b.entries[i].wind)));
    }
  }

  TEST_CASE("short files are zero-padded, unreadable files skipped") {
    const auto dir = fresh_dir("padding");
    AudioBuffer shortclip = synth_desired(8, 1.0, DesiredKind::kMusicLike);
    write_wav(dir / "short.wav", shortclip);
    std::ofstream(dir / "junk.wav") << "not a wav file";
    WindGenParams g;
    g.seed = 9;
    const auto m = build_dataset({dir / "short.wav", dir / "junk.wav", dir / "missing.wav"}, g, {0},
                                 dir / "data");
    REQUIRE(m.entries.size() == 1);
    const auto d = read_wav(m.resolve(m.entries[0].desired));
    REQUIRE(d.size() == 48000);
    for (std::size_t i = 16000; i < d.size(); ++i) REQUIRE(d.samples[i] == 0.0);
    CHECK_THROWS_AS(build_dataset({dir / "junk.wav"}, g, {0}, dir / "data2"), DatasetError);
    CHECK_THROWS_AS(build_dataset({}, g, {0}, dir / "data3"), DatasetError);
  }

  TEST_CASE("manifest round trip and splits") {
    const auto dir = fresh_dir("manifest");
    DatasetManifest m;
    m.root = dir;
    m.entries.push_back({"a_mix.wav", "a_d.wav", "a_w.wav", -5.0, 123, "train"});
    m.entries.push_back({"b_mix.wav", "b_d.wav", "b_w.wav", 10.0, 456, "test"});
    m.write(dir / "m.jsonl");
    const auto r = DatasetManifest::read(dir / "m.jsonl");
    REQUIRE(r.entries.size() == 2);
    CHECK(r.entries[1].mixture == "b_mix.wav");
    CHECK(r.entries[1].snr_db == 10.0);
    CHECK(r.entries[1].seed == 456);
    CHECK(r.split("test").size() == 1);
    CHECK(r.split("val").empty());
    CHECK(r.resolve("x.wav") == dir / "x.wav");
    CHECK_THROWS_AS(DatasetManifest::read(dir / "nope.jsonl"), IoError);
    std::ofstream(dir / "bad.jsonl") << "{\"mixture\": 3}\n";
    CHECK_THROWS_AS(DatasetManifest::read(dir / "bad.jsonl"), DatasetError);
  }

  TEST_CASE("synthetic desired signals") {
    const auto a = synth_desired(1, 2.0, DesiredKind::kSpeechLike);
    CHECK(a.size() == 32000);
    CHECK(a.samples == synth_desired(1, 2.0, DesiredKind::kSpeechLike).samples);
    CHECK(a.samples != synth_desired(2, 2.0, DesiredKind::kSpeechLike).samples);
    CHECK(rms(a) > 0.0);
    CHECK(rms(synth_desired(1, 2.0, DesiredKind::kMusicLike)) > 0.0);
  }
}
