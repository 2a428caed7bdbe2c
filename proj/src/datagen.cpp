// Copyright 2026 The windnr Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "wnr/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <numbers>
#include <random>

#include "json.hpp"
#include "wnr/errors.hpp"
#include "wnr/metrics.hpp"
#include "wnr/stft.hpp"

namespace wnr {
namespace {

constexpr double kFs = kSampleRateHz;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::size_t samples_for(double seconds) {
  return static_cast<std::size_t>(std::llround(seconds * kFs));
}

void normalize_rms(std::vector<double>& x, double target) {
  double e = 0.0;
  for (double v : x) e += v * v;
  if (e == 0.0) return;
  const double g = target / std::sqrt(e / static_cast<double>(x.size()));
  for (double& v : x) v *= g;
}

// Smooth random curve in [-1, 1] through knots spaced `spacing` samples
// apart, cosine-interpolated.
std::vector<double> slow_curve(std::size_t n, double spacing, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::size_t knots = static_cast<std::size_t>(std::ceil(n / spacing)) + 2;
  std::vector<double> k(knots);
  for (double& v : k) v = u(rng);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double pos = i / spacing;
    const auto j = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(j);
    const double w = 0.5 - 0.5 * std::cos(std::numbers::pi * frac);
    out[i] = k[j] * (1.0 - w) + k[j + 1] * w;
  }
  return out;
}

double quantize(double v) {
  constexpr double kGrid = 8388608.0;  // 2^23
  return std::nearbyint(v * kGrid) / kGrid;
}

AudioBuffer synth_speech_like(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto range = [&](double lo, double hi) { return lo + (hi - lo) * u(rng); };
  const double base_f0 = range(95.0, 230.0);
  std::vector<double> out(n, 0.0);
  double phase = 0.0;
  std::size_t pos = 0;
  std::normal_distribution<double> gauss(0.0, 1.0);
  while (pos < n) {
    const auto len = std::min(n - pos, samples_for(range(0.12, 0.35)));
    if (u(rng) < 0.15) {  // short pause
      pos += std::min(n - pos, samples_for(range(0.05, 0.15)));
      continue;
    }
    const double f0a = base_f0 * range(0.8, 1.25), f0b = base_f0 * range(0.8, 1.25);
    const double amp = range(0.5, 1.0);
    if (u(rng) < 0.15) {  // fricative: differenced noise burst
      double prev = 0.0;
      for (std::size_t i = 0; i < len; ++i) {
        const double env = std::sin(std::numbers::pi * (i + 0.5) / len);
        const double e = gauss(rng);
        out[pos + i] += 0.15 * amp * env * env * (e - prev);
        prev = e;
      }
      pos += len;
      continue;
    }
    std::array<double, 3> fa{range(300, 850), range(900, 2300), range(2300, 3400)};
    std::array<double, 3> fb{range(300, 850), range(900, 2300), range(2300, 3400)};
    constexpr std::array<double, 3> kBw{110.0, 160.0, 250.0};
    constexpr std::array<double, 3> kGain{1.0, 0.6, 0.3};
    std::vector<double> harm;
    for (std::size_t i = 0; i < len; ++i) {
      const double t = (i + 0.5) / len;
      const double f0 = f0a + (f0b - f0a) * t;
      phase = std::fmod(phase + kTwoPi * f0 / kFs, kTwoPi);
      if (i % 32 == 0) {
        const int count = static_cast<int>(7800.0 / f0);
        harm.assign(count, 0.0);
        for (int k = 1; k <= count; ++k) {
          const double f = k * f0;
          double a = 0.02 / k;
          for (int m = 0; m < 3; ++m) {
            const double fm = fa[m] + (fb[m] - fa[m]) * t;
            const double d = (f - fm) / kBw[m];
            a += kGain[m] * std::exp(-0.5 * d * d);
          }
          harm[k - 1] = a;
        }
      }
      double s = 0.0;
      for (std::size_t k = 0; k < harm.size(); ++k) s += harm[k] * std::sin((k + 1) * phase);
      const double env = std::sin(std::numbers::pi * t);
      out[pos + i] += amp * env * s;
    }
    pos += len;
  }
  normalize_rms(out, 0.1);
  AudioBuffer a;
  a.samples = std::move(out);
  return a;
}

AudioBuffer synth_music_like(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto range = [&](double lo, double hi) { return lo + (hi - lo) * u(rng); };
  constexpr std::array<int, 7> kScale{0, 2, 4, 5, 7, 9, 11};
  const int root = 45 + static_cast<int>(u(rng) * 12);
  const double brightness = range(0.8, 1.6);
  std::vector<double> out(n, 0.0);
  std::size_t pos = 0;
  while (pos < n) {
    const std::size_t len = samples_for(range(0.2, 0.6));
    const std::size_t ring = std::min(n - pos, len + samples_for(0.25));
    const int voices = 1 + static_cast<int>(u(rng) * 3);
    for (int v = 0; v < voices; ++v) {
      const int degree = static_cast<int>(u(rng) * 14);
      const int midi = root + 12 * (degree / 7) + kScale[degree % 7];
      const double f0 = 440.0 * std::pow(2.0, (midi - 69) / 12.0);
      const double amp = range(0.4, 1.0);
      const double tau = range(0.15, 0.5) * kFs;
      const int count = std::min(16, static_cast<int>(7800.0 / f0));
      const double p0 = range(0.0, kTwoPi);
      for (std::size_t i = 0; i < ring; ++i) {
        const double attack = std::min(1.0, i / (0.01 * kFs));
        const double env = amp * attack * std::exp(-static_cast<double>(i) / tau);
        const double ph = p0 + kTwoPi * f0 * i / kFs;
        double s = 0.0;
        for (int k = 1; k <= count; ++k) s += std::sin(k * ph) / std::pow(k, brightness);
        out[pos + i] += env * s;
      }
    }
    pos += std::min(n - pos, len);
  }
  normalize_rms(out, 0.1);
  AudioBuffer a;
  a.samples = std::move(out);
  return a;
}

double clip_energy(const std::vector<double>& x) {
  double e = 0.0;
  for (double v : x) e += v * v;
  return e;
}

}  // namespace

bool ar2_stable(double a1, double a2) {
  // Roots of z^2 - a1 z - a2 inside the unit circle (stability triangle).
  return std::abs(a2) < 1.0 && a1 + a2 < 1.0 && a2 - a1 < 1.0;
}

void WindGenParams::validate() const {
  if (!ar2_stable(ar_coeffs[0], ar_coeffs[1])) {
    throw ParameterError("wind: AR(2) coefficients (" + std::to_string(ar_coeffs[0]) + ", " +
                         std::to_string(ar_coeffs[1]) + ") are unstable");
  }
  if (!(duration_s > 0.0)) throw ParameterError("wind: duration must be positive");
  if (!(gust_rate_hz > 0.0)) throw ParameterError("wind: gust rate must be positive");
  if (!(gust_depth >= 0.0 && gust_depth <= 1.0)) {
    throw ParameterError("wind: gust depth must lie in [0, 1]");
  }
  if (!(hf_cutoff_hz > 0.0 && hf_cutoff_hz < kFs / 2)) {
    throw ParameterError("wind: cutoff must lie in (0, 8000) Hz");
  }
}

AudioBuffer gen_wind(const WindGenParams& p) {
  p.validate();
  const std::size_t n = samples_for(p.duration_s);
  constexpr std::size_t kWarmup = 4096;
  std::mt19937_64 rng(p.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> ar(n);
  double y1 = 0.0, y2 = 0.0;
  for (std::size_t i = 0; i < n + kWarmup; ++i) {
    const double y = gauss(rng) + p.ar_coeffs[0] * y1 + p.ar_coeffs[1] * y2;
    y2 = y1;
    y1 = y;
    if (i >= kWarmup) ar[i - kWarmup] = y;
  }
  const std::vector<double> slow = slow_curve(n, kFs / p.gust_rate_hz, rng);
  for (std::size_t i = 0; i < n; ++i) {
    ar[i] *= 1.0 - p.gust_depth * (0.5 + 0.5 * slow[i]);
  }
  normalize_rms(ar, 0.1);
  AudioBuffer out;
  out.samples = std::move(ar);
  if (n >= static_cast<std::size_t>(StftConfig{}.win_len)) {
    const double hf = energy_fraction_above(out, p.hf_cutoff_hz);
    if (hf > 0.01) {
      throw GenerationError("wind: " + std::to_string(100.0 * hf) + "% of the energy lies above " +
                            std::to_string(p.hf_cutoff_hz) + " Hz (limit 1%)");
    }
  }
  return out;
}

double energy_fraction_above(const AudioBuffer& x, double cutoff_hz) {
  const StftConfig cfg;
  const ComplexSpectrogram s = stft(x, cfg);
  if (s.frames == 0) throw ParameterError("energy_fraction_above: signal shorter than one frame");
  double total = 0.0, above = 0.0;
  for (int t = 0; t < s.frames; ++t) {
    for (int f = 0; f < s.bins; ++f) {
      const double p = std::norm(s.at(t, f));
      total += p;
      if (f * kFs / cfg.fft_len > cutoff_hz) above += p;
    }
  }
  return total > 0.0 ? above / total : 0.0;
}

double frame_energy_cv(const AudioBuffer& x) {
  constexpr std::size_t kFrame = 512;
  std::vector<double> e;
  for (std::size_t i = 0; i + kFrame <= x.size(); i += kFrame) {
    double s = 0.0;
    for (std::size_t j = 0; j < kFrame; ++j) s += x.samples[i + j] * x.samples[i + j];
    e.push_back(s);
  }
  if (e.size() < 2) throw ParameterError("frame_energy_cv: need at least two frames");
  double mean = 0.0;
  for (double v : e) mean += v;
  mean /= static_cast<double>(e.size());
  double var = 0.0;
  for (double v : e) var += (v - mean) * (v - mean);
  var /= static_cast<double>(e.size());
  return mean > 0.0 ? std::sqrt(var) / mean : 0.0;
}

AudioBuffer synth_desired(std::uint64_t seed, double duration_s, DesiredKind kind) {
  if (!(duration_s > 0.0)) throw ParameterError("synth_desired: duration must be positive");
  std::mt19937_64 rng(seed);
  const std::size_t n = samples_for(duration_s);
  return kind == DesiredKind::kSpeechLike ? synth_speech_like(rng, n) : synth_music_like(rng, n);
}

std::vector<std::filesystem::path> write_desired_corpus(const std::filesystem::path& dir,
                                                        int count, double duration_s,
                                                        std::uint64_t seed) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> paths;
  for (int i = 0; i < count; ++i) {
    const DesiredKind kind = i % 2 == 0 ? DesiredKind::kSpeechLike : DesiredKind::kMusicLike;
    char name[64];
    std::snprintf(name, sizeof(name), "%s_%04d.wav",
                  kind == DesiredKind::kSpeechLike ? "speech" : "music", i);
    const auto path = dir / name;
    write_wav(path, synth_desired(splitmix64(seed + static_cast<std::uint64_t>(i)), duration_s,
                                  kind));
    paths.push_back(path);
  }
  return paths;
}

std::vector<ManifestEntry> DatasetManifest::split(const std::string& name) const {
  std::vector<ManifestEntry> out;
  std::copy_if(entries.begin(), entries.end(), std::back_inserter(out),
               [&](const ManifestEntry& e) { return e.split == name; });
  return out;
}

void DatasetManifest::append(const DatasetManifest& other) {
  for (const auto& e : other.entries) {
    ManifestEntry c = e;
    if (other.root != root) {
      c.mixture = std::filesystem::relative(other.resolve(e.mixture), root).string();
      c.desired = std::filesystem::relative(other.resolve(e.desired), root).string();
      c.wind = std::filesystem::relative(other.resolve(e.wind), root).string();
    }
    entries.push_back(std::move(c));
  }
}

void DatasetManifest::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  const auto base = path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path();
  for (const auto& e : entries) {
    auto rel = [&](const std::string& p) {
      return std::filesystem::relative(resolve(p), base).generic_string();
    };
    nlohmann::json j{{"mixture", rel(e.mixture)}, {"desired", rel(e.desired)},
                     {"wind", rel(e.wind)},       {"snr_db", e.snr_db},
                     {"seed", e.seed},            {"split", e.split}};
    out << j.dump() << "\n";
  }
  if (!out) throw IoError("failed writing " + path.string());
}

DatasetManifest DatasetManifest::read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());
  DatasetManifest m;
  m.root = path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path();
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      ManifestEntry e;
      e.mixture = j.at("mixture").get<std::string>();
      e.desired = j.at("desired").get<std::string>();
      e.wind = j.at("wind").get<std::string>();
      e.snr_db = j.at("snr_db").get<double>();
      e.seed = j.value("seed", std::uint64_t{0});
      e.split = j.value("split", std::string("train"));
      m.entries.push_back(std::move(e));
    } catch (const nlohmann::json::exception& ex) {
      throw DatasetError("manifest " + path.string() + ":" + std::to_string(lineno) + ": " +
                         ex.what());
    }
  }
  return m;
}

DatasetManifest build_dataset(const std::vector<std::filesystem::path>& corpus,
                              const WindGenParams& gen, const std::vector<double>& snr_set,
                              const std::filesystem::path& out_dir,
                              const DatasetOptions& opts) {
  gen.validate();
  if (corpus.empty()) throw DatasetError("build_dataset: empty corpus");
  if (snr_set.empty()) throw DatasetError("build_dataset: empty SNR set");
  if (!(opts.peak > 0.0 && opts.peak < 1.0)) throw ParameterError("build_dataset: peak in (0, 1)");
  std::filesystem::create_directories(out_dir);
  const std::size_t clip_len = samples_for(opts.clip_seconds);

  DatasetManifest manifest;
  manifest.root = out_dir;
  std::size_t index = 0;
  for (std::size_t fi = 0; fi < corpus.size(); ++fi) {
    AudioBuffer src;
    try {
      src = read_wav(corpus[fi]);
      require_pipeline_audio(src);
    } catch (const Error& e) {
      std::fprintf(stderr, "warning: skipping %s: %s\n", corpus[fi].string().c_str(), e.what());
      continue;
    }
    std::mt19937_64 crop_rng(splitmix64(gen.seed ^ (0xC0FFEEull + fi)));
    std::vector<double> clip(clip_len, 0.0);
    if (src.size() > clip_len) {
      std::uniform_int_distribution<std::size_t> off(0, src.size() - clip_len);
      const std::size_t o = off(crop_rng);
      std::copy_n(src.samples.begin() + static_cast<std::ptrdiff_t>(o), clip_len, clip.begin());
    } else {
      std::copy(src.samples.begin(), src.samples.end(), clip.begin());
    }
    if (clip_energy(clip) == 0.0) {
      std::fprintf(stderr, "warning: skipping %s: silent clip\n", corpus[fi].string().c_str());
      continue;
    }
    AudioBuffer desired;
    desired.samples = clip;

    for (double snr : snr_set) {
      WindGenParams wp = gen;
      wp.seed = splitmix64(gen.seed + 0x5EEDull * (index + 1));
      wp.duration_s = static_cast<double>(clip_len) / kFs;
      const AudioBuffer wind = gen_wind(wp);
      const Mixture mix = mix_at_snr(desired, wind, snr);
      double peak = 0.0;
      for (double v : mix.mixture.samples) peak = std::max(peak, std::abs(v));
      const double g = opts.peak / peak;

      AudioBuffer d, w, x;
      d.samples.resize(clip_len);
      w.samples.resize(clip_len);
      x.samples.resize(clip_len);
      for (std::size_t i = 0; i < clip_len; ++i) {
        d.samples[i] = quantize(g * desired.samples[i]);
        w.samples[i] = quantize(g * mix.wind.samples[i]);
        x.samples[i] = d.samples[i] + w.samples[i];
      }
      char stem[64];
      std::snprintf(stem, sizeof(stem), "%s_%05zu", opts.split.c_str(), index);
      ManifestEntry e;
      e.mixture = std::string(stem) + "_mix.wav";
      e.desired = std::string(stem) + "_desired.wav";
      e.wind = std::string(stem) + "_wind.wav";
      e.snr_db = snr;
      e.seed = wp.seed;
      e.split = opts.split;
      write_wav(out_dir / e.mixture, x);
      write_wav(out_dir / e.desired, d);
      write_wav(out_dir / e.wind, w);
      manifest.entries.push_back(std::move(e));
      ++index;
    }
  }
  if (manifest.entries.empty()) throw DatasetError("build_dataset: no usable corpus files");
  return manifest;
}

}  // namespace wnr
