// Copyright 2026 The windnr Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "wnr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "wnr/errors.hpp"

namespace wnr {
namespace {

double energy(std::span<const double> x) {
  return std::inner_product(x.begin(), x.end(), x.begin(), 0.0);
}

double mean_of(const std::vector<FileScore>& files, double FileScore::*field) {
  if (files.empty()) return 0.0;
  double s = 0.0;
  for (const auto& f : files) s += f.*field;
  return s / static_cast<double>(files.size());
}

}  // namespace

double si_sdr(std::span<const double> estimate, std::span<const double> reference) {
  if (estimate.size() != reference.size()) {
    throw ShapeError("si_sdr: estimate has " + std::to_string(estimate.size()) +
                     " samples, reference " + std::to_string(reference.size()));
  }
  const std::size_t n = reference.size();
  if (n == 0) throw UndefinedMetricError("si_sdr: empty signals");
  const double me = std::accumulate(estimate.begin(), estimate.end(), 0.0) / n;
  const double mr = std::accumulate(reference.begin(), reference.end(), 0.0) / n;
  double dot = 0.0, rr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    dot += (estimate[i] - me) * (reference[i] - mr);
    rr += (reference[i] - mr) * (reference[i] - mr);
  }
  if (rr == 0.0) throw UndefinedMetricError("si_sdr: reference is silent");
  const double scale = dot / rr;
  double target = 0.0, residual = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = scale * (reference[i] - mr);
    const double e = (estimate[i] - me) - t;
    target += t * t;
    residual += e * e;
  }
  // A silent estimate carries none of the reference: the floor, not the cap.
  if (target == 0.0) return -kSiSdrCapDb;
  if (residual == 0.0) return kSiSdrCapDb;
  return std::clamp(10.0 * std::log10(target / residual), -kSiSdrCapDb, kSiSdrCapDb);
}

double si_sdr(const AudioBuffer& estimate, const AudioBuffer& reference) {
  return si_sdr(std::span<const double>(estimate.samples),
                std::span<const double>(reference.samples));
}

double leakage(const ComplexSpectrogram& d_hat, const ComplexSpectrogram& w) {
  if (d_hat.frames != w.frames || d_hat.bins != w.bins) {
    throw ShapeError("leakage: spectrogram shapes differ");
  }
  if (d_hat.data.empty()) throw UndefinedMetricError("leakage: empty spectrograms");
  double acc = 0.0;
  for (std::size_t i = 0; i < d_hat.data.size(); ++i) {
    const double a = std::log10(std::max(std::abs(d_hat.data[i]), kLeakageFloor));
    const double b = std::log10(std::max(std::abs(w.data[i]), kLeakageFloor));
    acc += (a - b) * (a - b);
  }
  return -std::sqrt(acc / static_cast<double>(d_hat.data.size()));
}

double snr_db(std::span<const double> desired, std::span<const double> wind) {
  const double ed = energy(desired), ew = energy(wind);
  if (ed == 0.0 || ew == 0.0) throw UndefinedMetricError("snr: silent input");
  return 10.0 * std::log10(ed / ew);
}

Mixture mix_at_snr(const AudioBuffer& desired, const AudioBuffer& wind, double target_db) {
  if (desired.size() != wind.size()) throw ShapeError("mix_at_snr: length mismatch");
  if (!std::isfinite(target_db)) throw ParameterError("mix_at_snr: SNR must be finite");
  const double ed = energy(desired.samples), ew = energy(wind.samples);
  if (ed == 0.0 || ew == 0.0) throw UndefinedMetricError("mix_at_snr: silent input, SNR undefined");
  const double gain = std::sqrt(ed / (ew * std::pow(10.0, target_db / 10.0)));
  Mixture m;
  m.wind.sample_rate_hz = m.mixture.sample_rate_hz = desired.sample_rate_hz;
  m.wind.samples.resize(wind.size());
  m.mixture.samples.resize(wind.size());
  for (std::size_t i = 0; i < wind.size(); ++i) {
    m.wind.samples[i] = gain * wind.samples[i];
    m.mixture.samples[i] = desired.samples[i] + m.wind.samples[i];
  }
  return m;
}

EvalWindow eval_window(std::size_t num_samples, std::size_t latency, const StftConfig& cfg) {
  const int frames = num_frames(num_samples, cfg);
  if (frames == 0 || num_samples <= latency) return {};
  const std::size_t covered = static_cast<std::size_t>(frames - 1) * cfg.hop + cfg.win_len;
  EvalWindow w;
  w.begin = static_cast<std::size_t>(cfg.hop);
  w.end = std::min(covered - cfg.hop, num_samples - latency);
  return w;
}

FileScore score_file(const std::string& name, double snr, const AudioBuffer& mixture,
                     const AudioBuffer& desired, const AudioBuffer& wind,
                     const AudioBuffer& estimate, std::size_t latency) {
  const std::size_t n = desired.size();
  if (mixture.size() != n || wind.size() != n || estimate.size() != n) {
    throw ShapeError("score_file: " + name + ": signal lengths differ");
  }
  const EvalWindow win = eval_window(n, latency);
  if (win.size() < static_cast<std::size_t>(StftConfig{}.win_len)) {
    throw UndefinedMetricError("score_file: " + name + " is too short to evaluate");
  }
  auto slice = [&](const AudioBuffer& a, std::size_t offset) {
    AudioBuffer out;
    out.samples.assign(a.samples.begin() + win.begin + offset,
                       a.samples.begin() + win.end + offset);
    return out;
  };
  const AudioBuffer d = slice(desired, 0), w = slice(wind, 0), x = slice(mixture, 0);
  const AudioBuffer e = slice(estimate, latency);
  const ComplexSpectrogram w_spec = stft(w);

  FileScore s;
  s.name = name;
  s.snr_db = snr;
  s.si_sdr_in = si_sdr(x, d);
  s.si_sdr_out = si_sdr(e, d);
  s.leakage_in = leakage(stft(x), w_spec);
  s.leakage_out = leakage(stft(e), w_spec);
  return s;
}

double EvalReport::mean_si_sdr_in() const { return mean_of(files, &FileScore::si_sdr_in); }
double EvalReport::mean_si_sdr_out() const { return mean_of(files, &FileScore::si_sdr_out); }
double EvalReport::mean_leakage_in() const { return mean_of(files, &FileScore::leakage_in); }
double EvalReport::mean_leakage_out() const { return mean_of(files, &FileScore::leakage_out); }

std::string EvalReport::to_text() const {
  std::ostringstream o;
  o.precision(6);
  o << std::fixed;
  o << "files=" << files.size() << "\n"
    << "si_sdr_in_db=" << mean_si_sdr_in() << "\n"
    << "si_sdr_db=" << mean_si_sdr_out() << "\n"
    << "si_sdr_gain_db=" << mean_si_sdr_out() - mean_si_sdr_in() << "\n"
    << "leakage_in=" << mean_leakage_in() << "\n"
    << "leakage=" << mean_leakage_out() << "\n";
  for (std::size_t i = 0; i < files.size(); ++i) {
    const auto& f = files[i];
    const std::string p = "file." + std::to_string(i) + ".";
    o << p << "name=" << f.name << "\n"
      << p << "snr_db=" << f.snr_db << "\n"
      << p << "si_sdr_in_db=" << f.si_sdr_in << "\n"
      << p << "si_sdr_db=" << f.si_sdr_out << "\n"
      << p << "leakage_in=" << f.leakage_in << "\n"
      << p << "leakage=" << f.leakage_out << "\n";
  }
  return o.str();
}

std::string EvalReport::to_json() const {
  nlohmann::json j;
  j["files"] = nlohmann::json::array();
  for (const auto& f : files) {
    j["files"].push_back({{"name", f.name},
                          {"snr_db", f.snr_db},
                          {"si_sdr_in_db", f.si_sdr_in},
                          {"si_sdr_db", f.si_sdr_out},
                          {"leakage_in", f.leakage_in},
                          {"leakage", f.leakage_out}});
  }
  j["si_sdr_in_db"] = mean_si_sdr_in();
  j["si_sdr_db"] = mean_si_sdr_out();
  j["si_sdr_gain_db"] = mean_si_sdr_out() - mean_si_sdr_in();
  j["leakage_in"] = mean_leakage_in();
  j["leakage"] = mean_leakage_out();
  return j.dump(2);
}

}  // namespace wnr
