// Copyright 2026 The windnr Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "wnr/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "json.hpp"
#include "wnr/errors.hpp"

namespace wnr {
namespace {

void add_encoder(std::vector<LayerCount>& out, const std::string& prefix, const ModelConfig& cfg,
                 int extent, int in, const std::vector<int>& filters, int pointwise_out,
                 bool downsample) {
  for (std::size_t i = 0; i < filters.size(); ++i) {
    const int stride = (downsample && i > 0) ? 2 : 1;
    const int cout = cfg.width(filters[i]);
    extent = nn::conv_geometry(extent, kConvTaps, stride).out;
    out.push_back({prefix + ".conv" + std::to_string(i + 1),
                   static_cast<std::uint64_t>(extent) * kConvTaps * in * cout});
    in = cout;
  }
  out.push_back({prefix + ".pw", static_cast<std::uint64_t>(extent) * in * pointwise_out});
}

double percentile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (v[hi] - v[lo]) * (pos - static_cast<double>(lo));
}

template <typename T>
double time_once(const Network<T>& net, const AudioBuffer& x) {
  const auto t0 = std::chrono::steady_clock::now();
  const AudioBuffer y = process(net, x);
  const auto t1 = std::chrono::steady_clock::now();
  if (y.size() != x.size()) throw Error("measure_rtf: output length mismatch");
  return std::chrono::duration<double>(t1 - t0).count();
}

}  // namespace

std::vector<LayerCount> mac_breakdown(const ModelConfig& cfg) {
  cfg.validate();
  std::vector<LayerCount> out;
  const int half = cfg.reorient.num_bands / 2;
  add_encoder(out, "lf", cfg, cfg.reorient.band_len, half, cfg.lf_filters,
              cfg.width(cfg.lf_pointwise), true);
  add_encoder(out, "hf", cfg, cfg.reorient.band_len / 2, half, cfg.hf_filters,
              cfg.width(cfg.hf_pointwise), true);
  const std::uint64_t h = cfg.width(cfg.gru_units), in = cfg.gru_input();
  out.push_back({"gru", 3 * (in * h + h * h)});
  out.push_back({"fc", static_cast<std::uint64_t>(cfg.fc_input()) * cfg.fc_out});
  add_encoder(out, "stage2", cfg, cfg.fc_out, 2, cfg.stage2_filters, 2, false);
  return out;
}

std::uint64_t count_macs(const ModelConfig& cfg) {
  std::uint64_t total = 0;
  for (const auto& l : mac_breakdown(cfg)) total += l.count;
  return total;
}

template <typename T>
std::uint64_t instrumented_macs_per_frame(const Network<T>& net, int frames) {
  if (frames < 1) throw ParameterError("instrumented_macs_per_frame: frames must be >= 1");
  const StftConfig& s = net.config.stft;
  AudioBuffer x;
  x.samples.resize(static_cast<std::size_t>(frames - 1) * s.hop + s.win_len);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> gauss(0.0, 0.1);
  for (double& v : x.samples) v = gauss(rng);
  nn::MacCounter counter;
  ForwardOptions opts;
  opts.macs = &counter;
  Tensor<T> state({1, net.gru.hidden_dim()});
  const ComplexSpectrogram spec = stft(x, s);
  estimate_spectrum(net, spec, &state, opts);
  if (counter.macs % static_cast<std::uint64_t>(spec.frames) != 0) {
    throw Error("instrumented MAC count is not a multiple of the frame count");
  }
  return counter.macs / static_cast<std::uint64_t>(spec.frames);
}

std::vector<LayerCount> param_breakdown(const ModelConfig& cfg) {
  const auto net = Network<float>::allocate(cfg);
  std::vector<LayerCount> out;
  for (const auto& p : net.params()) {
    if (!p.trainable) continue;
    std::string layer = p.name.substr(0, p.name.rfind('.'));
    if (layer.starts_with("gru")) layer = "gru";
    if (out.empty() || out.back().name != layer) out.push_back({layer, 0});
    out.back().count += p.tensor->size();
  }
  return out;
}

double ComplexityReport::mhz() const {
  return static_cast<double>(macs_per_frame) * frames_per_second / 1e6;
}

std::string ComplexityReport::to_json() const {
  nlohmann::json j{{"params", params},
                   {"macs_per_frame", macs_per_frame},
                   {"frames_per_second", frames_per_second},
                   {"mhz_at_one_cycle_per_mac", mhz()},
                   {"fft_included", false},
                   {"rtf", rtf},
                   {"rtf_iqr", rtf_iqr},
                   {"rtf_spread", spread()},
                   {"rtf_samples", rtf_samples},
                   {"audio_seconds", audio_seconds},
                   {"precision", precision},
                   {"platform", platform},
                   {"reference", {{"params", kReferenceParams},
                                  {"rtf_cortex_a53", kReferenceRtf},
                                  {"mhz", kReferenceMhz}}}};
  return j.dump(2);
}

std::string ComplexityReport::to_table() const {
  char buf[1024];
  std::snprintf(buf, sizeof(buf),
                "%-24s %16s %16s\n"
                "%-24s %16lld %16lld\n"
                "%-24s %16llu %16s\n"
                "%-24s %16.2f %16.1f\n"
                "%-24s %16.4f %16.3f\n"
                "%-24s %16.1f%% %16s\n"
                "platform: %s (%s, FFT excluded from MACs)\n",
                "", "measured", "reference", "parameters", static_cast<long long>(params),
                static_cast<long long>(kReferenceParams), "MACs / frame",
                static_cast<unsigned long long>(macs_per_frame), "-", "MHz (1 cycle / MAC)", mhz(),
                kReferenceMhz, "RTF (median)", rtf, kReferenceRtf, "RTF spread (IQR/median)",
                100.0 * spread(), "-", platform.c_str(), precision.c_str());
  return buf;
}

std::string to_string(Precision p) { return p == Precision::kFloat32 ? "float32" : "float64"; }

Precision parse_precision(const std::string& s) {
  if (s == "float32" || s == "float" || s == "f32") return Precision::kFloat32;
  if (s == "float64" || s == "double" || s == "f64") return Precision::kFloat64;
  throw ParameterError("unknown precision '" + s + "' (expected float32 or float64)");
}

std::string platform_descriptor() {
  std::string cpu = "unknown cpu";
  std::ifstream info("/proc/cpuinfo");
  std::string line;
  while (std::getline(info, line)) {
    if (line.starts_with("model name")) {
      cpu = line.substr(line.find(':') + 2);
      break;
    }
  }
  std::ostringstream o;
  o << cpu << ", single thread";
#if defined(__clang__)
  o << ", clang " << __clang_major__ << "." << __clang_minor__;
#elif defined(__GNUC__)
  o << ", gcc " << __GNUC__ << "." << __GNUC_MINOR__;
#endif
  return o.str();
}

ComplexityReport measure_rtf(const WeightStore& weights, double audio_seconds, int repetitions,
                             int warmup, Precision precision) {
  if (!(audio_seconds > 0.0)) throw ParameterError("measure_rtf: audio_seconds must be positive");
  if (repetitions < 1) throw ParameterError("measure_rtf: repetitions must be >= 1");
  AudioBuffer x;
  x.samples.resize(static_cast<std::size_t>(audio_seconds * kSampleRateHz));
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss(0.0, 0.1);
  for (double& v : x.samples) v = gauss(rng);

  ComplexityReport r;
  r.params = param_count(weights);
  r.macs_per_frame = count_macs(weights.metadata.model_config());
  r.audio_seconds = x.duration_s();
  r.precision = to_string(precision);
  r.platform = platform_descriptor();
  auto run = [&](const auto& net) {
    for (int i = 0; i < warmup; ++i) time_once(net, x);
    for (int i = 0; i < repetitions; ++i) {
      r.rtf_samples.push_back(time_once(net, x) / r.audio_seconds);
    }
  };
  if (precision == Precision::kFloat32) {
    run(to_network<float>(weights));
  } else {
    run(to_network<double>(weights));
  }
  r.rtf = percentile(r.rtf_samples, 0.5);
  r.rtf_iqr = percentile(r.rtf_samples, 0.75) - percentile(r.rtf_samples, 0.25);
  return r;
}

template std::uint64_t instrumented_macs_per_frame(const Network<float>&, int);
template std::uint64_t instrumented_macs_per_frame(const Network<double>&, int);

}  // namespace wnr
