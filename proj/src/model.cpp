// Copyright 2026 The windnr Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "wnr/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "wnr/errors.hpp"

namespace wnr {

std::string to_string(Mode mode) {
  return mode == Mode::kRejection ? "rejection" : "extraction";
}

Mode parse_mode(std::string_view name) {
  if (name == "rejection") return Mode::kRejection;
  if (name == "extraction") return Mode::kExtraction;
  throw ParameterError("unknown mode '" + std::string(name) +
                       "' (expected rejection or extraction)");
}

double default_alpha(Mode mode) { return mode == Mode::kRejection ? 0.3 : 1.0; }

ModelConfig ModelConfig::for_mode(Mode mode, double scale) {
  ModelConfig cfg;
  cfg.mode = mode;
  cfg.alpha = default_alpha(mode);
  cfg.scale = scale;
  return cfg;
}

int ModelConfig::width(int channels) const {
  const int w = static_cast<int>(std::ceil(channels * scale - 1e-9));
  return std::max(2, w);
}

namespace {

int encoder_chain_extent(int extent, std::size_t layers) {
  for (std::size_t i = 0; i < layers; ++i) {
    extent = nn::conv_geometry(extent, kConvTaps, i == 0 ? 1 : 2).out;
  }
  return extent;
}

}  // namespace

int ModelConfig::encoder_extent() const {
  return encoder_chain_extent(reorient.band_len, lf_filters.size());
}

int ModelConfig::gru_input() const { return encoder_extent() * width(lf_pointwise); }

int ModelConfig::fc_input() const {
  return width(gru_units) + encoder_extent() * width(hf_pointwise);
}

void ModelConfig::validate() const {
  stft.validate();
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw ConfigError("model: alpha must lie in (0, 1], got " + std::to_string(alpha));
  }
  if (!(scale > 0.0 && scale <= 1.0)) {
    throw ConfigError("model: scale must lie in (0, 1], got " + std::to_string(scale));
  }
  if (fc_out != stft.n_bins()) {
    throw ConfigError("model: fc_out must equal the STFT bin count " +
                      std::to_string(stft.n_bins()));
  }
  reorient.validate(stft.n_bins());
  if (reorient.num_bands != 10) throw ConfigError("model: the encoders expect 10 sub-bands");
  if (lf_filters.empty() || hf_filters.empty() || stage2_filters.empty()) {
    throw ConfigError("model: every convolution stack needs at least one layer");
  }
  const int hf_extent = encoder_chain_extent(reorient.band_len / 2, hf_filters.size());
  if (hf_extent != encoder_extent()) {
    throw ConfigError("model: LF and HF encoders end at different extents (" +
                      std::to_string(encoder_extent()) + " vs " + std::to_string(hf_extent) +
                      ")");
  }
}

// ---------------------------------------------------------------------------
// Network container

namespace {

template <typename T>
nn::Conv<T> make_conv(int taps, int in, int out, int stride) {
  nn::Conv<T> c;
  c.kernel = Tensor<T>({taps, in, out});
  c.bias = Tensor<T>({out});
  c.stride = stride;
  return c;
}

template <typename T>
nn::BatchNorm<T> make_bn(int channels) {
  nn::BatchNorm<T> bn;
  bn.gamma = Tensor<T>({channels}, T(1));
  bn.beta = Tensor<T>({channels});
  bn.running_mean = Tensor<T>({channels});
  bn.running_var = Tensor<T>({channels}, T(1));
  return bn;
}

template <typename T>
Encoder<T> make_encoder(const ModelConfig& cfg, int in, const std::vector<int>& filters,
                        int pointwise_out, bool downsample) {
  Encoder<T> e;
  for (std::size_t i = 0; i < filters.size(); ++i) {
    const int out = cfg.width(filters[i]);
    const int stride = (downsample && i > 0) ? 2 : 1;
    e.layers.push_back({make_conv<T>(kConvTaps, in, out, stride), make_bn<T>(out)});
    in = out;
  }
  e.pointwise = make_conv<T>(1, in, pointwise_out, 1);
  return e;
}

template <typename Net, typename R>
void collect_encoder(Net& enc, const std::string& prefix, std::vector<R>& out) {
  for (std::size_t i = 0; i < enc.layers.size(); ++i) {
    const std::string n = std::to_string(i + 1);
    auto& l = enc.layers[i];
    out.push_back({prefix + ".conv" + n + ".kernel", &l.conv.kernel, true});
    out.push_back({prefix + ".conv" + n + ".bias", &l.conv.bias, true});
    out.push_back({prefix + ".bn" + n + ".gamma", &l.bn.gamma, true});
    out.push_back({prefix + ".bn" + n + ".beta", &l.bn.beta, true});
    out.push_back({prefix + ".bn" + n + ".running_mean", &l.bn.running_mean, false});
    out.push_back({prefix + ".bn" + n + ".running_var", &l.bn.running_var, false});
  }
  out.push_back({prefix + ".pw.kernel", &enc.pointwise.kernel, true});
  out.push_back({prefix + ".pw.bias", &enc.pointwise.bias, true});
}

}  // namespace

template <typename T>
Network<T> Network<T>::allocate(const ModelConfig& cfg) {
  cfg.validate();
  Network<T> net;
  net.config = cfg;
  const int bands_per_encoder = cfg.reorient.num_bands / 2;
  net.lf = make_encoder<T>(cfg, bands_per_encoder, cfg.lf_filters, cfg.width(cfg.lf_pointwise),
                           true);
  net.hf = make_encoder<T>(cfg, bands_per_encoder, cfg.hf_filters, cfg.width(cfg.hf_pointwise),
                           true);
  const int hid = cfg.width(cfg.gru_units), in = cfg.gru_input();
  for (Tensor<T>* w : {&net.gru.W_z, &net.gru.W_r, &net.gru.W_h}) *w = Tensor<T>({hid, in});
  for (Tensor<T>* u : {&net.gru.U_z, &net.gru.U_r, &net.gru.U_h}) *u = Tensor<T>({hid, hid});
  for (Tensor<T>* b : {&net.gru.b_z, &net.gru.b_r, &net.gru.b_h}) *b = Tensor<T>({hid});
  net.fc.kernel = Tensor<T>({cfg.fc_out, cfg.fc_input()});
  net.fc.bias = Tensor<T>({cfg.fc_out});
  net.stage2 = make_encoder<T>(cfg, 2, cfg.stage2_filters, 2, false);
  return net;
}

template <typename T>
std::vector<ParamRef<T>> Network<T>::params() {
  std::vector<ParamRef<T>> out;
  collect_encoder(lf, "lf", out);
  collect_encoder(hf, "hf", out);
  out.push_back({"gru.W_z", &gru.W_z, true});
  out.push_back({"gru.W_r", &gru.W_r, true});
  out.push_back({"gru.W_h", &gru.W_h, true});
  out.push_back({"gru.U_z", &gru.U_z, true});
  out.push_back({"gru.U_r", &gru.U_r, true});
  out.push_back({"gru.U_h", &gru.U_h, true});
  out.push_back({"gru.b_z", &gru.b_z, true});
  out.push_back({"gru.b_r", &gru.b_r, true});
  out.push_back({"gru.b_h", &gru.b_h, true});
  out.push_back({"fc.kernel", &fc.kernel, true});
  out.push_back({"fc.bias", &fc.bias, true});
  collect_encoder(stage2, "stage2", out);
  return out;
}

template <typename T>
std::vector<ConstParamRef<T>> Network<T>::params() const {
  auto refs = const_cast<Network<T>*>(this)->params();
  std::vector<ConstParamRef<T>> out;
  out.reserve(refs.size());
  for (auto& r : refs) out.push_back({r.name, r.tensor, r.trainable});
  return out;
}

template <typename T>
std::int64_t Network<T>::param_count() const {
  std::int64_t total = 0;
  for (const auto& r : params()) {
    if (r.trainable) total += static_cast<std::int64_t>(r.tensor->size());
  }
  return total;
}

template <typename T>
template <typename U>
Network<U> Network<T>::cast() const {
  Network<U> out = Network<U>::allocate(config);
  auto src = params();
  auto dst = out.params();
  for (std::size_t i = 0; i < src.size(); ++i) *dst[i].tensor = src[i].tensor->template cast<U>();
  return out;
}

// ---------------------------------------------------------------------------
// Forward / backward

namespace {

void trace(const ForwardOptions& opts, std::string name, const std::vector<int>& dims) {
  if (opts.trace) opts.trace->emplace_back(std::move(name), dims);
}

template <typename T>
Tensor<T> run_encoder(const Encoder<T>& enc, Tensor<T> h, const ForwardOptions& opts,
                      EncoderCache<T>* cache, const std::string& prefix) {
  if (cache) *cache = EncoderCache<T>{};
  for (std::size_t i = 0; i < enc.layers.size(); ++i) {
    const auto& layer = enc.layers[i];
    Tensor<T> c = nn::conv_forward(h, layer.conv, opts.macs);
    trace(opts, prefix + ".conv" + std::to_string(i + 1), c.dims());
    nn::BatchNormCache<T> bc;
    Tensor<T> b = nn::batchnorm_forward(c, layer.bn, opts.training, cache ? &bc : nullptr);
    Tensor<T> a = nn::relu_forward(b);
    if (cache) {
      cache->conv_inputs.push_back(std::move(h));
      cache->bn.push_back(std::move(bc));
      cache->activations.push_back(a);
    }
    h = std::move(a);
  }
  Tensor<T> y = nn::conv_forward(h, enc.pointwise, opts.macs);
  trace(opts, prefix + ".pw", y.dims());
  if (cache) cache->conv_inputs.push_back(std::move(h));
  return y;
}

template <typename T>
void backward_encoder(const Encoder<T>& enc, const EncoderCache<T>& cache,
                      const Tensor<T>& grad_y, Encoder<T>& grads, Tensor<T>* grad_input) {
  Tensor<T> g;
  nn::conv_backward(cache.conv_inputs.back(), enc.pointwise, grad_y, &g, grads.pointwise);
  for (std::size_t i = enc.layers.size(); i-- > 0;) {
    const auto& layer = enc.layers[i];
    Tensor<T> gb = nn::relu_backward(cache.activations[i], g);
    Tensor<T> gc;
    nn::batchnorm_backward(cache.bn[i], layer.bn, gb, &gc, grads.layers[i].bn);
    Tensor<T>* target = i == 0 ? grad_input : &g;
    nn::conv_backward(cache.conv_inputs[i], layer.conv, gc, target, grads.layers[i].conv);
  }
}

template <typename T>
void require_subbands(const Tensor<T>& x, int positions, const ModelConfig& cfg,
                      const char* junction) {
  const int bands = cfg.reorient.num_bands / 2;
  if (x.rank() != 3 || x.dim(0) != positions || x.dim(1) != cfg.reorient.band_len ||
      x.dim(2) != bands) {
    throw ShapeError(std::string(junction) + ": expected " +
                     Tensor<T>::format_dims({positions, cfg.reorient.band_len, bands}) +
                     ", got " + x.shape_string());
  }
}

}  // namespace

template <typename T>
Tensor<T> run_stage1(const Network<T>& net, const Tensor<T>& low, const Tensor<T>& high,
                     int batch, int frames, Tensor<T>* gru_state, const ForwardOptions& opts,
                     Stage1Cache<T>* cache) {
  const ModelConfig& cfg = net.config;
  const int positions = batch * frames;
  require_subbands(low, positions, cfg, "stage1 low-band input");
  require_subbands(high, positions, cfg, "stage1 high-band input");
  const int extent = cfg.encoder_extent();
  const int hid = net.gru.hidden_dim();

  trace(opts, "lf.input", low.dims());
  Tensor<T> c_low = run_encoder(net.lf, low, opts, cache ? &cache->lf : nullptr, "lf");
  if (c_low.dim(1) != extent || c_low.dim(2) * extent != net.gru.input_dim()) {
    throw ShapeError("junction LF encoder -> GRU: got " + c_low.shape_string());
  }
  c_low.reshape({batch, frames, c_low.dim(1) * c_low.dim(2)});
  trace(opts, "gru.input", c_low.dims());

  if (gru_state && gru_state->size() != static_cast<std::size_t>(batch) * hid) {
    throw ShapeError("junction GRU state: expected " +
                     Tensor<T>::format_dims({batch, hid}) + ", got " +
                     gru_state->shape_string());
  }
  Tensor<T> h = nn::gru_forward(c_low, net.gru, gru_state, cache ? &cache->gru : nullptr,
                                opts.macs);
  trace(opts, "gru.output", h.dims());
  if (gru_state && frames > 0) {
    for (int b = 0; b < batch; ++b) {
      std::copy_n(h.data() + (static_cast<std::size_t>(b) * frames + frames - 1) * hid, hid,
                  gru_state->data() + static_cast<std::size_t>(b) * hid);
    }
  }

  if (cache) cache->hf_input_dims = high.dims();
  Tensor<T> pooled = nn::avgpool_forward(high);
  trace(opts, "hf.pool", pooled.dims());
  Tensor<T> c_high = run_encoder(net.hf, std::move(pooled), opts,
                                 cache ? &cache->hf : nullptr, "hf");
  if (c_high.dim(1) != extent) {
    throw ShapeError("junction HF encoder -> concat: got " + c_high.shape_string());
  }
  const int high_width = c_high.dim(1) * c_high.dim(2);
  if (hid + high_width != net.fc.kernel.dim(1)) {
    throw ShapeError("junction concat -> FC: " + std::to_string(hid + high_width) +
                     " features for a layer expecting " + std::to_string(net.fc.kernel.dim(1)));
  }

  Tensor<T> concat({positions, hid + high_width});
  for (int p = 0; p < positions; ++p) {
    T* row = concat.data() + static_cast<std::size_t>(p) * (hid + high_width);
    std::copy_n(h.data() + static_cast<std::size_t>(p) * hid, hid, row);
    std::copy_n(c_high.data() + static_cast<std::size_t>(p) * high_width, high_width, row + hid);
  }
  trace(opts, "concat", concat.dims());
  Tensor<T> logits = nn::dense_forward(concat, net.fc, opts.macs);
  trace(opts, "fc", logits.dims());
  Tensor<T> mask = nn::sigmoid_forward(logits);
  if (cache) {
    cache->gru_input = std::move(c_low);
    cache->concat = std::move(concat);
    cache->mask = mask;
  }
  return mask;
}

template <typename T>
Tensor<T> run_stage2(const Network<T>& net, const Tensor<T>& features,
                     const ForwardOptions& opts, EncoderCache<T>* cache) {
  if (features.rank() != 3 || features.dim(1) != net.config.fc_out || features.dim(2) != 2) {
    throw ShapeError("stage2 input: expected {N, " + std::to_string(net.config.fc_out) +
                     ", 2}, got " + features.shape_string());
  }
  trace(opts, "stage2.input", features.dims());
  return run_encoder(net.stage2, features, opts, cache, "stage2");
}

template <typename T>
Tensor<T> backward_stage2(const Network<T>& net, const EncoderCache<T>& cache,
                          const Tensor<T>& grad_mask, Network<T>& grads) {
  Tensor<T> g;
  backward_encoder(net.stage2, cache, grad_mask, grads.stage2, &g);
  return g;
}

template <typename T>
void backward_stage1(const Network<T>& net, const Stage1Cache<T>& cache, int batch,
                     int frames, const Tensor<T>& grad_mask, Network<T>& grads) {
  const int positions = batch * frames;
  const int hid = net.gru.hidden_dim();
  Tensor<T> g_logits = nn::sigmoid_backward(cache.mask, grad_mask);
  Tensor<T> g_concat;
  nn::dense_backward(cache.concat, net.fc, g_logits, &g_concat, grads.fc);

  const int width = g_concat.dim(1);
  const int high_width = width - hid;
  const int extent = net.config.encoder_extent();
  Tensor<T> g_h({batch, frames, hid});
  Tensor<T> g_high({positions, extent, high_width / extent});
  for (int p = 0; p < positions; ++p) {
    const T* row = g_concat.data() + static_cast<std::size_t>(p) * width;
    std::copy_n(row, hid, g_h.data() + static_cast<std::size_t>(p) * hid);
    std::copy_n(row + hid, high_width, g_high.data() + static_cast<std::size_t>(p) * high_width);
  }
  Tensor<T> g_low;
  nn::gru_backward(cache.gru_input, net.gru, cache.gru, g_h, &g_low, grads.gru);
  g_low.reshape({positions, extent, g_low.dim(2) / extent});
  backward_encoder(net.lf, cache.lf, g_low, grads.lf, static_cast<Tensor<T>*>(nullptr));
  backward_encoder(net.hf, cache.hf, g_high, grads.hf, static_cast<Tensor<T>*>(nullptr));
}

template <typename T>
void update_running_stats(Network<T>& net, const Stage1Cache<T>& s1, const EncoderCache<T>& s2) {
  auto apply = [](Encoder<T>& enc, const EncoderCache<T>& cache) {
    for (std::size_t i = 0; i < enc.layers.size() && i < cache.bn.size(); ++i) {
      nn::batchnorm_update_running(enc.layers[i].bn, cache.bn[i]);
    }
  };
  apply(net.lf, s1.lf);
  apply(net.hf, s1.hf);
  apply(net.stage2, s2);
}

// ---------------------------------------------------------------------------
// Spectral-level operations

template <typename T>
IntermediateMask stage1_forward(const Network<T>& net, const SubBandTensor& low,
                                const SubBandTensor& high, Tensor<T>* gru_state,
                                const ForwardOptions& opts) {
  auto to_tensor = [](const SubBandTensor& s) {
    Tensor<T> t({s.frames, s.band_len, s.num_bands});
    std::transform(s.data.begin(), s.data.end(), t.data(),
                   [](double v) { return static_cast<T>(v); });
    return t;
  };
  if (low.frames != high.frames) throw ShapeError("stage1: low/high frame counts differ");
  Tensor<T> mask = run_stage1(net, to_tensor(low), to_tensor(high), 1, low.frames, gru_state,
                              opts);
  IntermediateMask out;
  out.frames = mask.dim(0);
  out.bins = mask.dim(1);
  out.values.assign(mask.values().begin(), mask.values().end());
  return out;
}

std::pair<std::vector<double>, std::vector<double>> intermediate_features(
    const IntermediateMask& mask, std::span<const double> phase) {
  if (phase.size() != mask.values.size()) {
    throw ShapeError("intermediate_features: mask and phase sizes differ");
  }
  std::vector<double> yr(phase.size()), yi(phase.size());
  for (std::size_t i = 0; i < phase.size(); ++i) {
    yr[i] = mask.values[i] * std::cos(phase[i]);
    yi[i] = mask.values[i] * std::sin(phase[i]);
  }
  return {std::move(yr), std::move(yi)};
}

template <typename T>
ComplexMask stage2_forward(const Network<T>& net, std::span<const double> y_real,
                           std::span<const double> y_imag, int frames,
                           const ForwardOptions& opts) {
  const int bins = net.config.fc_out;
  const std::size_t cells = static_cast<std::size_t>(frames) * bins;
  if (y_real.size() != cells || y_imag.size() != cells) {
    throw ShapeError("stage2: expected " + std::to_string(frames) + " x " +
                     std::to_string(bins) + " intermediate features");
  }
  Tensor<T> features({frames, bins, 2});
  for (std::size_t i = 0; i < cells; ++i) {
    features[2 * i] = static_cast<T>(y_real[i]);
    features[2 * i + 1] = static_cast<T>(y_imag[i]);
  }
  Tensor<T> m = run_stage2(net, features, opts);
  ComplexMask out;
  out.frames = frames;
  out.bins = bins;
  out.mag.resize(cells);
  out.phase.resize(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    const double re = m[2 * i], im = m[2 * i + 1];
    out.mag[i] = std::hypot(re, im);
    double p = (re == 0.0 && im == 0.0) ? 0.0 : std::atan2(im, re);
    if (p == -std::numbers::pi) p = std::numbers::pi;
    out.phase[i] = p;
  }
  return out;
}

ComplexSpectrogram reconstruct(const MagPhase& x, const ComplexMask& m, double alpha,
                               const StftConfig& cfg) {
  if (x.mag.size() != m.mag.size() || x.frames != m.frames || x.bins != m.bins) {
    throw ShapeError("reconstruct: features and mask shapes differ");
  }
  CompressedSpectrogram est;
  est.frames = x.frames;
  est.bins = x.bins;
  est.alpha = alpha;
  est.config = cfg;
  est.real.resize(x.mag.size());
  est.imag.resize(x.mag.size());
  for (std::size_t i = 0; i < x.mag.size(); ++i) {
    const double r = x.mag[i] * m.mag[i];
    const double theta = x.phase[i] + m.phase[i];
    est.real[i] = r * std::cos(theta);
    est.imag[i] = r * std::sin(theta);
  }
  return power_law_decompress(est);
}

template <typename T>
ComplexSpectrogram estimate_spectrum(const Network<T>& net, const ComplexSpectrogram& x,
                                     Tensor<T>* gru_state, const ForwardOptions& opts) {
  const ModelConfig& cfg = net.config;
  if (x.frames == 0) return ComplexSpectrogram(0, x.bins, x.config);
  const CompressedSpectrogram comp = power_law_compress(x, cfg.alpha);
  const MagPhase mp = mag_phase(comp);
  const auto [low, high] = split_bands(reorient(mp, cfg.reorient));
  const IntermediateMask mask = stage1_forward(net, low, high, gru_state, opts);
  const auto [yr, yi] = intermediate_features(mask, mp.phase);
  const ComplexMask m = stage2_forward(net, yr, yi, x.frames, opts);
  return reconstruct(mp, m, cfg.alpha, x.config);
}

// ---------------------------------------------------------------------------
// Time-domain processing

template <typename T>
StreamState<T>::StreamState(const ModelConfig& cfg)
    : transform(cfg.stft),
      analysis(cfg.stft.win_len, 0.0),
      overlap(cfg.stft.win_len, 0.0),
      pending(cfg.stft.hop, 0.0),
      gru_hidden({1, cfg.width(cfg.gru_units)}) {}

template <typename T>
void StreamState<T>::reset() {
  std::fill(analysis.begin(), analysis.end(), 0.0);
  std::fill(overlap.begin(), overlap.end(), 0.0);
  std::fill(pending.begin(), pending.end(), 0.0);
  gru_hidden.zero();
  blocks = 0;
}

template <typename T>
AudioBuffer process(const Network<T>& net, const AudioBuffer& x) {
  require_pipeline_audio(x);
  const ModelConfig& cfg = net.config;
  const std::size_t n = x.size();
  AudioBuffer out;
  out.samples.assign(n, 0.0);
  if (n >= static_cast<std::size_t>(cfg.stft.win_len)) {
    Tensor<T> state({1, net.gru.hidden_dim()});
    const ComplexSpectrogram est = estimate_spectrum(net, stft(x, cfg.stft), &state);
    const AudioBuffer recon = istft(est);
    for (std::size_t i = kLatencySamples; i < n; ++i) {
      const std::size_t src = i - kLatencySamples;
      if (src < recon.size()) out.samples[i] = recon.samples[src];
    }
  }
  if (cfg.mode == Mode::kExtraction) {
    for (std::size_t i = 0; i < n; ++i) {
      const double delayed = i >= static_cast<std::size_t>(kLatencySamples)
                                 ? x.samples[i - kLatencySamples]
                                 : 0.0;
      out.samples[i] = delayed - out.samples[i];
    }
  }
  return out;
}

template <typename T>
void process_frame(const Network<T>& net, std::span<const double> input,
                   std::span<double> output, StreamState<T>& state) {
  const ModelConfig& cfg = net.config;
  const auto hop = static_cast<std::size_t>(cfg.stft.hop);
  const auto win = static_cast<std::size_t>(cfg.stft.win_len);
  if (input.size() != hop || output.size() != hop) {
    throw ParameterError("process_frame: expected " + std::to_string(hop) +
                         " samples in and out, got " + std::to_string(input.size()) + " / " +
                         std::to_string(output.size()));
  }
  for (double v : input) {
    if (!std::isfinite(v)) throw ParameterError("process_frame: non-finite input sample");
  }
  std::vector<double> delayed(state.analysis.begin(), state.analysis.begin() + hop);
  std::copy(state.analysis.begin() + hop, state.analysis.end(), state.analysis.begin());
  std::copy(input.begin(), input.end(), state.analysis.end() - hop);
  std::copy(state.pending.begin(), state.pending.end(), output.begin());

  if (state.blocks >= 1) {
    ComplexSpectrogram frame(1, cfg.stft.n_bins(), cfg.stft);
    state.transform.analyze(state.analysis, frame.frame(0));
    const ComplexSpectrogram est = estimate_spectrum(net, frame, &state.gru_hidden);
    std::vector<double> synth(win);
    state.transform.synthesize(est.frame(0), synth);
    for (std::size_t i = 0; i < win; ++i) state.overlap[i] += synth[i];
    std::copy_n(state.overlap.begin(), hop, state.pending.begin());
    std::copy(state.overlap.begin() + hop, state.overlap.end(), state.overlap.begin());
    std::fill(state.overlap.end() - hop, state.overlap.end(), 0.0);
  }
  ++state.blocks;

  if (cfg.mode == Mode::kExtraction) {
    for (std::size_t i = 0; i < hop; ++i) output[i] = delayed[i] - output[i];
  }
}

#define WNR_INSTANTIATE_MODEL(T)                                                            \
  template struct Network<T>;                                                               \
  template Tensor<T> run_stage1(const Network<T>&, const Tensor<T>&, const Tensor<T>&, int, \
                                int, Tensor<T>*, const ForwardOptions&, Stage1Cache<T>*);   \
  template Tensor<T> run_stage2(const Network<T>&, const Tensor<T>&, const ForwardOptions&, \
                                EncoderCache<T>*);                                          \
  template Tensor<T> backward_stage2(const Network<T>&, const EncoderCache<T>&,             \
                                     const Tensor<T>&, Network<T>&);                        \
  template void backward_stage1(const Network<T>&, const Stage1Cache<T>&, int, int,         \
                                const Tensor<T>&, Network<T>&);                             \
  template void update_running_stats(Network<T>&, const Stage1Cache<T>&,                    \
                                     const EncoderCache<T>&);                               \
  template IntermediateMask stage1_forward(const Network<T>&, const SubBandTensor&,         \
                                           const SubBandTensor&, Tensor<T>*,                \
                                           const ForwardOptions&);                          \
  template ComplexMask stage2_forward(const Network<T>&, std::span<const double>,           \
                                      std::span<const double>, int, const ForwardOptions&); \
  template ComplexSpectrogram estimate_spectrum(const Network<T>&, const ComplexSpectrogram&, \
                                                Tensor<T>*, const ForwardOptions&);         \
  template struct StreamState<T>;                                                           \
  template AudioBuffer process(const Network<T>&, const AudioBuffer&);                      \
  template void process_frame(const Network<T>&, std::span<const double>, std::span<double>, \
                              StreamState<T>&);

WNR_INSTANTIATE_MODEL(float)
WNR_INSTANTIATE_MODEL(double)

template Network<double> Network<float>::cast<double>() const;
template Network<float> Network<double>::cast<float>() const;
template Network<float> Network<float>::cast<float>() const;
template Network<double> Network<double>::cast<double>() const;

#undef WNR_INSTANTIATE_MODEL

}  // namespace wnr
