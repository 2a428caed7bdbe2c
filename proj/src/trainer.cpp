// Copyright 2026 The windnr Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "wnr/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

#include "json.hpp"
#include "wnr/errors.hpp"
#include "wnr/metrics.hpp"
#include "wnr/stft.hpp"

namespace wnr {

ModelConfig TrainConfig::model_config() const {
  ModelConfig cfg = ModelConfig::for_mode(mode, scale);
  cfg.alpha = alpha;
  return cfg;
}

void TrainConfig::validate() const {
  if (!(lr0 > 0.0)) throw ConfigError("train: lr0 must be positive");
  if (batch_size < 1) throw ConfigError("train: batch_size must be at least 1");
  if (epochs < 1) throw ConfigError("train: epochs must be at least 1");
  if (decay_epochs < 1) throw ConfigError("train: decay_epochs must be at least 1");
  if (!(decay_factor >= 1.0)) throw ConfigError("train: decay_factor must be >= 1");
  if (max_steps_per_epoch < 0) throw ConfigError("train: max_steps_per_epoch must be >= 0");
  model_config().validate();
}

double lr_at(int epoch, const TrainConfig& cfg) {
  if (epoch < 0) throw ParameterError("lr_at: negative epoch");
  return cfg.lr0 / std::pow(cfg.decay_factor, epoch / cfg.decay_epochs);
}

double loss(const CompressedSpectrogram& estimate, const CompressedSpectrogram& target) {
  if (estimate.alpha != target.alpha) {
    throw ParameterError("loss: estimate uses alpha " + std::to_string(estimate.alpha) +
                         ", target " + std::to_string(target.alpha));
  }
  if (estimate.frames != target.frames || estimate.bins != target.bins) {
    throw ShapeError("loss: spectrogram shapes differ");
  }
  if (estimate.real.empty()) throw EmptyInputError("loss: empty spectrograms");
  double acc = 0.0;
  for (std::size_t i = 0; i < estimate.real.size(); ++i) {
    const double dr = estimate.real[i] - target.real[i];
    const double di = estimate.imag[i] - target.imag[i];
    acc += dr * dr + di * di;
  }
  return acc / (2.0 * static_cast<double>(estimate.real.size()));
}

template <typename T>
AdamState<T> AdamState<T>::init(const Network<T>& net) {
  AdamState<T> s;
  for (const auto& p : net.params()) {
    if (!p.trainable) continue;
    s.m.emplace_back(p.tensor->dims());
    s.v.emplace_back(p.tensor->dims());
  }
  return s;
}

template <typename T>
Batch<T> make_batch(const std::vector<const TrainClip*>& clips, const ModelConfig& cfg) {
  if (clips.empty()) throw EmptyInputError("make_batch: no clips");
  int frames = -1;
  for (const TrainClip* c : clips) {
    if (c->mixture.size() != c->target.size()) throw ShapeError("make_batch: stem lengths differ");
    const int t = num_frames(c->mixture.size(), cfg.stft);
    frames = frames < 0 ? t : std::min(frames, t);
  }
  if (frames <= 0) throw EmptyInputError("make_batch: clips shorter than one frame");

  Batch<T> b;
  b.batch = static_cast<int>(clips.size());
  b.frames = frames;
  const int bins = cfg.stft.n_bins();
  const int l = cfg.reorient.band_len, half = cfg.reorient.num_bands / 2;
  const std::size_t positions = static_cast<std::size_t>(b.batch) * frames;
  const std::size_t band_block = static_cast<std::size_t>(l) * half;
  b.low = Tensor<T>({static_cast<int>(positions), l, half});
  b.high = Tensor<T>({static_cast<int>(positions), l, half});
  for (auto* v : {&b.cos_phase, &b.sin_phase, &b.x_real, &b.x_imag, &b.t_real, &b.t_imag}) {
    v->resize(positions * bins);
  }
  for (int i = 0; i < b.batch; ++i) {
    const auto x = power_law_compress(stft(clips[i]->mixture, cfg.stft), cfg.alpha);
    const auto y = power_law_compress(stft(clips[i]->target, cfg.stft), cfg.alpha);
    const MagPhase mp = mag_phase(x);
    const auto [lo, hi] = split_bands(reorient(mp, cfg.reorient));
    const std::size_t pos0 = static_cast<std::size_t>(i) * frames;
    for (std::size_t j = 0; j < band_block * frames; ++j) {
      b.low[pos0 * band_block + j] = static_cast<T>(lo.data[j]);
      b.high[pos0 * band_block + j] = static_cast<T>(hi.data[j]);
    }
    for (std::size_t j = 0; j < static_cast<std::size_t>(frames) * bins; ++j) {
      const std::size_t o = pos0 * bins + j;
      b.cos_phase[o] = static_cast<T>(std::cos(mp.phase[j]));
      b.sin_phase[o] = static_cast<T>(std::sin(mp.phase[j]));
      b.x_real[o] = static_cast<T>(x.real[j]);
      b.x_imag[o] = static_cast<T>(x.imag[j]);
      b.t_real[o] = static_cast<T>(y.real[j]);
      b.t_imag[o] = static_cast<T>(y.imag[j]);
    }
  }
  return b;
}

namespace {

// The masked estimate is X * M, which equals the polar form used at
// inference time; the product form keeps the gradient free of atan2.
template <typename T>
double forward_backward_impl(const Network<T>& net, const Batch<T>& b, Network<T>* grads,
                             bool training, Stage1Cache<T>* c1, EncoderCache<T>* c2) {
  const ForwardOptions opts{training, nullptr, nullptr};
  const Tensor<T> mask = run_stage1(net, b.low, b.high, b.batch, b.frames,
                                     static_cast<Tensor<T>*>(nullptr), opts, c1);
  const int positions = mask.dim(0), bins = mask.dim(1);
  const std::size_t cells = static_cast<std::size_t>(positions) * bins;
  Tensor<T> features({positions, bins, 2});
  for (std::size_t i = 0; i < cells; ++i) {
    features[2 * i] = mask[i] * b.cos_phase[i];
    features[2 * i + 1] = mask[i] * b.sin_phase[i];
  }
  const Tensor<T> m = run_stage2(net, features, opts, c2);

  std::vector<T> dr(cells), di(cells);
  double acc = 0.0;
  for (std::size_t i = 0; i < cells; ++i) {
    const T mr = m[2 * i], mi = m[2 * i + 1];
    const T er = b.x_real[i] * mr - b.x_imag[i] * mi;
    const T ei = b.x_real[i] * mi + b.x_imag[i] * mr;
    dr[i] = er - b.t_real[i];
    di[i] = ei - b.t_imag[i];
    acc += static_cast<double>(dr[i]) * dr[i] + static_cast<double>(di[i]) * di[i];
  }
  const double value = acc / (2.0 * static_cast<double>(cells));
  if (!grads) return value;

  *grads = Network<T>::allocate(net.config);
  for (auto& g : grads->params()) g.tensor->zero();
  const T scale = static_cast<T>(1.0 / static_cast<double>(cells));
  Tensor<T> g_m({positions, bins, 2});
  for (std::size_t i = 0; i < cells; ++i) {
    const T ger = dr[i] * scale, gei = di[i] * scale;
    g_m[2 * i] = ger * b.x_real[i] + gei * b.x_imag[i];
    g_m[2 * i + 1] = gei * b.x_real[i] - ger * b.x_imag[i];
  }
  const Tensor<T> g_features = backward_stage2(net, *c2, g_m, *grads);
  Tensor<T> g_mask({positions, bins});
  for (std::size_t i = 0; i < cells; ++i) {
    g_mask[i] = g_features[2 * i] * b.cos_phase[i] + g_features[2 * i + 1] * b.sin_phase[i];
  }
  backward_stage1(net, *c1, b.batch, b.frames, g_mask, *grads);
  return value;
}

template <typename T>
bool all_finite(const Tensor<T>& t) {
  return std::all_of(t.data(), t.data() + t.size(), [](T v) { return std::isfinite(v); });
}

template <typename T>
std::string first_non_finite(const Network<T>& net, const Network<T>& grads) {
  for (const auto& p : net.params()) {
    if (!all_finite(*p.tensor)) return "parameter " + p.name;
  }
  for (const auto& g : grads.params()) {
    if (g.tensor->size() && !all_finite(*g.tensor)) return "gradient of " + g.name;
  }
  return "loss (all parameters and gradients finite)";
}

}  // namespace

template <typename T>
double forward_backward(const Network<T>& net, const Batch<T>& batch, Network<T>* grads,
                        bool training) {
  Stage1Cache<T> c1;
  EncoderCache<T> c2;
  return forward_backward_impl(net, batch, grads, training, grads ? &c1 : nullptr,
                               grads ? &c2 : nullptr);
}

template <typename T>
StepResult train_step(Network<T>& net, const Batch<T>& batch, AdamState<T>& adam, double lr) {
  Stage1Cache<T> c1;
  EncoderCache<T> c2;
  Network<T> grads;
  StepResult r;
  r.loss = forward_backward_impl(net, batch, &grads, true, &c1, &c2);
  if (!std::isfinite(r.loss)) {
    throw NonFiniteError("train_step: non-finite loss; first offender: " +
                         first_non_finite(net, grads));
  }
  auto params = net.params();
  auto gparams = grads.params();
  if (adam.m.empty()) adam = AdamState<T>::init(net);
  ++adam.step;
  const double bc1 = 1.0 - std::pow(adam.beta1, static_cast<double>(adam.step));
  const double bc2 = 1.0 - std::pow(adam.beta2, static_cast<double>(adam.step));
  double norm = 0.0;
  std::size_t slot = 0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params[i].trainable) continue;
    Tensor<T>& p = *params[i].tensor;
    const Tensor<T>& g = *gparams[i].tensor;
    if (!all_finite(g)) throw NonFiniteError("train_step: non-finite gradient of " + params[i].name);
    Tensor<T>& m = adam.m[slot];
    Tensor<T>& v = adam.v[slot];
    ++slot;
    for (std::size_t j = 0; j < p.size(); ++j) {
      const double gj = g[j];
      norm += gj * gj;
      const double mj = adam.beta1 * m[j] + (1.0 - adam.beta1) * gj;
      const double vj = adam.beta2 * v[j] + (1.0 - adam.beta2) * gj * gj;
      m[j] = static_cast<T>(mj);
      v[j] = static_cast<T>(vj);
      const double step = lr * (mj / bc1) / (std::sqrt(vj / bc2) + adam.eps);
      p[j] = static_cast<T>(static_cast<double>(p[j]) - step);
    }
  }
  update_running_stats(net, c1, c2);
  r.grad_norm = std::sqrt(norm);
  for (const auto& p : net.params()) {
    if (!all_finite(*p.tensor)) {
      throw NonFiniteError("train_step: parameter " + p.name + " became non-finite");
    }
  }
  return r;
}

std::vector<TrainClip> load_split(const DatasetManifest& manifest, const std::string& split,
                                  Mode mode) {
  std::vector<TrainClip> clips;
  for (const auto& e : manifest.split(split)) {
    TrainClip c;
    c.mixture = read_wav(manifest.resolve(e.mixture));
    c.desired = read_wav(manifest.resolve(e.desired));
    AudioBuffer wind = read_wav(manifest.resolve(e.wind));
    if (c.mixture.size() != c.desired.size() || wind.size() != c.desired.size()) {
      throw DatasetError("manifest entry " + e.mixture + ": stem lengths differ");
    }
    c.target = mode == Mode::kRejection ? c.desired : std::move(wind);
    clips.push_back(std::move(c));
  }
  if (clips.empty()) throw DatasetError("split '" + split + "' is empty");
  return clips;
}

std::string to_json_line(const EpochRecord& r) {
  nlohmann::json j{{"epoch", r.epoch},           {"lr", r.lr},
                   {"train_loss", r.train_loss}, {"val_loss", r.val_loss},
                   {"val_si_sdr_db", r.val_si_sdr_db}, {"seconds", r.seconds}};
  return j.dump();
}

FitResult fit(const DatasetManifest& manifest, const TrainConfig& cfg) {
  const auto train = load_split(manifest, "train", cfg.mode);
  const auto val = load_split(manifest, "val", cfg.mode);
  return fit(train, val, cfg);
}

FitResult fit(const std::vector<TrainClip>& train, const std::vector<TrainClip>& val,
              const TrainConfig& cfg) {
  cfg.validate();
  if (train.empty()) throw DatasetError("fit: empty training split");
  if (val.empty()) throw DatasetError("fit: empty validation split");
  const ModelConfig mcfg = cfg.model_config();
  auto net = to_network<float>(init_weights(mcfg, cfg.seed));
  auto adam = AdamState<float>::init(net);
  std::mt19937_64 rng(cfg.seed ^ 0x7EA1ull);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  std::ofstream history;
  if (!cfg.history_path.empty()) {
    history.open(cfg.history_path, std::ios::trunc);
    if (!history) throw IoError("cannot open " + cfg.history_path.string());
  }

  auto batches_of = [&](const std::vector<TrainClip>& clips, const std::vector<std::size_t>& idx,
                        std::size_t start) {
    std::vector<const TrainClip*> out;
    for (std::size_t i = start; i < std::min(idx.size(), start + cfg.batch_size); ++i) {
      out.push_back(&clips[idx[i]]);
    }
    return out;
  };
  std::vector<std::size_t> val_order(val.size());
  std::iota(val_order.begin(), val_order.end(), std::size_t{0});

  FitResult result;
  double best = std::numeric_limits<double>::infinity();
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    std::shuffle(order.begin(), order.end(), rng);
    EpochRecord rec;
    rec.epoch = epoch;
    rec.lr = lr_at(epoch, cfg);
    std::size_t steps = (order.size() + cfg.batch_size - 1) / cfg.batch_size;
    if (cfg.max_steps_per_epoch > 0) {
      steps = std::min(steps, static_cast<std::size_t>(cfg.max_steps_per_epoch));
    }
    double train_loss = 0.0;
    for (std::size_t s = 0; s < steps; ++s) {
      const auto batch = make_batch<float>(batches_of(train, order, s * cfg.batch_size), mcfg);
      train_loss += train_step(net, batch, adam, rec.lr).loss;
    }
    rec.train_loss = train_loss / static_cast<double>(steps);

    double val_loss = 0.0;
    std::size_t val_batches = 0;
    for (std::size_t s = 0; s < val.size(); s += cfg.batch_size) {
      const auto batch = make_batch<float>(batches_of(val, val_order, s), mcfg);
      val_loss += forward_backward<float>(net, batch, nullptr, false);
      ++val_batches;
    }
    rec.val_loss = val_loss / static_cast<double>(val_batches);
    double sdr = 0.0;
    for (const auto& clip : val) {
      const AudioBuffer est = process(net, clip.mixture);
      const EvalWindow w = eval_window(est.size(), kLatencySamples, mcfg.stft);
      sdr += si_sdr(std::span<const double>(est.samples).subspan(w.begin + kLatencySamples,
                                                                 w.size()),
                    std::span<const double>(clip.desired.samples).subspan(w.begin, w.size()));
    }
    rec.val_si_sdr_db = sdr / static_cast<double>(val.size());
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (rec.val_loss < best) {
      best = rec.val_loss;
      result.best_epoch = epoch;
      result.weights = from_network(net, cfg.seed);
      if (!cfg.checkpoint_path.empty()) save(result.weights, cfg.checkpoint_path);
    }
    if (history) history << to_json_line(rec) << "\n" << std::flush;
    if (cfg.verbose) {
      std::fprintf(stderr, "epoch %d lr %.2e train %.5f val %.5f val_si_sdr %.2f dB (%.1f s)\n",
                   epoch, rec.lr, rec.train_loss, rec.val_loss, rec.val_si_sdr_db, rec.seconds);
    }
    result.history.push_back(rec);
  }
  return result;
}

double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
  return std::abs(analytic - numeric) / denom;
}

namespace {

// On/off state of every ReLU in the network for one forward pass.
std::vector<bool> relu_pattern(const Stage1Cache<double>& c1, const EncoderCache<double>& c2) {
  std::vector<bool> out;
  for (const auto* enc : {&c1.lf, &c1.hf, &c2}) {
    for (const auto& a : enc->activations) {
      for (double v : a.values()) out.push_back(v > 0.0);
    }
  }
  return out;
}

// Random features plus targets near the network's own estimate: a small
// loss keeps round-off in the finite differences well below the gradients
// being checked.
Batch<double> make_check_batch(const Network<double>& net, std::mt19937_64& rng, int batch,
                               int frames) {
  const ModelConfig& cfg = net.config;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Batch<double> b;
  b.batch = batch;
  b.frames = frames;
  const int positions = batch * frames, bins = cfg.fc_out;
  const int l = cfg.reorient.band_len, half = cfg.reorient.num_bands / 2;
  b.low = Tensor<double>({positions, l, half});
  b.high = Tensor<double>({positions, l, half});
  for (auto& v : b.low.values()) v = 0.5 + 0.5 * u(rng);
  for (auto& v : b.high.values()) v = 0.5 + 0.5 * u(rng);
  const std::size_t cells = static_cast<std::size_t>(positions) * bins;
  for (auto* v : {&b.cos_phase, &b.sin_phase, &b.x_real, &b.x_imag, &b.t_real, &b.t_imag}) {
    v->resize(cells);
  }
  for (std::size_t i = 0; i < cells; ++i) {
    const double phase = std::numbers::pi * u(rng);
    const double mag = 0.5 + 0.5 * u(rng);
    b.cos_phase[i] = std::cos(phase);
    b.sin_phase[i] = std::sin(phase);
    b.x_real[i] = mag * b.cos_phase[i];
    b.x_imag[i] = mag * b.sin_phase[i];
  }
  const ForwardOptions opts{true, nullptr, nullptr};
  const auto mask = run_stage1(net, b.low, b.high, batch, frames,
                               static_cast<Tensor<double>*>(nullptr), opts);
  Tensor<double> features({positions, bins, 2});
  for (std::size_t i = 0; i < cells; ++i) {
    features[2 * i] = mask[i] * b.cos_phase[i];
    features[2 * i + 1] = mask[i] * b.sin_phase[i];
  }
  const auto m = run_stage2(net, features, opts);
  for (std::size_t i = 0; i < cells; ++i) {
    const double er = b.x_real[i] * m[2 * i] - b.x_imag[i] * m[2 * i + 1];
    const double ei = b.x_real[i] * m[2 * i + 1] + b.x_imag[i] * m[2 * i];
    b.t_real[i] = er + 0.1 * gauss(rng);
    b.t_imag[i] = ei + 0.1 * gauss(rng);
  }
  return b;
}

}  // namespace

GradCheckResult gradient_check(const ModelConfig& cfg, std::uint64_t seed, int samples,
                               int batch, int frames, double h) {
  auto net = to_network<double>(init_weights(cfg, seed));
  std::mt19937_64 rng(seed ^ 0x6AD1ull);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  // Move biases and BN affine parameters off their init values so every
  // term of the gradient is exercised.
  for (auto& p : net.params()) {
    const bool shift = p.name.ends_with("bias") || p.name.ends_with(".beta") ||
                       p.name.find(".b_") != std::string::npos;
    if (shift) {
      for (auto& v : p.tensor->values()) v = 0.1 * u(rng);
    } else if (p.name.ends_with(".gamma")) {
      for (auto& v : p.tensor->values()) v = 1.0 + 0.2 * u(rng);
    }
  }
  auto params = net.params();
  std::vector<std::size_t> trainable;
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].trainable) trainable.push_back(i);
  }

  constexpr int kMaxRedraws = 20;
  constexpr int kMaxBatches = 10;
  GradCheckResult r;
  for (int draw = 0; draw < kMaxBatches; ++draw) {
    r = GradCheckResult{};
    r.batches = draw + 1;
    const Batch<double> b = make_check_batch(net, rng, batch, frames);
    Network<double> grads;
    Stage1Cache<double> c1;
    EncoderCache<double> c2;
    forward_backward_impl(net, b, &grads, true, &c1, &c2);
    const std::vector<bool> base_pattern = relu_pattern(c1, c2);
    auto gparams = grads.params();
    auto loss_at = [&](double& slot, double value, bool& smooth) {
      slot = value;
      Stage1Cache<double> p1;
      EncoderCache<double> p2;
      const double l = forward_backward_impl<double>(net, b, nullptr, true, &p1, &p2);
      smooth = smooth && relu_pattern(p1, p2) == base_pattern;
      return l;
    };

    bool stuck = false;
    const std::size_t start = rng() % trainable.size();
    for (int s = 0; s < samples && !stuck; ++s) {
      // Cycle through tensors so every layer is visited before any repeats.
      const std::size_t which = trainable[(start + s) % trainable.size()];
      Tensor<double>& p = *params[which].tensor;
      bool done = false;
      for (int attempt = 0; attempt < kMaxRedraws && !done; ++attempt) {
        const std::size_t idx = rng() % p.size();
        const double saved = p[idx];
        bool smooth = true;
        const double lp = loss_at(p[idx], saved + h, smooth);
        const double lm = loss_at(p[idx], saved - h, smooth);
        p[idx] = saved;
        if (!smooth) {
          ++r.redrawn;
          continue;
        }
        const double numeric = (lp - lm) / (2.0 * h);
        const double analytic = (*gparams[which].tensor)[idx];
        const double err = relative_error(analytic, numeric);
        ++r.checked;
        if (err >= r.max_rel_err) {
          r.max_rel_err = err;
          r.worst = params[which].name + "[" + std::to_string(idx) + "]";
        }
        done = true;
      }
      stuck = !done;
    }
    if (!stuck) return r;
  }
  throw GenerationError("gradient_check: no kink-free input found in " +
                        std::to_string(kMaxBatches) + " draws");
}

template struct AdamState<float>;
template struct AdamState<double>;
template Batch<float> make_batch(const std::vector<const TrainClip*>&, const ModelConfig&);
template Batch<double> make_batch(const std::vector<const TrainClip*>&, const ModelConfig&);
template double forward_backward(const Network<float>&, const Batch<float>&, Network<float>*,
                                 bool);
template double forward_backward(const Network<double>&, const Batch<double>&,
                                 Network<double>*, bool);
template StepResult train_step(Network<float>&, const Batch<float>&, AdamState<float>&, double);
template StepResult train_step(Network<double>&, const Batch<double>&, AdamState<double>&,
                               double);

}  // namespace wnr
