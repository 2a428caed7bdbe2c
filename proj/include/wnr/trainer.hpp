// Copyright 2026 The windnr Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "wnr/audio.hpp"
#include "wnr/datagen.hpp"
#include "wnr/features.hpp"
#include "wnr/model.hpp"
#include "wnr/weights.hpp"

namespace wnr {

struct TrainConfig {
  double lr0 = 4e-4;
  // lr = lr0 / decay_factor^floor(epoch / decay_epochs)
  int decay_epochs = 3;
  double decay_factor = 10.0;
  int batch_size = 8;
  int epochs = 6;
  std::uint64_t seed = 0;
  Mode mode = Mode::kRejection;
  double alpha = 0.3;
  double scale = 0.25;
  bool grad_check = false;
  // 0 = whole split per epoch.
  int max_steps_per_epoch = 0;
  // Empty = no file output.
  std::filesystem::path history_path;
  std::filesystem::path checkpoint_path;
  bool verbose = false;

  ModelConfig model_config() const;
  void validate() const;  // ConfigError
};

double lr_at(int epoch, const TrainConfig& cfg);

// Mean over cells of (dRe^2 + dIm^2) / 2. ParameterError when the two sides
// use different alpha, ShapeError on a shape mismatch.
double loss(const CompressedSpectrogram& estimate, const CompressedSpectrogram& target);

template <typename T>
struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::int64_t step = 0;
  std::vector<Tensor<T>> m;  // one per trainable parameter, in params() order
  std::vector<Tensor<T>> v;

  static AdamState init(const Network<T>& net);
};

// One training clip as raw audio; features are derived per batch.
struct TrainClip {
  AudioBuffer mixture;
  AudioBuffer target;  // desired (rejection) or wind (extraction)
  AudioBuffer desired;
};

// Network inputs and loss targets for B clips of equal frame count, laid out
// with position index b * frames + t.
template <typename T>
struct Batch {
  int batch = 0;
  int frames = 0;
  Tensor<T> low, high;                // {B*T, L, 5}
  std::vector<T> cos_phase, sin_phase;  // {B*T, F}
  std::vector<T> x_real, x_imag;      // compressed mixture
  std::vector<T> t_real, t_imag;      // compressed target
};

template <typename T>
Batch<T> make_batch(const std::vector<const TrainClip*>& clips, const ModelConfig& cfg);

// Loss of `net` on `batch`; when `grads` is non-null it receives the full
// gradient (allocated like net, zeroed first). training selects batch
// statistics in BN. Running statistics are left untouched.
template <typename T>
double forward_backward(const Network<T>& net, const Batch<T>& batch, Network<T>* grads,
                        bool training);

struct StepResult {
  double loss = 0.0;
  double grad_norm = 0.0;
};

// Forward, backward, Adam update, then the BN running-statistics update.
// NonFiniteError names the first non-finite tensor.
template <typename T>
StepResult train_step(Network<T>& net, const Batch<T>& batch, AdamState<T>& adam, double lr);

struct EpochRecord {
  int epoch = 0;
  double lr = 0.0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_si_sdr_db = 0.0;
  double seconds = 0.0;
};

struct FitResult {
  WeightStore weights;  // best validation loss
  std::vector<EpochRecord> history;
  int best_epoch = -1;
};

// Loads a split into memory; DatasetError if it is empty.
std::vector<TrainClip> load_split(const DatasetManifest& manifest, const std::string& split,
                                  Mode mode);

FitResult fit(const DatasetManifest& manifest, const TrainConfig& cfg);
FitResult fit(const std::vector<TrainClip>& train, const std::vector<TrainClip>& val,
              const TrainConfig& cfg);

std::string to_json_line(const EpochRecord& r);

// |a - n| / max(|a|, |n|, 1e-6)
double relative_error(double analytic, double numeric);

struct GradCheckResult {
  int checked = 0;
  double max_rel_err = 0.0;
  std::string worst;  // "<tensor>[<index>]"
  // Samples whose +-h interval switched some ReLU on or off, where a finite
  // difference does not estimate the derivative; each was replaced by a
  // fresh index in the same tensor.
  int redrawn = 0;
  // Input batches drawn; a new one is taken when some tensor has no
  // kink-free index left (a ReLU input sitting at zero).
  int batches = 0;
};

// Central differences with step h on `samples` randomly chosen trainable
// scalars of a freshly initialized 64-bit network, random B x T features and
// targets close to the network's own estimate.
GradCheckResult gradient_check(const ModelConfig& cfg, std::uint64_t seed, int samples = 25,
                               int batch = 2, int frames = 6, double h = 1e-5);

}  // namespace wnr
