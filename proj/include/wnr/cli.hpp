// Copyright 2026 The windnr Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wnr/bench.hpp"
#include "wnr/metrics.hpp"
#include "wnr/trainer.hpp"

namespace wnr {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

// JSON run configuration:
//   {
//     "model": {"mode": "rejection", "alpha": 0.3, "scale": 0.25},
//     "train": {"lr0": 4e-4, "decay_epochs": 3, "decay_factor": 10,
//               "batch_size": 8, "epochs": 6, "seed": 0,
//               "max_steps_per_epoch": 0, "grad_check": false},
//     "paths": {"manifest": "...", "weights": "...", "history": "...",
//               "checkpoint": "..."}
//   }
// Every section and key is optional; unknown keys are a ConfigError that
// names the offending path.
struct RunConfig {
  TrainConfig train;
  bool alpha_set = false;
  std::filesystem::path manifest;
  std::filesystem::path weights;
};

RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::filesystem::path& path);

// Row of the alpha sweep.
struct SweepRow {
  double alpha = 0.0;
  double leakage = 0.0;
  double si_sdr_db = 0.0;
  double val_loss = 0.0;
};

struct SweepResult {
  Mode mode = Mode::kRejection;
  std::vector<SweepRow> rows;
  double best_alpha() const;  // lowest (most negative) leakage
  // Rejection should favour the low end of the grid, extraction the high end.
  bool directional_finding_observed() const;
  std::string to_table() const;
  std::string to_json() const;
};

// The alpha grid 0.3, 0.4, ..., 1.0.
std::vector<double> alpha_grid();

// Trains one model per alpha on the manifest's train/val splits and scores
// it on `eval_split`.
SweepResult sweep_alpha(const DatasetManifest& manifest, const TrainConfig& base,
                        const std::vector<double>& alphas, const std::string& eval_split,
                        std::ostream* log = nullptr);

// Scores `net` on every entry of `split`.
EvalReport evaluate(const DatasetManifest& manifest, const std::string& split,
                    const WeightStore& weights, std::optional<Mode> mode_override = {},
                    Precision precision = Precision::kFloat32);

// Full command-line surface; args excludes the program name. Returns the
// process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wnr
