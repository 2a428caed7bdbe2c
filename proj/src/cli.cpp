// Copyright 2026 The windnr Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "wnr/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "wnr/bench.hpp"
#include "wnr/errors.hpp"
#include "wnr/metrics.hpp"

namespace wnr {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// --- RunConfig -------------------------------------------------------------

void reject_unknown(const json& obj, const std::string& where,
                    std::initializer_list<const char*> known) {
  if (!obj.is_object()) throw ConfigError("config: '" + where + "' must be an object");
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; })) {
      throw ConfigError("config: unknown key '" + (where.empty() ? key : where + "." + key) + "'");
    }
  }
}

template <typename V>
void read_key(const json& obj, const std::string& where, const char* key, V& dst) {
  if (!obj.contains(key)) return;
  try {
    dst = obj.at(key).get<V>();
  } catch (const json::exception&) {
    throw ConfigError("config: '" + where + "." + key + "' has the wrong type");
  }
}

void require_file(const fs::path& p, const char* what) {
  if (p.empty()) throw ConfigError(std::string("missing ") + what + " path");
  if (!fs::is_regular_file(p)) {
    throw IoError(std::string(what) + " file not found: " + p.string());
  }
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("not a number list: '" + s + "'");
    }
  }
  if (out.empty()) throw ConfigError("empty number list");
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write " + path.string());
  f << text;
  if (!f) throw IoError("write failed: " + path.string());
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

// --- enhance ---------------------------------------------------------------

template <typename T>
AudioBuffer enhance_with(const WeightStore& ws, Mode mode, const AudioBuffer& x, bool stream) {
  Network<T> net = to_network<T>(ws);
  net.config.mode = mode;
  if (!stream) return process(net, x);
  const std::size_t hop = static_cast<std::size_t>(net.config.stft.hop);
  StreamState<T> state(net.config);
  std::vector<double> in(hop), out(hop);
  AudioBuffer y;
  y.samples.reserve(x.size() + hop);
  for (std::size_t pos = 0; pos < x.size(); pos += hop) {
    const std::size_t n = std::min(hop, x.size() - pos);
    std::fill(in.begin(), in.end(), 0.0);
    std::copy_n(x.samples.begin() + static_cast<std::ptrdiff_t>(pos), n, in.begin());
    process_frame(net, in, out, state);
    y.samples.insert(y.samples.end(), out.begin(), out.begin() + static_cast<std::ptrdiff_t>(n));
  }
  return y;
}

struct EnhanceArgs {
  fs::path in, out, weights;
  std::string mode;
  bool stream = false;
  std::string precision = "float32";
  std::string format = "float32";
};

int cmd_enhance(const EnhanceArgs& a, std::ostream& out, std::ostream& err) {
  require_file(a.in, "input");
  require_file(a.weights, "weights");
  const Precision precision = parse_precision(a.precision);
  if (a.format != "float32" && a.format != "pcm16") {
    throw ConfigError("unknown --format '" + a.format + "' (expected float32 or pcm16)");
  }
  const WeightStore ws = load(a.weights);
  Mode mode = ws.metadata.mode;
  if (!a.mode.empty()) {
    const Mode requested = parse_mode(a.mode);
    if (requested != mode) {
      err << "warning: weights were trained for " << to_string(mode) << " mode; running "
          << to_string(requested) << " as requested\n";
    }
    mode = requested;
  }
  AudioBuffer x = read_wav(a.in);
  require_pipeline_audio(x);
  const AudioBuffer y = precision == Precision::kFloat32
                            ? enhance_with<float>(ws, mode, x, a.stream)
                            : enhance_with<double>(ws, mode, x, a.stream);
  write_wav(a.out, y, a.format == "pcm16" ? SampleFormat::kPcm16 : SampleFormat::kFloat32);
  out << "wrote " << a.out.string() << " (" << y.size() << " samples, " << to_string(mode)
      << ", " << (a.stream ? "streamed" : "offline") << ", " << to_string(precision)
      << ", latency " << kLatencySamples << " samples)\n";
  return kExitOk;
}

// --- synth -----------------------------------------------------------------

struct SynthArgs {
  fs::path out;
  fs::path corpus;
  int train_files = 80;
  int val_files = 6;
  int test_files = 12;
  double clip_seconds = 3.0;
  std::string train_snrs = "-10,-5,0,5,10";
  std::string eval_snrs = "-10,0,10";
  std::uint64_t seed = 0;
};

std::vector<fs::path> list_wavs(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("corpus directory not found: " + dir.string());
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".wav") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  if (out.empty()) throw ConfigError("no .wav files in " + dir.string());
  return out;
}

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  if (a.out.empty()) throw ConfigError("missing --out directory");
  if (a.train_files < 1 || a.val_files < 1 || a.test_files < 1) {
    throw ConfigError("file counts must be >= 1");
  }
  const auto train_snrs = parse_list(a.train_snrs);
  const auto eval_snrs = parse_list(a.eval_snrs);
  const double corpus_seconds = a.clip_seconds + 1.0;
  const std::uint64_t s = a.seed * 100;

  const auto train_corpus = a.corpus.empty()
                                ? write_desired_corpus(a.out / "corpus_train", a.train_files,
                                                       corpus_seconds, s + 11)
                                : list_wavs(a.corpus);
  const auto val_corpus =
      write_desired_corpus(a.out / "corpus_val", a.val_files, corpus_seconds, s + 22);
  const auto test_corpus =
      write_desired_corpus(a.out / "corpus_test", a.test_files, corpus_seconds, s + 33);

  WindGenParams gen;
  DatasetOptions opts;
  opts.clip_seconds = a.clip_seconds;
  auto split = [&](const std::vector<fs::path>& corpus, const std::vector<double>& snrs,
                   const char* name, std::uint64_t offset) {
    gen.seed = s + offset;
    opts.split = name;
    return build_dataset(corpus, gen, snrs, a.out / "data", opts);
  };
  DatasetManifest m = split(train_corpus, train_snrs, "train", 5);
  m.append(split(val_corpus, eval_snrs, "val", 6));
  m.append(split(test_corpus, eval_snrs, "test", 7));
  m.write(a.out / "manifest.jsonl");
  for (const char* name : {"train", "val", "test"}) {
    out << name << ": " << m.split(name).size() << " clips\n";
  }
  out << "manifest: " << (a.out / "manifest.jsonl").string() << "\n";
  return kExitOk;
}

// --- train -----------------------------------------------------------------

struct TrainArgs {
  fs::path config, manifest, out, history, checkpoint;
  std::string mode;
  std::optional<double> alpha, scale, lr, decay_factor;
  std::optional<int> epochs, decay_epochs, batch_size, max_steps;
  std::optional<std::uint64_t> seed;
  bool grad_check = false;
  bool quiet = false;
};

int cmd_train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  RunConfig rc = a.config.empty() ? RunConfig{} : load_run_config(a.config);
  TrainConfig& c = rc.train;
  if (!a.mode.empty()) {
    c.mode = parse_mode(a.mode);
    if (!rc.alpha_set && !a.alpha) c.alpha = default_alpha(c.mode);
  }
  if (a.alpha) c.alpha = *a.alpha;
  if (a.scale) c.scale = *a.scale;
  if (a.lr) c.lr0 = *a.lr;
  if (a.decay_factor) c.decay_factor = *a.decay_factor;
  if (a.epochs) c.epochs = *a.epochs;
  if (a.decay_epochs) c.decay_epochs = *a.decay_epochs;
  if (a.batch_size) c.batch_size = *a.batch_size;
  if (a.max_steps) c.max_steps_per_epoch = *a.max_steps;
  if (a.seed) c.seed = *a.seed;
  if (a.grad_check) c.grad_check = true;
  if (!a.manifest.empty()) rc.manifest = a.manifest;
  if (!a.out.empty()) rc.weights = a.out;
  if (!a.history.empty()) c.history_path = a.history;
  if (!a.checkpoint.empty()) c.checkpoint_path = a.checkpoint;
  c.verbose = !a.quiet;
  c.validate();
  require_file(rc.manifest, "manifest");
  if (rc.weights.empty()) throw ConfigError("missing output weights path (--out)");

  if (c.grad_check) {
    const GradCheckResult g = gradient_check(c.model_config(), c.seed);
    out << "grad check: " << g.checked << " samples, max rel err " << g.max_rel_err << " at "
        << g.worst << "\n";
    if (!(g.max_rel_err <= 1e-4)) {
      err << "error: gradient check failed\n";
      return kExitRuntime;
    }
  }
  const DatasetManifest m = DatasetManifest::read(rc.manifest);
  const FitResult r = fit(m, c);
  save(r.weights, rc.weights);
  const EpochRecord& best = r.history.at(static_cast<std::size_t>(r.best_epoch));
  out << "best epoch " << best.epoch << ": val loss " << best.val_loss << ", val SI-SDR "
      << fmt("%.2f", best.val_si_sdr_db) << " dB\n";
  out << "wrote " << rc.weights.string() << " (" << param_count(r.weights) << " parameters)\n";
  return kExitOk;
}

// --- eval ------------------------------------------------------------------

struct EvalArgs {
  fs::path manifest, weights, json_out, estimates;
  std::string split = "test";
  std::string mode;
  std::string precision = "float32";
  std::optional<int> latency;
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  require_file(a.manifest, "manifest");
  const DatasetManifest m = DatasetManifest::read(a.manifest);
  EvalReport rep;
  if (!a.estimates.empty()) {
    // Precomputed estimates named after the mixture file.
    if (!fs::is_directory(a.estimates)) {
      throw IoError("estimates directory not found: " + a.estimates.string());
    }
    const std::size_t latency = static_cast<std::size_t>(a.latency.value_or(0));
    const auto entries = m.split(a.split);
    if (entries.empty()) throw DatasetError("split '" + a.split + "' is empty");
    for (const auto& e : entries) {
      const AudioBuffer x = read_wav(m.resolve(e.mixture));
      const AudioBuffer d = read_wav(m.resolve(e.desired));
      const AudioBuffer w = read_wav(m.resolve(e.wind));
      const AudioBuffer y = read_wav(a.estimates / fs::path(e.mixture).filename());
      rep.files.push_back(score_file(e.mixture, e.snr_db, x, d, w, y, latency));
    }
  } else {
    require_file(a.weights, "weights");
    if (a.latency && *a.latency != kLatencySamples) {
      throw ConfigError("--latency only applies with --estimates");
    }
    const WeightStore ws = load(a.weights);
    std::optional<Mode> mode;
    if (!a.mode.empty()) mode = parse_mode(a.mode);
    rep = evaluate(m, a.split, ws, mode, parse_precision(a.precision));
  }
  out << rep.to_text();
  if (!a.json_out.empty()) write_text(a.json_out, rep.to_json() + "\n");
  return kExitOk;
}

// --- bench / param-count ---------------------------------------------------

struct BenchArgs {
  fs::path weights, json_out;
  double scale = 1.0;
  std::uint64_t seed = 0;
  double seconds = 10.0;
  int reps = 11;
  int warmup = 2;
  std::string precision = "float32";
};

WeightStore weights_or_init(const fs::path& path, double scale, std::uint64_t seed) {
  if (!path.empty()) {
    require_file(path, "weights");
    return load(path);
  }
  return init_weights(ModelConfig::for_mode(Mode::kRejection, scale), seed);
}

int cmd_bench(const BenchArgs& a, std::ostream& out, std::ostream& err) {
  const Precision precision = parse_precision(a.precision);
  const WeightStore ws = weights_or_init(a.weights, a.scale, a.seed);
  const ModelConfig cfg = ws.metadata.model_config();
  const std::uint64_t analytic = count_macs(cfg);
  const std::uint64_t counted = instrumented_macs_per_frame(to_network<double>(ws));
  out << "MACs per frame by layer:\n";
  for (const auto& l : mac_breakdown(cfg)) {
    out << "  " << std::left << std::setw(14) << l.name << l.count << "\n";
  }
  out << "analytic " << analytic << ", instrumented " << counted
      << (analytic == counted ? " (match)" : " (MISMATCH)") << "\n\n";
  const ComplexityReport r = measure_rtf(ws, a.seconds, a.reps, a.warmup, precision);
  out << r.to_table();
  if (!a.json_out.empty()) write_text(a.json_out, r.to_json() + "\n");
  if (analytic != counted) {
    err << "error: analytic and instrumented MAC counts differ\n";
    return kExitRuntime;
  }
  return kExitOk;
}

struct ParamCountArgs {
  fs::path weights;
  double scale = 1.0;
};

int cmd_param_count(const ParamCountArgs& a, std::ostream& out, std::ostream& err) {
  ModelConfig cfg = ModelConfig::for_mode(Mode::kRejection, a.scale);
  std::int64_t total = 0;
  if (!a.weights.empty()) {
    require_file(a.weights, "weights");
    const WeightStore ws = load(a.weights);
    cfg = ws.metadata.model_config();
    total = param_count(ws);
  }
  std::int64_t sum = 0;
  for (const auto& l : param_breakdown(cfg)) {
    out << "  " << std::left << std::setw(14) << l.name << l.count << "\n";
    sum += static_cast<std::int64_t>(l.count);
  }
  if (a.weights.empty()) total = sum;
  const double dev = static_cast<double>(total - kReferenceParams) / kReferenceParams;
  out << "total " << total << " (scale " << cfg.scale << ")\n";
  if (std::abs(cfg.scale - 1.0) > 1e-12) {
    out << "reference " << kReferenceParams << " applies to scale 1 only\n";
    return kExitOk;
  }
  out << "reference " << kReferenceParams << ", deviation " << fmt("%+.2f", 100.0 * dev)
      << "%\n";
  if (std::abs(dev) > 0.05) {
    err << "error: parameter count is outside +-5% of the reference\n";
    return kExitRuntime;
  }
  return kExitOk;
}

// --- sweep-alpha -----------------------------------------------------------

struct SweepArgs {
  fs::path config, manifest, json_out, table_out;
  std::optional<std::string> mode;
  std::string split = "test";
  std::string alphas;
  std::optional<double> scale, lr, decay_factor;
  std::optional<int> epochs, decay_epochs, batch_size, max_steps;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

int cmd_sweep_alpha(const SweepArgs& a, std::ostream& out) {
  RunConfig rc = a.config.empty() ? RunConfig{} : load_run_config(a.config);
  TrainConfig& c = rc.train;
  if (a.mode) {
    c.mode = parse_mode(*a.mode);
    if (!rc.alpha_set) c.alpha = default_alpha(c.mode);
  }
  if (a.scale) c.scale = *a.scale;
  if (a.lr) c.lr0 = *a.lr;
  if (a.decay_factor) c.decay_factor = *a.decay_factor;
  if (a.epochs) c.epochs = *a.epochs;
  if (a.decay_epochs) c.decay_epochs = *a.decay_epochs;
  if (a.batch_size) c.batch_size = *a.batch_size;
  if (a.max_steps) c.max_steps_per_epoch = *a.max_steps;
  if (a.seed) c.seed = *a.seed;
  c.history_path.clear();
  c.checkpoint_path.clear();
  c.validate();
  if (!a.manifest.empty()) rc.manifest = a.manifest;
  require_file(rc.manifest, "manifest");
  const auto alphas = a.alphas.empty() ? alpha_grid() : parse_list(a.alphas);
  const DatasetManifest m = DatasetManifest::read(rc.manifest);
  const SweepResult r = sweep_alpha(m, c, alphas, a.split, a.quiet ? nullptr : &out);
  out << r.to_table();
  if (!a.table_out.empty()) write_text(a.table_out, r.to_table());
  if (!a.json_out.empty()) write_text(a.json_out, r.to_json() + "\n");
  return kExitOk;
}

int exit_code_for(const Error& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ParameterError*>(&e) ||
      dynamic_cast<const IoError*>(&e) || dynamic_cast<const ConfigMismatchError*>(&e)) {
    return kExitUsage;
  }
  return kExitRuntime;
}

}  // namespace

// --- public ----------------------------------------------------------------

RunConfig parse_run_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  reject_unknown(j, "", {"model", "train", "paths"});
  RunConfig rc;
  TrainConfig& c = rc.train;
  if (j.contains("model")) {
    const json& mj = j["model"];
    reject_unknown(mj, "model", {"mode", "alpha", "scale"});
    std::string mode;
    read_key(mj, "model", "mode", mode);
    if (!mode.empty()) {
      try {
        c.mode = parse_mode(mode);
      } catch (const ParameterError&) {
        throw ConfigError("config: 'model.mode' must be rejection or extraction");
      }
      c.alpha = default_alpha(c.mode);
    }
    rc.alpha_set = mj.contains("alpha");
    read_key(mj, "model", "alpha", c.alpha);
    read_key(mj, "model", "scale", c.scale);
  }
  if (j.contains("train")) {
    const json& tj = j["train"];
    reject_unknown(tj, "train",
                   {"lr0", "decay_epochs", "decay_factor", "batch_size", "epochs", "seed",
                    "max_steps_per_epoch", "grad_check"});
    read_key(tj, "train", "lr0", c.lr0);
    read_key(tj, "train", "decay_epochs", c.decay_epochs);
    read_key(tj, "train", "decay_factor", c.decay_factor);
    read_key(tj, "train", "batch_size", c.batch_size);
    read_key(tj, "train", "epochs", c.epochs);
    read_key(tj, "train", "seed", c.seed);
    read_key(tj, "train", "max_steps_per_epoch", c.max_steps_per_epoch);
    read_key(tj, "train", "grad_check", c.grad_check);
  }
  if (j.contains("paths")) {
    const json& pj = j["paths"];
    reject_unknown(pj, "paths", {"manifest", "weights", "history", "checkpoint"});
    std::string s;
    auto path = [&](const char* key, fs::path& dst) {
      s.clear();
      read_key(pj, "paths", key, s);
      if (!s.empty()) dst = s;
    };
    path("manifest", rc.manifest);
    path("weights", rc.weights);
    path("history", c.history_path);
    path("checkpoint", c.checkpoint_path);
  }
  c.validate();
  return rc;
}

RunConfig load_run_config(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("config file not found: " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_run_config(ss.str());
}

std::vector<double> alpha_grid() {
  std::vector<double> g;
  for (int i = 3; i <= 10; ++i) g.push_back(i / 10.0);
  return g;
}

double SweepResult::best_alpha() const {
  if (rows.empty()) throw Error("empty sweep");
  return std::min_element(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
           return a.leakage < b.leakage;
         })->alpha;
}

bool SweepResult::directional_finding_observed() const {
  // "Near" = within 0.2 of the expected end of the 0.3..1.0 grid.
  const double best = best_alpha();
  return mode == Mode::kRejection ? best <= 0.5 + 1e-9 : best >= 0.8 - 1e-9;
}

std::string SweepResult::to_table() const {
  std::ostringstream o;
  o << "mode " << to_string(mode) << "\n";
  o << "alpha   leakage    si_sdr_db  val_loss\n";
  for (const auto& r : rows) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%-7.1f %-10.4f %-10.2f %.5g\n", r.alpha, r.leakage,
                  r.si_sdr_db, r.val_loss);
    o << buf;
  }
  if (!rows.empty()) {
    o << "best alpha (lowest leakage): " << fmt("%.1f", best_alpha()) << "\n";
    o << "expected: " << (mode == Mode::kRejection ? "near 0.3" : "near 1.0") << "; "
      << (directional_finding_observed() ? "observed" : "not observed") << "\n";
  }
  return o.str();
}

std::string SweepResult::to_json() const {
  json rj = json::array();
  for (const auto& r : rows) {
    rj.push_back({{"alpha", r.alpha},
                  {"leakage", r.leakage},
                  {"si_sdr_db", r.si_sdr_db},
                  {"val_loss", r.val_loss}});
  }
  json j{{"mode", to_string(mode)}, {"rows", rj}};
  if (!rows.empty()) {
    j["best_alpha"] = best_alpha();
    j["directional_finding_observed"] = directional_finding_observed();
  }
  return j.dump(2);
}

EvalReport evaluate(const DatasetManifest& manifest, const std::string& split,
                    const WeightStore& weights, std::optional<Mode> mode_override,
                    Precision precision) {
  const auto entries = manifest.split(split);
  if (entries.empty()) throw DatasetError("split '" + split + "' is empty");
  EvalReport rep;
  auto run = [&](auto net) {
    if (mode_override) net.config.mode = *mode_override;
    for (const auto& e : entries) {
      const AudioBuffer x = read_wav(manifest.resolve(e.mixture));
      const AudioBuffer d = read_wav(manifest.resolve(e.desired));
      const AudioBuffer w = read_wav(manifest.resolve(e.wind));
      const AudioBuffer y = process(net, x);
      rep.files.push_back(score_file(e.mixture, e.snr_db, x, d, w, y, kLatencySamples));
    }
  };
  if (precision == Precision::kFloat32) {
    run(to_network<float>(weights));
  } else {
    run(to_network<double>(weights));
  }
  return rep;
}

SweepResult sweep_alpha(const DatasetManifest& manifest, const TrainConfig& base,
                        const std::vector<double>& alphas, const std::string& eval_split,
                        std::ostream* log) {
  if (alphas.empty()) throw ParameterError("sweep_alpha: empty alpha list");
  const auto train = load_split(manifest, "train", base.mode);
  const auto val = load_split(manifest, "val", base.mode);
  SweepResult result;
  result.mode = base.mode;
  for (double alpha : alphas) {
    TrainConfig c = base;
    c.alpha = alpha;
    c.verbose = false;
    const FitResult f = fit(train, val, c);
    const EvalReport rep = evaluate(manifest, eval_split, f.weights);
    SweepRow row{alpha, rep.mean_leakage_out(), rep.mean_si_sdr_out(),
                 f.history.at(static_cast<std::size_t>(f.best_epoch)).val_loss};
    result.rows.push_back(row);
    if (log) {
      *log << "alpha " << fmt("%.1f", alpha) << ": leakage " << fmt("%.4f", row.leakage)
           << ", SI-SDR " << fmt("%.2f", row.si_sdr_db) << " dB" << std::endl;
    }
  }
  return result;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"windnr: streaming wind-noise reduction", "windnr"};
  app.require_subcommand(1);

  EnhanceArgs ea;
  auto* enhance = app.add_subcommand("enhance", "Remove wind noise from a 16 kHz mono WAV file");
  enhance->add_option("--in", ea.in, "Input WAV")->required();
  enhance->add_option("--out", ea.out, "Output WAV")->required();
  enhance->add_option("--weights", ea.weights, "WNLW weights file")->required();
  enhance->add_option("--mode", ea.mode, "Override the mode stored in the weights");
  enhance->add_flag("--stream", ea.stream, "Process hop-size chunks through the streaming path");
  enhance->add_option("--precision", ea.precision, "float32 or float64")->capture_default_str();
  enhance->add_option("--format", ea.format, "Output sample format: float32 or pcm16")
      ->capture_default_str();

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic wind-noise dataset");
  synth->add_option("--out", sa.out, "Output directory")->required();
  synth->add_option("--corpus", sa.corpus, "Directory of desired WAVs for the train split");
  synth->add_option("--train-files", sa.train_files)->capture_default_str();
  synth->add_option("--val-files", sa.val_files)->capture_default_str();
  synth->add_option("--test-files", sa.test_files)->capture_default_str();
  synth->add_option("--clip-seconds", sa.clip_seconds)->capture_default_str();
  synth->add_option("--train-snrs", sa.train_snrs, "Comma-separated SNRs in dB")
      ->capture_default_str();
  synth->add_option("--eval-snrs", sa.eval_snrs, "SNRs for val and test")->capture_default_str();
  synth->add_option("--seed", sa.seed)->capture_default_str();

  TrainArgs ta;
  auto* train = app.add_subcommand("train", "Train a model on a dataset manifest");
  train->add_option("--config", ta.config, "JSON run configuration (flags win)");
  train->add_option("--manifest", ta.manifest, "Dataset manifest (JSONL)");
  train->add_option("--out", ta.out, "Output weights file");
  train->add_option("--history", ta.history, "Per-epoch JSONL history");
  train->add_option("--checkpoint", ta.checkpoint, "Best-so-far weights, rewritten each epoch");
  train->add_option("--mode", ta.mode, "rejection or extraction");
  train->add_option("--alpha", ta.alpha, "Compression exponent");
  train->add_option("--scale", ta.scale, "Width multiplier");
  train->add_option("--lr", ta.lr, "Initial learning rate");
  train->add_option("--decay-epochs", ta.decay_epochs);
  train->add_option("--decay-factor", ta.decay_factor);
  train->add_option("--epochs", ta.epochs);
  train->add_option("--batch-size", ta.batch_size);
  train->add_option("--max-steps", ta.max_steps, "Steps per epoch cap (0 = all)");
  train->add_option("--seed", ta.seed);
  train->add_flag("--grad-check", ta.grad_check, "Run a gradient check before training");
  train->add_flag("--quiet", ta.quiet, "No per-epoch log");

  EvalArgs va;
  auto* eval = app.add_subcommand("eval", "Score a model on a dataset split");
  eval->add_option("--manifest", va.manifest)->required();
  eval->add_option("--weights", va.weights);
  eval->add_option("--split", va.split)->capture_default_str();
  eval->add_option("--mode", va.mode, "Override the mode stored in the weights");
  eval->add_option("--precision", va.precision)->capture_default_str();
  eval->add_option("--json", va.json_out, "Write the report as JSON");
  eval->add_option("--estimates", va.estimates,
                   "Score precomputed estimates (named like the mixtures) instead of a model");
  eval->add_option("--latency", va.latency, "Estimate delay in samples for --estimates");

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "Parameter, MAC and real-time-factor report");
  bench->add_option("--weights", ba.weights, "Weights to time (default: random init)");
  bench->add_option("--scale", ba.scale)->capture_default_str();
  bench->add_option("--seed", ba.seed)->capture_default_str();
  bench->add_option("--seconds", ba.seconds, "Audio length per run")->capture_default_str();
  bench->add_option("--reps", ba.reps)->capture_default_str();
  bench->add_option("--warmup", ba.warmup)->capture_default_str();
  bench->add_option("--precision", ba.precision)->capture_default_str();
  bench->add_option("--json", ba.json_out);

  ParamCountArgs pa;
  auto* pcount = app.add_subcommand("param-count", "Trainable parameter count vs reference");
  pcount->add_option("--scale", pa.scale)->capture_default_str();
  pcount->add_option("--weights", pa.weights, "Count a weights file instead");

  SweepArgs wa;
  auto* sweep = app.add_subcommand("sweep-alpha", "Train and score across the alpha grid");
  sweep->add_option("--config", wa.config, "JSON run configuration (flags win)");
  sweep->add_option("--manifest", wa.manifest);
  sweep->add_option("--mode", wa.mode, "rejection (default) or extraction");
  sweep->add_option("--split", wa.split, "Split scored per alpha")->capture_default_str();
  sweep->add_option("--alphas", wa.alphas, "Comma-separated override of 0.3,...,1.0");
  sweep->add_option("--scale", wa.scale);
  sweep->add_option("--lr", wa.lr);
  sweep->add_option("--decay-epochs", wa.decay_epochs);
  sweep->add_option("--decay-factor", wa.decay_factor);
  sweep->add_option("--epochs", wa.epochs);
  sweep->add_option("--batch-size", wa.batch_size);
  sweep->add_option("--max-steps", wa.max_steps);
  sweep->add_option("--seed", wa.seed);
  sweep->add_option("--table", wa.table_out, "Write the table to a file");
  sweep->add_option("--json", wa.json_out);
  sweep->add_flag("--quiet", wa.quiet);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*enhance) return cmd_enhance(ea, out, err);
    if (*synth) return cmd_synth(sa, out);
    if (*train) return cmd_train(ta, out, err);
    if (*eval) return cmd_eval(va, out);
    if (*bench) return cmd_bench(ba, out, err);
    if (*pcount) return cmd_param_count(pa, out, err);
    if (*sweep) return cmd_sweep_alpha(wa, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace wnr
