// Copyright 2026 The windnr Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "wnr/cli.hpp"

using namespace wnr;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out, err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream o, e;
  Run r;
  r.code = run_cli(args, o, e);
  r.out = o.str();
  r.err = e.str();
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("wnr_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::vector<std::uint8_t> bytes(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

// Extraction model whose final projection is zero: the wind estimate
// vanishes and the output is the delayed input.
WeightStore silent_extractor() {
  auto net = to_network<double>(init_weights(ModelConfig::for_mode(Mode::kExtraction, 0.1), 4));
  net.stage2.pointwise.kernel.zero();
  net.stage2.pointwise.bias.zero();
  return from_network(net, 4);
}

}  // namespace

TEST_CASE("usage errors exit 2, help exits 0") {
  const auto missing = run({"enhance", "--in", "/nonexistent/in.wav", "--out", "/tmp/x.wav",
                            "--weights", "/nonexistent/w.wnlw"});
  CHECK(missing.code == kExitUsage);
  CHECK(missing.err.find("/nonexistent/") != std::string::npos);
  CHECK(run({"enhance", "--bogus"}).code == kExitUsage);
  CHECK(run({"frobnicate"}).code == kExitUsage);
  CHECK(run({"--help"}).code == kExitOk);
  for (const char* sub : {"enhance", "synth", "train", "eval", "bench", "param-count", "sweep-alpha"}) {
    const auto h = run({sub, "--help"});
    CHECK_MESSAGE(h.code == kExitOk, sub);
    CHECK(h.out.find("--") != std::string::npos);
  }
}

TEST_CASE("param-count at full size is within tolerance of the reference") {
  const auto r = run({"param-count"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("240099") != std::string::npos);
  CHECK(run({"param-count", "--scale", "0.25"}).code == kExitOk);
}

TEST_CASE("run configuration parsing") {
  const auto c = parse_run_config(R"({"model": {"mode": "extraction", "scale": 0.5},
                                      "train": {"lr0": 0.001, "epochs": 2},
                                      "paths": {"manifest": "m.jsonl"}})");
  CHECK(c.train.mode == Mode::kExtraction);
  CHECK(c.train.scale == 0.5);
  CHECK(c.train.lr0 == 0.001);
  CHECK(c.train.epochs == 2);
  CHECK_FALSE(c.alpha_set);
  CHECK(c.manifest == "m.jsonl");
  CHECK_THROWS_WITH_AS(parse_run_config(R"({"train": {"lr": 1}})"), doctest::Contains("train.lr"),
                       ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"train": {"epochs": "two"}})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("{not json"), ConfigError);
  CHECK_THROWS_AS(load_run_config("/nonexistent/run.json"), IoError);
}

TEST_CASE("enhance: offline and streaming outputs are byte-identical") {
  const auto dir = scratch("enhance");
  AudioBuffer x = synth_desired(9, 1.0, DesiredKind::kSpeechLike);
  x.samples.resize(16000 - 37);  // not a multiple of the hop
  write_wav(dir / "in.wav", x);
  save(silent_extractor(), dir / "w.wnlw");
  for (const char* prec : {"float32", "float64"}) {
    const std::string p = prec;
    REQUIRE(run({"enhance", "--in", (dir / "in.wav").string(), "--out", (dir / ("a" + p)).string(),
                 "--weights", (dir / "w.wnlw").string(), "--precision", p})
                .code == kExitOk);
    REQUIRE(run({"enhance", "--in", (dir / "in.wav").string(), "--out", (dir / ("b" + p)).string(),
                 "--weights", (dir / "w.wnlw").string(), "--precision", p, "--stream"})
                .code == kExitOk);
    CHECK(bytes(dir / ("a" + p)) == bytes(dir / ("b" + p)));
  }
  // A zero wind estimate leaves the input, delayed by the model latency.
  const AudioBuffer y = read_wav(dir / "afloat64");
  REQUIRE(y.size() == x.size());
  double worst = 0.0;
  for (std::size_t n = kLatencySamples; n < y.size(); ++n) {
    worst = std::max(worst, std::abs(y.samples[n] - x.samples[n - kLatencySamples]));
  }
  CHECK(worst < 1e-6);
  const auto r = run({"enhance", "--in", (dir / "in.wav").string(), "--out",
                      (dir / "c.wav").string(), "--weights", (dir / "w.wnlw").string(), "--mode",
                      "rejection"});
  CHECK(r.code == kExitOk);
  CHECK_FALSE(r.err.empty());
}

TEST_CASE("synth, eval with precomputed estimates, train and sweep") {
  const auto dir = scratch("pipeline");
  const auto data = dir / "data";
  REQUIRE(run({"synth", "--out", data.string(), "--train-files", "4", "--val-files", "2",
               "--test-files", "2", "--clip-seconds", "1", "--train-snrs", "0,5", "--eval-snrs", "0"})
              .code == kExitOk);
  const auto manifest = data / "manifest.jsonl";
  const auto m = DatasetManifest::read(manifest);
  CHECK(m.split("train").size() == 8);
  CHECK(m.split("val").size() == 2);
  CHECK(m.split("test").size() == 2);

  // Estimates equal to the desired stems score at the cap.
  const auto est = dir / "est";
  fs::create_directories(est);
  for (const auto& e : m.split("test")) {
    write_wav(est / fs::path(e.mixture).filename(), read_wav(m.resolve(e.desired)));
  }
  const auto ev = run({"eval", "--manifest", manifest.string(), "--estimates", est.string(),
                       "--latency", "0", "--json", (dir / "eval.json").string()});
  REQUIRE(ev.code == kExitOk);
  std::ifstream jf(dir / "eval.json");
  const auto j = nlohmann::json::parse(jf);
  CHECK(j["si_sdr_db"].get<double>() == doctest::Approx(100.0));

  const auto w = dir / "w.wnlw";
  const auto tr = run({"train", "--manifest", manifest.string(), "--out", w.string(), "--mode",
                       "extraction", "--scale", "0.1", "--epochs", "1", "--batch-size", "4",
                       "--history", (dir / "h.jsonl").string(), "--quiet"});
  REQUIRE(tr.code == kExitOk);
  CHECK(load(w).metadata.mode == Mode::kExtraction);
  CHECK(run({"eval", "--manifest", manifest.string(), "--weights", w.string()}).code == kExitOk);
  CHECK(run({"eval", "--manifest", manifest.string()}).code == kExitUsage);

  const auto sw = run({"sweep-alpha", "--manifest", manifest.string(), "--scale", "0.1", "--epochs",
                       "1", "--max-steps", "1", "--batch-size", "4", "--quiet", "--json",
                       (dir / "sweep.json").string()});
  REQUIRE(sw.code == kExitOk);
  std::ifstream sf(dir / "sweep.json");
  const auto s = nlohmann::json::parse(sf);
  CHECK(s["rows"].size() == 8);
  CHECK(run({"train", "--manifest", manifest.string(), "--out", w.string(), "--lr", "-1"}).code ==
        kExitUsage);
}

TEST_CASE("sweep result direction") {
  SweepResult r;
  r.mode = Mode::kRejection;
  for (double a : alpha_grid()) r.rows.push_back({a, a, 0.0, 0.0});
  CHECK(alpha_grid().size() == 8);
  CHECK(r.best_alpha() == doctest::Approx(0.3));
  CHECK(r.directional_finding_observed());
  r.mode = Mode::kExtraction;
  CHECK_FALSE(r.directional_finding_observed());
  CHECK(r.to_table().find("0.3") != std::string::npos);
}
