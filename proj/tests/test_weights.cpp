// Copyright 2026 The windnr Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <zlib.h>

#include <cmath>
#include <cstring>
#include <random>

#include "doctest.h"
#include "wnr/weights.hpp"

using namespace wnr;

namespace {

std::uint32_t u32_at(const std::vector<std::uint8_t>& b, std::size_t off) {
  return static_cast<std::uint32_t>(b[off]) | static_cast<std::uint32_t>(b[off + 1]) << 8 |
         static_cast<std::uint32_t>(b[off + 2]) << 16 | static_cast<std::uint32_t>(b[off + 3]) << 24;
}

void put_u32(std::vector<std::uint8_t>& b, std::size_t off, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b[off + i] = static_cast<std::uint8_t>(v >> (8 * i));
}

// Rewrites the trailing CRC so only the deliberate edit is wrong.
void reseal(std::vector<std::uint8_t>& b) {
  const auto crc = crc32(0L, b.data(), static_cast<uInt>(b.size() - 4));
  put_u32(b, b.size() - 4, static_cast<std::uint32_t>(crc));
}

WeightStore small_store(std::uint64_t seed = 1) {
  return init_weights(ModelConfig::for_mode(Mode::kRejection, 0.25), seed);
}

}  // namespace

TEST_SUITE("container") {
  TEST_CASE("round trip is byte-identical") {
    const auto ws = small_store(3);
    const auto bytes = serialize(ws);
    const auto back = deserialize(bytes);
    CHECK(serialize(back) == bytes);
    CHECK(back.size() == ws.size());
    CHECK(back.metadata.scale == ws.metadata.scale);
    CHECK(back.metadata.seed == 3);
    for (std::size_t i = 0; i < ws.size(); ++i) {
      CHECK(back.tensors()[i].name == ws.tensors()[i].name);
      CHECK(std::memcmp(back.tensors()[i].values.data(), ws.tensors()[i].values.data(),
                        4 * ws.tensors()[i].values.size()) == 0);
    }
    const auto path = std::filesystem::temp_directory_path() / "wnr_test_roundtrip.wnlw";
    save(ws, path);
    CHECK(serialize(load(path)) == bytes);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load(path), IoError);
  }

  TEST_CASE("header, little-endian fields and trailing CRC") {
    const auto b = serialize(small_store());
    CHECK(std::string(b.begin(), b.begin() + 4) == "WNLW");
    CHECK(u32_at(b, 4) == kWeightFormatVersion);
    const std::uint32_t meta_len = u32_at(b, 8);
    const std::string meta(b.begin() + 12, b.begin() + 12 + meta_len);
    CHECK(meta.find("\"mode\"") != std::string::npos);
    CHECK(meta.find("\"scale\"") != std::string::npos);
    CHECK(u32_at(b, 12 + meta_len) == small_store().size());
    CHECK(u32_at(b, b.size() - 4) == crc32(0L, b.data(), static_cast<uInt>(b.size() - 4)));
  }

  TEST_CASE("every truncation is a corrupt-file error") {
    const auto b = serialize(small_store());
    for (std::size_t cut = 0; cut < b.size(); cut += (cut < 64 ? 1 : 211)) {
      std::vector<std::uint8_t> t(b.begin(), b.begin() + static_cast<std::ptrdiff_t>(cut));
      CHECK_THROWS_AS(deserialize(t), CorruptFileError);
    }
  }

  TEST_CASE("bit flips are typed errors") {
    const auto b = serialize(small_store());
    std::mt19937_64 rng(5);
    for (int i = 0; i < 300; ++i) {
      auto t = b;
      t[rng() % t.size()] ^= static_cast<std::uint8_t>(1u << (rng() % 8));
      CHECK_THROWS_AS(deserialize(t), CorruptFileError);
    }
  }

  TEST_CASE("bad magic and version") {
    auto b = serialize(small_store());
    auto m = b;
    m[0] = 'X';
    reseal(m);
    CHECK_THROWS_AS(deserialize(m), CorruptFileError);
    put_u32(b, 4, 2);
    reseal(b);
    CHECK_THROWS_WITH_AS(deserialize(b), doctest::Contains("version"), CorruptFileError);
  }

  TEST_CASE("resealed framing damage is still caught") {
    auto b = serialize(small_store());
    auto grow = b;
    grow.insert(grow.end() - 4, {1, 2, 3});
    reseal(grow);
    CHECK_THROWS_AS(deserialize(grow), CorruptFileError);
    const std::uint32_t meta_len = u32_at(b, 8);
    auto count = b;
    put_u32(count, 12 + meta_len, 100000);
    reseal(count);
    CHECK_THROWS_AS(deserialize(count), CorruptFileError);
    auto json = b;
    json[12] = '[';
    reseal(json);
    CHECK_THROWS_AS(deserialize(json), CorruptFileError);
  }
}

TEST_SUITE("schema") {
  TEST_CASE("missing tensor is named") {
    auto ws = small_store();
    REQUIRE(ws.erase("gru.W_z"));
    CHECK_THROWS_WITH_AS(deserialize(serialize(ws)), doctest::Contains("gru.W_z"), SchemaError);
    CHECK_THROWS_WITH_AS(validate_schema(ws), doctest::Contains("gru.W_z"), SchemaError);
  }

  TEST_CASE("unknown and misshapen tensors") {
    auto ws = small_store();
    ws.put({"gru.W_q", {2}, {1.0f, 2.0f}});
    CHECK_THROWS_WITH_AS(deserialize(serialize(ws)), doctest::Contains("gru.W_q"), SchemaError);
    ws = small_store();
    ws.put({"fc.bias", {256}, std::vector<float>(256)});
    CHECK_THROWS_WITH_AS(deserialize(serialize(ws)), doctest::Contains("fc.bias"), SchemaError);
  }

  TEST_CASE("metadata describing another architecture is rejected") {
    auto ws = small_store();
    ws.metadata.scale = 1.0;
    CHECK_THROWS_AS(deserialize(serialize(ws)), SchemaError);
  }

  TEST_CASE("put checks the payload size") {
    WeightStore ws;
    CHECK_THROWS_AS(ws.put({"x", {2, 3}, std::vector<float>(5)}), ShapeError);
  }

  TEST_CASE("compatibility with a requested configuration") {
    const auto ws = small_store();
    auto want = ModelConfig::for_mode(Mode::kRejection, 0.25);
    CHECK_NOTHROW(check_compatible(ws, want, false));
    want.mode = Mode::kExtraction;
    CHECK_THROWS_AS(check_compatible(ws, want, false), ConfigMismatchError);
    CHECK_NOTHROW(check_compatible(ws, want, true));
    want = ModelConfig::for_mode(Mode::kRejection, 0.25);
    want.alpha = 0.5;
    CHECK_THROWS_AS(check_compatible(ws, want, false), ConfigMismatchError);
    want = ModelConfig::for_mode(Mode::kRejection, 0.5);
    CHECK_THROWS_AS(check_compatible(ws, want, true), ConfigMismatchError);
  }
}

TEST_SUITE("init") {
  TEST_CASE("seeded determinism") {
    CHECK(serialize(small_store(9)) == serialize(small_store(9)));
    const auto a = small_store(9), b = small_store(10);
    CHECK(a.find("lf.conv1.kernel")->values != b.find("lf.conv1.kernel")->values);
    CHECK(a.find("gru.U_h")->values != b.find("gru.U_h")->values);
  }

  TEST_CASE("biases zero, BN (0, 1), gamma one") {
    const auto ws = small_store();
    for (const auto& t : ws.tensors()) {
      const bool zero = t.name.ends_with(".bias") || t.name.ends_with(".beta") ||
                        t.name.ends_with(".running_mean") || t.name.starts_with("gru.b_");
      const bool one = t.name.ends_with(".gamma") || t.name.ends_with(".running_var");
      for (float v : t.values) {
        if (zero) REQUIRE(v == 0.0f);
        if (one) REQUIRE(v == 1.0f);
      }
    }
  }

  TEST_CASE("He-uniform conv bounds") {
    const auto ws = init_weights(ModelConfig{}, 2);
    for (const char* name : {"lf.conv1.kernel", "lf.conv4.kernel", "hf.conv2.kernel"}) {
      const auto* t = ws.find(name);
      REQUIRE(t != nullptr);
      const double bound = std::sqrt(6.0 / (t->dims[0] * t->dims[1]));
      float top = 0;
      for (float v : t->values) {
        CHECK(std::abs(v) <= bound);
        top = std::max(top, std::abs(v));
      }
      CHECK(top > 0.9 * bound);
    }
  }

  TEST_CASE("recurrent kernels are orthogonal") {
    const auto ws = init_weights(ModelConfig{}, 3);
    for (const char* name : {"gru.U_z", "gru.U_r", "gru.U_h"}) {
      const auto* t = ws.find(name);
      const int h = t->dims[0];
      double worst = 0;
      for (int i = 0; i < h; ++i)
        for (int j = 0; j < h; ++j) {
          double s = 0;
          for (int k = 0; k < h; ++k) s += double(t->values[i * h + k]) * t->values[j * h + k];
          worst = std::max(worst, std::abs(s - (i == j ? 1.0 : 0.0)));
        }
      CHECK(worst < 1e-5);
    }
  }

  TEST_CASE("parameter count from the store") {
    const auto full = init_weights(ModelConfig{}, 4);
    CHECK(param_count(full) == 240099);
    CHECK(std::abs(param_count(full) - 249000) <= 0.05 * 249000);
    CHECK(param_count(small_store()) < param_count(full));
    CHECK(param_count(full) == to_network<float>(full).param_count());
    auto partial = full;
    partial.erase("gru.W_z");
    partial.erase("fc.bias");
    CHECK_THROWS_WITH_AS(param_count(partial), doctest::Contains("gru.W_z, fc.bias"),
                         IncompleteWeightsError);
  }

  TEST_CASE("network conversion round trip") {
    const auto ws = small_store(6);
    const auto net = to_network<double>(ws);
    CHECK(serialize(from_network(net, 6)) == serialize(ws));
    const auto netf = to_network<float>(ws);
    CHECK(serialize(from_network(netf, 6)) == serialize(ws));
  }
}
