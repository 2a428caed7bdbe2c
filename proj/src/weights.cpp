// Copyright 2026 The windnr Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "wnr/weights.hpp"

#include <zlib.h>

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include <random>

#include "json.hpp"
#include "wnr/errors.hpp"

namespace wnr {
namespace {

constexpr char kMagic[4] = {'W', 'N', 'L', 'W'};

class ByteWriter {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) {
    for (int i = 0; i < 2; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t>& data() { return out_; }

 private:
  std::vector<std::uint8_t> out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> b) : b_(b) {}

  void need(std::size_t n, const char* what) const {
    if (pos_ + n > b_.size()) {
      throw CorruptFileError(std::string("weights: truncated while reading ") + what);
    }
  }
  std::uint8_t u8(const char* what) {
    need(1, what);
    return b_[pos_++];
  }
  std::uint16_t u16(const char* what) {
    need(2, what);
    std::uint16_t v = static_cast<std::uint16_t>(b_[pos_] | (b_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }
  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | b_[pos_ + i];
    pos_ += 4;
    return v;
  }
  std::string str(std::size_t n, const char* what) {
    need(n, what);
    std::string s(reinterpret_cast<const char*>(b_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  std::size_t pos() const { return pos_; }

 private:
  std::span<const std::uint8_t> b_;
  std::size_t pos_ = 0;
};

std::uint32_t crc_of(std::span<const std::uint8_t> bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, bytes.data(), static_cast<uInt>(bytes.size()));
  return static_cast<std::uint32_t>(crc);
}

nlohmann::json metadata_json(const WeightMetadata& m) {
  return {{"format_version", m.format_version},
          {"mode", to_string(m.mode)},
          {"alpha", m.alpha},
          {"scale", m.scale},
          {"seed", m.seed}};
}

WeightMetadata parse_metadata(const std::string& text) {
  WeightMetadata m;
  try {
    const auto j = nlohmann::json::parse(text);
    m.format_version = j.at("format_version").get<std::uint32_t>();
    m.mode = parse_mode(j.at("mode").get<std::string>());
    m.alpha = j.at("alpha").get<double>();
    m.scale = j.at("scale").get<double>();
    m.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw CorruptFileError(std::string("weights: malformed metadata: ") + e.what());
  } catch (const ParameterError& e) {
    throw CorruptFileError(std::string("weights: malformed metadata: ") + e.what());
  }
  return m;
}

}  // namespace

ModelConfig WeightMetadata::model_config() const {
  ModelConfig cfg = ModelConfig::for_mode(mode, scale);
  cfg.alpha = alpha;
  return cfg;
}

const NamedTensor* WeightStore::find(const std::string& name) const {
  for (const auto& t : tensors_) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

void WeightStore::put(NamedTensor t) {
  if (t.values.size() != Tensor<float>::count(t.dims)) {
    throw ShapeError("weights: payload of " + t.name + " does not match dims " +
                     Tensor<float>::format_dims(t.dims));
  }
  for (auto& existing : tensors_) {
    if (existing.name == t.name) {
      existing = std::move(t);
      return;
    }
  }
  tensors_.push_back(std::move(t));
}

bool WeightStore::erase(const std::string& name) {
  auto it = std::find_if(tensors_.begin(), tensors_.end(),
                         [&](const NamedTensor& t) { return t.name == name; });
  if (it == tensors_.end()) return false;
  tensors_.erase(it);
  return true;
}

std::vector<std::uint8_t> serialize(const WeightStore& ws) {
  ByteWriter w;
  w.bytes(kMagic, 4);
  w.u32(ws.metadata.format_version);
  const std::string meta = metadata_json(ws.metadata).dump();
  w.u32(static_cast<std::uint32_t>(meta.size()));
  w.bytes(meta.data(), meta.size());
  w.u32(static_cast<std::uint32_t>(ws.size()));
  for (const auto& t : ws.tensors()) {
    if (t.name.size() > 0xFFFF) throw SchemaError("weights: tensor name too long");
    if (t.dims.size() > 0xFF) throw SchemaError("weights: tensor rank too large: " + t.name);
    w.u16(static_cast<std::uint16_t>(t.name.size()));
    w.bytes(t.name.data(), t.name.size());
    w.u8(static_cast<std::uint8_t>(t.dims.size()));
    for (int d : t.dims) w.u32(static_cast<std::uint32_t>(d));
    for (float v : t.values) w.u32(std::bit_cast<std::uint32_t>(v));
  }
  w.u32(crc_of(w.data()));
  return std::move(w.data());
}

WeightStore deserialize(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12) throw CorruptFileError("weights: file too short");
  if (!std::equal(kMagic, kMagic + 4, bytes.begin())) {
    throw CorruptFileError("weights: bad magic (not a WNLW file)");
  }
  const auto body = bytes.first(bytes.size() - 4);
  ByteReader tail(bytes.last(4));
  if (crc_of(body) != tail.u32("checksum")) {
    throw CorruptFileError("weights: CRC mismatch (file truncated or corrupted)");
  }

  ByteReader in(body);
  in.str(4, "magic");
  const std::uint32_t version = in.u32("version");
  if (version != kWeightFormatVersion) {
    throw CorruptFileError("weights: unsupported format version " + std::to_string(version));
  }
  const std::uint32_t meta_len = in.u32("metadata length");
  WeightStore ws;
  ws.metadata = parse_metadata(in.str(meta_len, "metadata"));
  if (ws.metadata.format_version != version) {
    throw CorruptFileError("weights: metadata version disagrees with header");
  }
  const std::uint32_t count = in.u32("tensor count");
  for (std::uint32_t i = 0; i < count; ++i) {
    NamedTensor t;
    t.name = in.str(in.u16("name length"), "tensor name");
    if (ws.find(t.name)) throw CorruptFileError("weights: duplicate tensor " + t.name);
    const int rank = in.u8("rank");
    std::size_t n = 1;
    for (int r = 0; r < rank; ++r) {
      const std::uint32_t d = in.u32("dims");
      if (d > (1u << 28)) throw CorruptFileError("weights: implausible dim in " + t.name);
      t.dims.push_back(static_cast<int>(d));
      n *= d;
      if (n > body.size()) throw CorruptFileError("weights: tensor " + t.name + " exceeds file");
    }
    in.need(n * 4, "tensor payload");
    t.values.resize(n);
    for (auto& v : t.values) v = std::bit_cast<float>(in.u32("tensor payload"));
    ws.put(std::move(t));
  }
  if (in.pos() != body.size()) throw CorruptFileError("weights: trailing bytes before CRC");
  validate_schema(ws);
  return ws;
}

void save(const WeightStore& ws, const std::filesystem::path& path) {
  const auto bytes = serialize(ws);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

WeightStore load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open weights file " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return deserialize(bytes);
}

void validate_schema(const WeightStore& ws) {
  ModelConfig cfg;
  try {
    cfg = ws.metadata.model_config();
    cfg.validate();
  } catch (const ConfigError& e) {
    throw SchemaError(std::string("weights: metadata describes an invalid model: ") + e.what());
  }
  auto reference = Network<float>::allocate(cfg);
  std::map<std::string, std::vector<int>> expected;
  for (const auto& p : reference.params()) expected.emplace(p.name, p.tensor->dims());
  for (const auto& t : ws.tensors()) {
    auto it = expected.find(t.name);
    if (it == expected.end()) throw SchemaError("weights: unknown tensor " + t.name);
    if (it->second != t.dims) {
      throw SchemaError("weights: tensor " + t.name + " has shape " +
                        Tensor<float>::format_dims(t.dims) + ", expected " +
                        Tensor<float>::format_dims(it->second));
    }
  }
  for (const auto& p : reference.params()) {
    if (!ws.find(p.name)) throw SchemaError("weights: missing tensor " + p.name);
  }
}

WeightStore init_weights(const ModelConfig& cfg, std::uint64_t seed) {
  auto net = Network<float>::allocate(cfg);
  std::mt19937_64 rng(seed);
  auto uniform = [&](Tensor<float>& t, double limit) {
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (auto& v : t.values()) v = static_cast<float>(dist(rng));
  };
  auto he = [&](nn::Conv<float>& c) {
    uniform(c.kernel, std::sqrt(6.0 / (c.taps() * c.in_channels())));
  };
  auto glorot = [&](Tensor<float>& t, int fan_in, int fan_out) {
    uniform(t, std::sqrt(6.0 / (fan_in + fan_out)));
  };
  auto orthogonal = [&](Tensor<float>& t) {
    const int n = t.dim(0);
    std::normal_distribution<double> dist(0.0, 1.0);
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) a(i, j) = dist(rng);
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    Eigen::MatrixXd q = qr.householderQ();
    const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j) {
      if (r(j, j) < 0) q.col(j) *= -1.0;
    }
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) t[static_cast<std::size_t>(i) * n + j] = static_cast<float>(q(i, j));
    }
  };

  for (Encoder<float>* enc : {&net.lf, &net.hf}) {
    for (auto& layer : enc->layers) he(layer.conv);
    he(enc->pointwise);
  }
  const int hid = net.gru.hidden_dim(), in = net.gru.input_dim();
  for (Tensor<float>* w : {&net.gru.W_z, &net.gru.W_r, &net.gru.W_h}) glorot(*w, in, hid);
  for (Tensor<float>* u : {&net.gru.U_z, &net.gru.U_r, &net.gru.U_h}) orthogonal(*u);
  glorot(net.fc.kernel, net.fc.kernel.dim(1), net.fc.kernel.dim(0));
  for (auto& layer : net.stage2.layers) he(layer.conv);
  glorot(net.stage2.pointwise.kernel, net.stage2.pointwise.in_channels(),
         net.stage2.pointwise.out_channels());
  return from_network(net, seed);
}

std::int64_t param_count(const WeightStore& ws) {
  const auto expected = Network<float>::allocate(ws.metadata.model_config());
  std::string missing;
  for (const auto& p : expected.params()) {
    if (ws.find(p.name) == nullptr) missing += (missing.empty() ? "" : ", ") + p.name;
  }
  if (!missing.empty()) throw IncompleteWeightsError("missing tensors: " + missing);
  std::int64_t total = 0;
  for (const auto& t : ws.tensors()) {
    const bool running = t.name.ends_with(".running_mean") || t.name.ends_with(".running_var");
    if (!running) total += static_cast<std::int64_t>(t.values.size());
  }
  return total;
}

void check_compatible(const WeightStore& ws, const ModelConfig& expected, bool allow_override) {
  const auto& m = ws.metadata;
  if (m.scale != expected.scale) {
    throw ConfigMismatchError("weights were built for scale " + std::to_string(m.scale) +
                              ", the model expects " + std::to_string(expected.scale));
  }
  if (allow_override) return;
  if (m.mode != expected.mode) {
    throw ConfigMismatchError("weights were trained for " + to_string(m.mode) +
                              " mode, requested " + to_string(expected.mode));
  }
  if (m.alpha != expected.alpha) {
    throw ConfigMismatchError("weights were trained with alpha " + std::to_string(m.alpha) +
                              ", requested " + std::to_string(expected.alpha));
  }
}

template <typename T>
Network<T> to_network(const WeightStore& ws) {
  validate_schema(ws);
  auto net = Network<T>::allocate(ws.metadata.model_config());
  for (auto& p : net.params()) {
    const NamedTensor* t = ws.find(p.name);
    std::transform(t->values.begin(), t->values.end(), p.tensor->data(),
                   [](float v) { return static_cast<T>(v); });
  }
  return net;
}

template <typename T>
WeightStore from_network(const Network<T>& net, std::uint64_t seed) {
  WeightStore ws;
  ws.metadata.mode = net.config.mode;
  ws.metadata.alpha = net.config.alpha;
  ws.metadata.scale = net.config.scale;
  ws.metadata.seed = seed;
  for (const auto& p : net.params()) {
    NamedTensor t;
    t.name = p.name;
    t.dims = p.tensor->dims();
    t.values.resize(p.tensor->size());
    std::transform(p.tensor->data(), p.tensor->data() + p.tensor->size(), t.values.begin(),
                   [](T v) { return static_cast<float>(v); });
    ws.put(std::move(t));
  }
  return ws;
}

template Network<float> to_network(const WeightStore&);
template Network<double> to_network(const WeightStore&);
template WeightStore from_network(const Network<float>&, std::uint64_t);
template WeightStore from_network(const Network<double>&, std::uint64_t);

}  // namespace wnr
