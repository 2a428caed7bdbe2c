// Copyright 2026 The windnr Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "wnr/model.hpp"

namespace wnr {

inline constexpr std::uint32_t kWeightFormatVersion = 1;

struct WeightMetadata {
  Mode mode = Mode::kRejection;
  double alpha = 0.3;
  double scale = 1.0;
  std::uint64_t seed = 0;
  std::uint32_t format_version = kWeightFormatVersion;

  // The architecture these weights belong to.
  ModelConfig model_config() const;
};

struct NamedTensor {
  std::string name;
  std::vector<int> dims;
  std::vector<float> values;
};

// Ordered collection of f32 tensors plus the config snapshot they were made
// for. Order is preserved through save/load.
class WeightStore {
 public:
  WeightMetadata metadata;

  const std::vector<NamedTensor>& tensors() const { return tensors_; }
  const NamedTensor* find(const std::string& name) const;
  // Inserts or replaces; payload size must match dims (ShapeError).
  void put(NamedTensor t);
  bool erase(const std::string& name);
  std::size_t size() const { return tensors_.size(); }

 private:
  std::vector<NamedTensor> tensors_;
};

// Byte layout:
//   "WNLW" | u32 version | u32 len + JSON metadata | u32 count |
//   count x (u16 len + name | u8 rank | rank x u32 dim | f32 payload) |
//   u32 CRC-32 of everything before it.
// All integers and floats little-endian.
std::vector<std::uint8_t> serialize(const WeightStore& ws);
// CorruptFileError on framing problems, SchemaError when the tensor set or
// shapes do not match the architecture named in the metadata.
WeightStore deserialize(std::span<const std::uint8_t> bytes);

void save(const WeightStore& ws, const std::filesystem::path& path);  // IoError
WeightStore load(const std::filesystem::path& path);  // IoError + deserialize errors

// SchemaError naming the first unknown, missing or misshapen tensor.
void validate_schema(const WeightStore& ws);

// Seeded initialization: He-uniform convs, Glorot-uniform dense / GRU input /
// stage-2 projection, orthogonal GRU recurrent kernels, zero biases, BN
// gamma 1, beta 0, running statistics (0, 1).
WeightStore init_weights(const ModelConfig& cfg, std::uint64_t seed);

// Trainable scalars (BN running statistics excluded). IncompleteWeightsError
// lists every tensor the architecture needs but the store lacks.
std::int64_t param_count(const WeightStore& ws);

// Rejects weights built for a different architecture (ConfigMismatchError).
// Mode and alpha differences are errors unless allow_override is set.
void check_compatible(const WeightStore& ws, const ModelConfig& expected, bool allow_override);

template <typename T>
Network<T> to_network(const WeightStore& ws);

// Uses net.config for the metadata.
template <typename T>
WeightStore from_network(const Network<T>& net, std::uint64_t seed);

}  // namespace wnr
