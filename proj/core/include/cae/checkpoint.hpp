#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "cae/autoencoder.hpp"
#include "cae/cle.hpp"

namespace cae {

// Binary layout (all integers little-endian):
//   "CAE1" | u16 version | u32 n | n bytes of JSON header |
//   parameters as f32 in declaration order | u32 CRC-32 of everything before.
inline constexpr std::uint16_t kCheckpointVersion = 1;

struct TrainingMetadata {
  std::size_t epochs_run = 0;
  double final_train_loss = 0.0;
  std::optional<double> final_val_loss;
  std::uint64_t seed = 0;

  bool operator==(const TrainingMetadata&) const = default;
};

struct Checkpoint {
  Autoencoder model;
  cle::EncodingConfig encoding;
  TrainingMetadata training;
  std::uint32_t crc = 0;
};

std::vector<std::uint8_t> serialize_checkpoint(Autoencoder& model, const cle::EncodingConfig& encoding,
                                               const TrainingMetadata& training);
Checkpoint deserialize_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const std::filesystem::path& path, Autoencoder& model, const cle::EncodingConfig& encoding,
                     const TrainingMetadata& training);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace cae
