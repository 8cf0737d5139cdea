#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cae/autoencoder.hpp"
#include "cae/cle.hpp"

namespace cae::analysis {

struct Provenance {
  std::string checkpoint_id;  // e.g. checkpoint CRC as hex, or "bow"
  cle::EncodingConfig encoding;
};

// column_id -> k-dimensional vector, iterated in ascending column_id order.
class EmbeddingStore {
 public:
  explicit EmbeddingStore(std::size_t dim = 0) : dim_(dim) {}

  void add(std::string column_id, std::vector<float> values);
  void add(const LatentEmbedding& e) { add(e.column_id, e.values); }

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  bool contains(const std::string& id) const { return entries_.contains(id); }
  const std::vector<float>& at(const std::string& id) const;

  const std::map<std::string, std::vector<float>>& entries() const { return entries_; }
  std::vector<std::string> ids() const;

  // Row-major [size, dim] in id order (double precision for analysis).
  std::vector<double> matrix() const;

  Provenance provenance;

 private:
  std::size_t dim_;
  std::map<std::string, std::vector<float>> entries_;
};

// "EMB1" | u32 k | records { u32 id length, id bytes, k x f32 }, little-endian.
std::vector<std::uint8_t> serialize_store(const EmbeddingStore& store);
EmbeddingStore deserialize_store(std::span<const std::uint8_t> bytes);
void save_store(const std::filesystem::path& path, const EmbeddingStore& store);
EmbeddingStore load_store(const std::filesystem::path& path);

EmbeddingStore make_store(std::span<const LatentEmbedding> embeddings, Provenance provenance = {});

}  // namespace cae::analysis
