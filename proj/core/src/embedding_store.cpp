#include "cae/analysis/embedding_store.hpp"

#include "cae/binary_io.hpp"
#include "cae/error.hpp"

namespace cae::analysis {

namespace {
constexpr std::string_view kMagic = "EMB1";
}

void EmbeddingStore::add(std::string column_id, std::vector<float> values) {
  if (dim_ == 0 && entries_.empty()) dim_ = values.size();
  if (values.size() != dim_) {
    throw ShapeError("embedding for " + column_id + " has dimension " + std::to_string(values.size()) +
                     ", store holds " + std::to_string(dim_));
  }
  if (entries_.contains(column_id)) throw InvalidArgument("duplicate column id in store: " + column_id);
  entries_.emplace(std::move(column_id), std::move(values));
}

const std::vector<float>& EmbeddingStore::at(const std::string& id) const {
  auto it = entries_.find(id);
  if (it == entries_.end()) throw InvalidArgument("column id not in store: " + id);
  return it->second;
}

std::vector<std::string> EmbeddingStore::ids() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& kv : entries_) out.push_back(kv.first);
  return out;
}

std::vector<double> EmbeddingStore::matrix() const {
  std::vector<double> out;
  out.reserve(entries_.size() * dim_);
  for (const auto& kv : entries_) out.insert(out.end(), kv.second.begin(), kv.second.end());
  return out;
}

std::vector<std::uint8_t> serialize_store(const EmbeddingStore& store) {
  io::ByteWriter w;
  w.bytes(kMagic);
  w.u32(static_cast<std::uint32_t>(store.dim()));
  for (const auto& [id, v] : store.entries()) {
    w.u32(static_cast<std::uint32_t>(id.size()));
    w.bytes(id);
    w.f32s(v);
  }
  return std::move(w.buffer());
}

EmbeddingStore deserialize_store(std::span<const std::uint8_t> bytes) {
  io::ByteReader r(bytes, "embedding store");
  if (r.remaining() < kMagic.size() || r.bytes(kMagic.size()) != kMagic) {
    throw FormatError("not an embedding store (bad magic)");
  }
  const std::size_t k = r.u32();
  EmbeddingStore store(k);
  while (!r.done()) {
    std::string id = r.bytes(r.u32());
    std::vector<float> v(k);
    r.f32s(v);
    store.add(std::move(id), std::move(v));
  }
  return store;
}

void save_store(const std::filesystem::path& path, const EmbeddingStore& store) {
  io::write_file(path, serialize_store(store));
}

EmbeddingStore load_store(const std::filesystem::path& path) { return deserialize_store(io::read_file(path)); }

EmbeddingStore make_store(std::span<const LatentEmbedding> embeddings, Provenance provenance) {
  EmbeddingStore store(embeddings.empty() ? 0 : embeddings.front().values.size());
  for (const auto& e : embeddings) store.add(e);
  store.provenance = std::move(provenance);
  return store;
}

}  // namespace cae::analysis
