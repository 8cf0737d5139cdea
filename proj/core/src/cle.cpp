#include "cae/cle.hpp"

#include <algorithm>

#include "cae/binary_io.hpp"
#include "cae/error.hpp"

namespace cae::cle {

namespace {

constexpr std::string_view kMagic = "CLE1";

ColumnMatrix blank_matrix(const corpus::Column& column, const EncodingConfig& config) {
  config.validate();
  ColumnMatrix m;
  m.column_id = column.column_id;
  m.config = config;
  m.values.assign(kBits * config.cutoff, 0.0f);
  return m;
}

}  // namespace

std::string_view to_string(Mode m) { return m == Mode::Concatenated ? "concatenated" : "alternative"; }

Mode mode_from_string(std::string_view s) {
  if (s == "concatenated" || s == "concat") return Mode::Concatenated;
  if (s == "alternative" || s == "alt") return Mode::Alternative;
  throw InvalidArgument("unknown encoding mode '" + std::string(s) + "'");
}

void EncodingConfig::validate() const {
  if (cutoff < 1) throw InvalidArgument("encoding cutoff must be >= 1");
}

std::array<std::uint8_t, kBits> encode_char(unsigned code_point) {
  if (code_point > 255) {
    throw InvalidArgument("encode_char: code point " + std::to_string(code_point) + " is outside [0, 255]");
  }
  std::array<std::uint8_t, kBits> out{};
  for (std::size_t j = 0; j < kBits; ++j) out[j] = static_cast<std::uint8_t>((code_point >> (7 - j)) & 1u);
  return out;
}

EntryMatrix encode_entry(std::string_view entry, std::size_t cutoff) {
  EntryMatrix m;
  m.cutoff = cutoff;
  m.encoded_rows = std::min(entry.size(), cutoff);
  m.bits.assign(cutoff * kBits, 0);
  for (std::size_t i = 0; i < m.encoded_rows; ++i) {
    const auto bits = encode_char(static_cast<unsigned char>(entry[i]));
    std::copy(bits.begin(), bits.end(), m.bits.begin() + static_cast<std::ptrdiff_t>(i * kBits));
  }
  return m;
}

ColumnMatrix encode_column_concatenated(const corpus::Column& column, const EncodingConfig& config) {
  ColumnMatrix m = blank_matrix(column, config);
  const std::size_t L = config.cutoff;
  std::size_t pos = 0;
  for (const auto& entry : column.entries) {
    for (char ch : entry) {
      if (pos == L) return m;
      const auto bits = encode_char(static_cast<unsigned char>(ch));
      for (std::size_t b = 0; b < kBits; ++b) m.values[b * L + pos] = bits[b];
      ++pos;
    }
  }
  return m;
}

ColumnMatrix encode_column_alternative(const corpus::Column& column, const EncodingConfig& config) {
  if (column.entries.empty()) throw InvalidArgument("alternative encoding of zero-entry column " + column.column_id);
  ColumnMatrix m = blank_matrix(column, config);
  const std::size_t L = config.cutoff;

  // Integer bit counts make the mean independent of entry order.
  std::vector<std::uint32_t> counts(kBits * L, 0);
  for (const auto& entry : column.entries) {
    const std::size_t n = std::min(entry.size(), L);
    for (std::size_t pos = 0; pos < n; ++pos) {
      const auto c = static_cast<unsigned char>(entry[pos]);
      for (std::size_t b = 0; b < kBits; ++b) counts[b * L + pos] += (c >> (7 - b)) & 1u;
    }
  }
  const double inv = 1.0 / static_cast<double>(column.entries.size());
  for (std::size_t i = 0; i < counts.size(); ++i) m.values[i] = static_cast<float>(counts[i] * inv);
  return m;
}

ColumnMatrix encode_column(const corpus::Column& column, const EncodingConfig& config) {
  return config.mode == Mode::Concatenated ? encode_column_concatenated(column, config)
                                           : encode_column_alternative(column, config);
}

std::vector<ColumnMatrix> encode_columns(std::span<const corpus::Column* const> columns, const EncodingConfig& config) {
  std::vector<ColumnMatrix> out;
  out.reserve(columns.size());
  for (const auto* c : columns) out.push_back(encode_column(*c, config));
  return out;
}

std::vector<std::uint8_t> serialize_encoded(std::span<const ColumnMatrix> matrices) {
  io::ByteWriter w;
  w.bytes(kMagic);
  for (const auto& m : matrices) {
    if (m.values.size() != kBits * m.config.cutoff) throw ShapeError("column matrix size does not match 8*L");
    w.u32(static_cast<std::uint32_t>(m.column_id.size()));
    w.bytes(m.column_id);
    w.u8(static_cast<std::uint8_t>(m.config.mode));
    w.u32(static_cast<std::uint32_t>(m.config.cutoff));
    w.f32s(m.values);
  }
  return std::move(w.buffer());
}

std::vector<ColumnMatrix> deserialize_encoded(std::span<const std::uint8_t> bytes) {
  io::ByteReader r(bytes, "encoded corpus");
  if (r.remaining() < kMagic.size() || r.bytes(kMagic.size()) != kMagic) {
    throw FormatError("not an encoded corpus (bad magic)");
  }
  std::vector<ColumnMatrix> out;
  while (!r.done()) {
    ColumnMatrix m;
    m.column_id = r.bytes(r.u32());
    const auto mode = r.u8();
    if (mode > 1) throw FormatError("encoded corpus: unknown mode byte " + std::to_string(mode));
    m.config.mode = static_cast<Mode>(mode);
    m.config.cutoff = r.u32();
    m.config.validate();
    m.values.resize(kBits * m.config.cutoff);
    r.f32s(m.values);
    out.push_back(std::move(m));
  }
  return out;
}

void write_encoded(const std::filesystem::path& path, std::span<const ColumnMatrix> matrices) {
  io::write_file(path, serialize_encoded(matrices));
}

std::vector<ColumnMatrix> read_encoded(const std::filesystem::path& path) {
  return deserialize_encoded(io::read_file(path));
}

}  // namespace cae::cle
