#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cae/corpus.hpp"

namespace cae::cle {

inline constexpr std::size_t kBits = 8;

// How per-entry encodings are aggregated into one column matrix.
enum class Mode : std::uint8_t {
  Concatenated = 0,  // entry character streams joined in row order, cut at L
  Alternative = 1,   // elementwise mean of all per-entry encodings
};

std::string_view to_string(Mode m);
Mode mode_from_string(std::string_view s);

struct EncodingConfig {
  std::size_t cutoff = 250;
  Mode mode = Mode::Alternative;

  void validate() const;
  bool operator==(const EncodingConfig&) const = default;
};

// Big-endian 8-bit expansion: bit j = floor(c / 2^(7-j)) mod 2.
std::array<std::uint8_t, kBits> encode_char(unsigned code_point);

// L x 8 binary matrix, one row per character position, zero rows are padding.
struct EntryMatrix {
  std::size_t cutoff = 0;
  std::size_t encoded_rows = 0;
  std::vector<std::uint8_t> bits;  // row-major [cutoff][8]

  std::uint8_t at(std::size_t pos, std::size_t bit) const { return bits[pos * kBits + bit]; }
};

EntryMatrix encode_entry(std::string_view entry, std::size_t cutoff);

// 8 x L real matrix M; values[bit * L + pos].
struct ColumnMatrix {
  std::string column_id;
  EncodingConfig config;
  std::vector<float> values;

  std::size_t cutoff() const { return config.cutoff; }
  float at(std::size_t bit, std::size_t pos) const { return values[bit * config.cutoff + pos]; }
};

ColumnMatrix encode_column_concatenated(const corpus::Column& column, const EncodingConfig& config);
ColumnMatrix encode_column_alternative(const corpus::Column& column, const EncodingConfig& config);

// Dispatches on config.mode.
ColumnMatrix encode_column(const corpus::Column& column, const EncodingConfig& config);

std::vector<ColumnMatrix> encode_columns(std::span<const corpus::Column* const> columns, const EncodingConfig& config);

// "CLE1" cache container.
void write_encoded(const std::filesystem::path& path, std::span<const ColumnMatrix> matrices);
std::vector<ColumnMatrix> read_encoded(const std::filesystem::path& path);
std::vector<std::uint8_t> serialize_encoded(std::span<const ColumnMatrix> matrices);
std::vector<ColumnMatrix> deserialize_encoded(std::span<const std::uint8_t> bytes);

}  // namespace cae::cle
