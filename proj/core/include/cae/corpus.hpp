#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace cae::corpus {

// One table column. Entries hold sanitized text with exactly one byte per
// character: each byte is a code point in [0, 255].
struct Column {
  std::string column_id;
  std::vector<std::string> entries;
};

struct Table {
  std::string table_id;
  std::vector<std::string> column_names;
  std::vector<Column> columns;

  std::size_t row_count() const { return columns.empty() ? 0 : columns.front().entries.size(); }
};

// Parse one delimited text file. The first record is the header. Quoted fields
// follow RFC 4180 (doubled quotes, embedded delimiters and newlines).
Table load_table(const std::filesystem::path& path, char delimiter, std::string table_id);

// Same as load_table, reading from an in-memory UTF-8 buffer.
Table parse_table(std::string_view text, char delimiter, std::string table_id);

// Replace every character outside extended ASCII (code point > 255) and every
// malformed UTF-8 sequence with NUL. Input and output are UTF-8; idempotent.
std::string sanitize(std::string_view utf8);

// Convert sanitized UTF-8 to one byte per character. Throws if a code point
// above 255 is present (sanitize must run first).
std::string to_char_codes(std::string_view sanitized_utf8);

// Total character count over every entry of the column.
std::size_t column_text_length(const Column& column);

struct Corpus {
  std::filesystem::path root;
  std::vector<std::filesystem::path> files;  // parallel to tables
  std::vector<Table> tables;                 // sorted by table_id

  std::size_t column_count() const;
  std::vector<const Column*> columns() const;
  const Column* find_column(std::string_view column_id) const;
};

// Loads every delimited file under root (recursively). ".csv" files are used
// for ',' and ".tsv" for '\t'; any other delimiter accepts both extensions.
// Table ids are the root-relative path without extension, '/'-separated.
// When `rejected` is given, files that fail to parse are skipped and listed
// there as "<path>: <reason>" instead of aborting the load.
Corpus load_corpus(const std::filesystem::path& root, char delimiter, std::vector<std::string>* rejected = nullptr);

// Table id for a file below root, e.g. root/201-csv/14.csv -> "201-csv/14".
std::string table_id_for(const std::filesystem::path& root, const std::filesystem::path& file);

enum class Split : std::uint8_t { Train, Val, Test };

std::string_view to_string(Split s);
Split split_from_string(std::string_view s);

struct SplitRatios {
  double train = 0.7;
  double val = 0.2;
  double test = 0.1;

  std::array<double, 3> as_array() const { return {train, val, test}; }
};

struct TableEntry {
  std::string path;
  std::string table_id;
};

struct CorpusManifest {
  std::string root;
  std::vector<TableEntry> tables;
  std::size_t total_columns = 0;
  std::map<std::string, Split> splits;
  std::uint64_t seed = 0;
  SplitRatios ratios;

  std::vector<std::string> columns_in(Split s) const;
};

CorpusManifest make_manifest(const Corpus& corpus);

// Shuffle column ids with a seeded permutation and cut by ratio (largest
// remainder rounding). Ratios must sum to 1 within 1e-9.
CorpusManifest split_corpus(const CorpusManifest& manifest, const SplitRatios& ratios, std::uint64_t seed);

// Bucket sizes used by split_corpus for n columns.
std::array<std::size_t, 3> split_sizes(std::size_t n, const SplitRatios& ratios);

nlohmann::ordered_json manifest_to_json(const CorpusManifest& manifest);
CorpusManifest manifest_from_json(const nlohmann::ordered_json& j);

struct LengthStats {
  std::size_t count = 0;
  double mean = 0.0;
  double std_dev = 0.0;  // sample standard deviation (n - 1)
  double variance = 0.0;
  std::size_t min = 0;
  std::size_t max = 0;
  std::map<std::size_t, double> coverage_at;
};

LengthStats length_stats(const std::vector<std::size_t>& lengths, const std::vector<std::size_t>& cutoffs);
LengthStats length_stats(const Corpus& corpus, const std::vector<std::size_t>& cutoffs);

// Fraction of columns whose text length is at most cutoff.
double coverage_at_cutoff(const std::vector<std::size_t>& lengths, std::size_t cutoff);
double coverage_at_cutoff(const Corpus& corpus, std::size_t cutoff);

std::vector<std::size_t> column_lengths(const Corpus& corpus);

nlohmann::ordered_json stats_to_json(const LengthStats& stats);

}  // namespace cae::corpus
