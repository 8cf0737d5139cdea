#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "cae/analysis/similarity.hpp"
#include "cae/corpus.hpp"

namespace cae::synthetic {

// Non-semantic column families. Every generated column draws its own style
// (prefixes, lengths, formats) so columns of one family still differ.
enum class Family : std::uint8_t { IPv4, IsoDate, HexId, DecimalCode, PersonName, AlnumKey };

inline constexpr std::array kFamilies{Family::IPv4,        Family::IsoDate,    Family::HexId,
                                      Family::DecimalCode, Family::PersonName, Family::AlnumKey};

std::string_view to_string(Family f);

struct Options {
  std::size_t tables = 10;  // each table holds one column per family
  std::size_t min_rows = 20;
  std::size_t max_rows = 40;
  double perturb_fraction = 0.1;
  std::uint64_t seed = 0;
};

// Unlabeled corpus: `tables` tables named <prefix>/tNNN.
std::vector<corpus::Table> make_corpus(const Options& options, std::string_view prefix = "train");

struct TwinBenchmark {
  std::vector<corpus::Table> tables;  // originals <prefix>/aNN and twins <prefix>/bNN
  analysis::GroundTruthPairs pairs;   // original column -> twin column
  std::vector<std::string> family_of_query;

  std::vector<const corpus::Column*> columns() const;
};

// Each original table gets a twin whose rows are shuffled and whose cells are
// regenerated from the same column style with probability perturb_fraction
// (at least one cell per column).
TwinBenchmark make_twin_benchmark(const Options& options, std::string_view prefix = "bench");

// Writes each table as <root>/<table_id>.csv (RFC 4180 quoting).
void write_tables(const std::filesystem::path& root, const std::vector<corpus::Table>& tables);
std::string table_csv(const corpus::Table& table);

}  // namespace cae::synthetic
