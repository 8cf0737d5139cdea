#include "cae/synthetic.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>

#include "cae/binary_io.hpp"
#include "cae/error.hpp"
#include "cae/random.hpp"

namespace cae::synthetic {

namespace {

constexpr std::string_view kLower = "abcdefghijklmnopqrstuvwxyz";
constexpr std::string_view kUpper = "ABCDEFGHIJKLMNOPQRSTUVWXYZ";
constexpr std::string_view kDigits = "0123456789";
constexpr std::string_view kHexLower = "0123456789abcdef";
constexpr std::string_view kHexUpper = "0123456789ABCDEF";

char pick(Rng& rng, std::string_view alphabet) { return alphabet[rng.uniform_index(alphabet.size())]; }

std::size_t between(Rng& rng, std::size_t lo, std::size_t hi) { return lo + rng.uniform_index(hi - lo + 1); }

std::string word(Rng& rng, std::size_t syllables) {
  static constexpr std::array<std::string_view, 24> kSyl{"an", "ber", "cal", "da", "el", "fin", "gar", "ha",
                                                        "is", "jo", "ka", "lin", "mar", "no", "ol", "pe",
                                                        "qu", "ro", "sa", "ti", "ul", "ve", "wen", "zo"};
  std::string s;
  for (std::size_t i = 0; i < syllables; ++i) s += kSyl[rng.uniform_index(kSyl.size())];
  s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

// Column-level style; cell() draws one value.
struct Style {
  Family family{};
  // shared knobs, meaning depends on family
  std::vector<int> fixed;
  std::size_t length = 0;
  std::size_t variant = 0;
  std::string prefix;
  std::string pattern;
  std::vector<std::string> first_names, last_names;
  int lo = 0, hi = 0;
};

Style make_style(Family f, Rng& rng) {
  Style s;
  s.family = f;
  switch (f) {
    case Family::IPv4: {
      const std::size_t fixed = between(rng, 1, 3);
      s.fixed = {static_cast<int>(between(rng, 1, 223))};
      for (std::size_t i = 1; i < fixed; ++i) s.fixed.push_back(static_cast<int>(between(rng, 0, 255)));
      s.lo = static_cast<int>(between(rng, 0, 200));
      s.hi = s.lo + static_cast<int>(between(rng, 5, 55));
      break;
    }
    case Family::IsoDate:
      s.lo = static_cast<int>(between(rng, 1950, 2022));
      s.hi = s.lo + static_cast<int>(between(rng, 0, 3));
      s.variant = between(rng, 0, 3);
      break;
    case Family::HexId: {
      static constexpr std::array<std::size_t, 6> kLens{6, 8, 12, 16, 24, 32};
      static constexpr std::array<std::string_view, 5> kPrefixes{"", "0x", "#", "id-", "sha:"};
      s.length = kLens[rng.uniform_index(kLens.size())];
      s.variant = rng.uniform_index(2);  // case
      s.prefix = kPrefixes[rng.uniform_index(kPrefixes.size())];
      break;
    }
    case Family::DecimalCode: {
      s.length = between(rng, 4, 12);
      s.variant = rng.uniform_index(3);  // 0 plain, 1 dash groups of 3, 2 dash groups of 4
      const std::size_t fixed = between(rng, 0, 3);
      for (std::size_t i = 0; i < fixed; ++i) s.prefix.push_back(pick(rng, kDigits));
      if (rng.bernoulli(0.2)) s.prefix = "+" + s.prefix;
      break;
    }
    case Family::PersonName: {
      s.variant = rng.uniform_index(4);
      const std::size_t pool = between(rng, 8, 16);
      for (std::size_t i = 0; i < pool; ++i) {
        s.first_names.push_back(word(rng, between(rng, 2, 3)));
        s.last_names.push_back(word(rng, between(rng, 2, 4)));
      }
      break;
    }
    case Family::AlnumKey: {
      static constexpr std::array<std::string_view, 8> kPrefixes{"", "", "INV", "SKU", "PO", "REF", "K", "ORD"};
      s.prefix = kPrefixes[rng.uniform_index(kPrefixes.size())];
      const std::size_t n = between(rng, 4, 9);
      for (std::size_t i = 0; i < n; ++i) {
        const double u = rng.uniform01();
        s.pattern.push_back(u < 0.45 ? 'L' : (u < 0.9 ? 'D' : '-'));
      }
      s.variant = rng.uniform_index(2);  // letter case
      break;
    }
  }
  return s;
}

std::string cell(const Style& s, Rng& rng) {
  switch (s.family) {
    case Family::IPv4: {
      std::string out;
      for (std::size_t i = 0; i < 4; ++i) {
        if (i) out += '.';
        if (i < s.fixed.size()) {
          out += std::to_string(s.fixed[i]);
        } else if (i == 3) {
          out += std::to_string(std::min(255, s.lo + static_cast<int>(rng.uniform_index(
                                                            static_cast<std::uint64_t>(s.hi - s.lo + 1)))));
        } else {
          out += std::to_string(rng.uniform_index(256));
        }
      }
      return out;
    }
    case Family::IsoDate: {
      const int year = s.lo + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(s.hi - s.lo + 1)));
      const int month = 1 + static_cast<int>(rng.uniform_index(12));
      const int day = 1 + static_cast<int>(rng.uniform_index(28));
      switch (s.variant) {
        case 0:
          return fmt::format("{:04d}-{:02d}-{:02d}", year, month, day);
        case 1:
          return fmt::format("{:04d}-{:02d}-{:02d}T{:02d}:{:02d}:{:02d}Z", year, month, day, rng.uniform_index(24),
                             rng.uniform_index(60), rng.uniform_index(60));
        case 2:
          return fmt::format("{:04d}-{:02d}-{:02d} {:02d}:{:02d}", year, month, day, rng.uniform_index(24),
                             rng.uniform_index(60));
        default:
          return fmt::format("{:04d}-{:02d}", year, month);
      }
    }
    case Family::HexId: {
      std::string out = s.prefix;
      for (std::size_t i = 0; i < s.length; ++i) out.push_back(pick(rng, s.variant ? kHexUpper : kHexLower));
      return out;
    }
    case Family::DecimalCode: {
      std::string digits;
      for (std::size_t i = 0; i < s.length; ++i) digits.push_back(pick(rng, kDigits));
      std::string out = s.prefix;
      const std::size_t group = s.variant == 1 ? 3 : (s.variant == 2 ? 4 : 0);
      for (std::size_t i = 0; i < digits.size(); ++i) {
        if (group && i && i % group == 0) out.push_back('-');
        out.push_back(digits[i]);
      }
      return out;
    }
    case Family::PersonName: {
      const auto& first = s.first_names[rng.uniform_index(s.first_names.size())];
      const auto& last = s.last_names[rng.uniform_index(s.last_names.size())];
      switch (s.variant) {
        case 0:
          return first + " " + last;
        case 1:
          return last + ", " + first;
        case 2:
          return std::string(1, first[0]) + ". " + last;
        default:
          return first + " " + pick(rng, kUpper) + ". " + last;
      }
    }
    case Family::AlnumKey: {
      std::string out = s.prefix.empty() ? "" : s.prefix + "-";
      for (char p : s.pattern) {
        if (p == 'L') {
          out.push_back(pick(rng, s.variant ? kLower : kUpper));
        } else if (p == 'D') {
          out.push_back(pick(rng, kDigits));
        } else {
          out.push_back('-');
        }
      }
      return out;
    }
  }
  return {};
}

struct GeneratedTable {
  corpus::Table table;
  std::vector<Style> styles;
};

GeneratedTable generate_table(std::string table_id, const Options& o, Rng& rng) {
  GeneratedTable g;
  g.table.table_id = std::move(table_id);
  const std::size_t rows = between(rng, o.min_rows, std::max(o.min_rows, o.max_rows));
  for (auto f : kFamilies) {
    g.styles.push_back(make_style(f, rng));
    const std::string name(to_string(f));
    g.table.column_names.push_back(name);
    corpus::Column col;
    col.column_id = g.table.table_id + "/" + name;
    for (std::size_t r = 0; r < rows; ++r) col.entries.push_back(cell(g.styles.back(), rng));
    g.table.columns.push_back(std::move(col));
  }
  return g;
}

}  // namespace

std::string_view to_string(Family f) {
  switch (f) {
    case Family::IPv4:
      return "ipv4";
    case Family::IsoDate:
      return "iso_date";
    case Family::HexId:
      return "hex_id";
    case Family::DecimalCode:
      return "decimal_code";
    case Family::PersonName:
      return "person_name";
    case Family::AlnumKey:
      return "alnum_key";
  }
  return "?";
}

std::vector<corpus::Table> make_corpus(const Options& o, std::string_view prefix) {
  Rng rng(o.seed);
  std::vector<corpus::Table> out;
  for (std::size_t t = 0; t < o.tables; ++t) {
    out.push_back(generate_table(fmt::format("{}/t{:03d}", prefix, t), o, rng).table);
  }
  return out;
}

std::vector<const corpus::Column*> TwinBenchmark::columns() const {
  std::vector<const corpus::Column*> out;
  for (const auto& t : tables)
    for (const auto& c : t.columns) out.push_back(&c);
  return out;
}

TwinBenchmark make_twin_benchmark(const Options& o, std::string_view prefix) {
  if (!(o.perturb_fraction >= 0.0 && o.perturb_fraction <= 1.0)) {
    throw InvalidArgument("perturbation fraction must lie in [0, 1]");
  }
  Rng rng(o.seed);
  TwinBenchmark bench;
  std::vector<corpus::Table> twins;
  for (std::size_t t = 0; t < o.tables; ++t) {
    auto g = generate_table(fmt::format("{}/a{:02d}", prefix, t), o, rng);
    corpus::Table twin;
    twin.table_id = fmt::format("{}/b{:02d}", prefix, t);
    twin.column_names = g.table.column_names;
    const std::size_t rows = g.table.row_count();
    const auto perm = rng.permutation(rows);
    const auto n_perturb =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(o.perturb_fraction * static_cast<double>(rows))));
    for (std::size_t c = 0; c < g.table.columns.size(); ++c) {
      corpus::Column col;
      col.column_id = twin.table_id + "/" + twin.column_names[c];
      for (std::size_t r = 0; r < rows; ++r) col.entries.push_back(g.table.columns[c].entries[perm[r]]);
      const auto which = rng.permutation(rows);
      for (std::size_t i = 0; i < std::min(n_perturb, rows); ++i) col.entries[which[i]] = cell(g.styles[c], rng);
      bench.pairs.pairs.emplace_back(g.table.columns[c].column_id, col.column_id);
      bench.family_of_query.emplace_back(to_string(g.styles[c].family));
      twin.columns.push_back(std::move(col));
    }
    bench.tables.push_back(std::move(g.table));
    twins.push_back(std::move(twin));
  }
  for (auto& t : twins) bench.tables.push_back(std::move(t));
  return bench;
}

std::string table_csv(const corpus::Table& table) {
  auto quote = [](const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + "\"";
  };
  std::string out;
  for (std::size_t c = 0; c < table.column_names.size(); ++c) out += (c ? "," : "") + quote(table.column_names[c]);
  out += "\n";
  for (std::size_t r = 0; r < table.row_count(); ++r) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) out += (c ? "," : "") + quote(table.columns[c].entries[r]);
    out += "\n";
  }
  return out;
}

void write_tables(const std::filesystem::path& root, const std::vector<corpus::Table>& tables) {
  for (const auto& t : tables) {
    auto path = root / (t.table_id + ".csv");
    std::filesystem::create_directories(path.parent_path());
    io::write_text_file(path, table_csv(t));
  }
}

}  // namespace cae::synthetic
