#include "cae/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <unordered_map>

#include "cae/error.hpp"
#include "cae/random.hpp"

namespace cae::corpus {

namespace {

struct Record {
  std::vector<std::string> fields;
  std::size_t line = 0;
};

// RFC 4180 reader. Records that consist of a single empty field (blank lines)
// are dropped.
std::vector<Record> parse_records(std::string_view text, char delimiter) {
  std::vector<Record> records;
  Record current;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;
  current.line = 1;

  auto end_field = [&] {
    current.fields.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    const bool blank = current.fields.size() == 1 && current.fields.front().empty();
    if (!blank) records.push_back(std::move(current));
    current = Record{};
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    if (c == '"' && !field_started) {
      in_quotes = true;
      field_started = true;
    } else if (c == delimiter) {
      end_field();
    } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
      // handled by the following '\n'
    } else if (c == '\n' || c == '\r') {
      end_record();
      ++line;
      current.line = line;
    } else {
      field.push_back(c);
      field_started = true;
    }
  }
  if (in_quotes) throw FormatError("unterminated quoted field starting before line " + std::to_string(line));
  if (field_started || !field.empty() || !current.fields.empty()) end_record();
  return records;
}

std::vector<std::string> unique_column_ids(const std::string& table_id, const std::vector<std::string>& names) {
  std::vector<std::string> ids;
  std::unordered_map<std::string, int> seen;
  ids.reserve(names.size());
  for (std::size_t i = 0; i < names.size(); ++i) {
    std::string base = names[i].empty() ? "col" + std::to_string(i) : names[i];
    const int n = ++seen[base];
    if (n > 1) base += "#" + std::to_string(n);
    ids.push_back(table_id + "/" + base);
  }
  return ids;
}

// Decodes one UTF-8 sequence at text[i]. Returns the code point and advances
// i, or nullopt (advancing by one byte) for malformed input.
std::optional<char32_t> decode_one(std::string_view text, std::size_t& i) {
  const auto b0 = static_cast<unsigned char>(text[i]);
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  std::size_t len = 0;
  char32_t cp = 0;
  char32_t min = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
    min = 0x80;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
    min = 0x800;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
    min = 0x10000;
  } else {
    ++i;
    return std::nullopt;
  }
  if (i + len > text.size()) {
    ++i;
    return std::nullopt;
  }
  for (std::size_t k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(text[i + k]);
    if ((b & 0xC0) != 0x80) {
      ++i;
      return std::nullopt;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
    ++i;
    return std::nullopt;
  }
  i += len;
  return cp;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else {
    // Only code points <= 0xFF reach here after sanitizing.
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool accepts_extension(const std::filesystem::path& p, char delimiter) {
  const auto ext = p.extension().string();
  if (delimiter == ',') return ext == ".csv";
  if (delimiter == '\t') return ext == ".tsv";
  return ext == ".csv" || ext == ".tsv";
}

}  // namespace

Table parse_table(std::string_view text, char delimiter, std::string table_id) {
  auto records = parse_records(text, delimiter);
  if (records.empty()) throw FormatError("empty table: " + table_id);
  if (records.size() == 1) throw FormatError("empty table (header only): " + table_id);

  Table table;
  table.table_id = std::move(table_id);
  for (auto& name : records.front().fields) table.column_names.push_back(sanitize(name));
  const std::size_t width = table.column_names.size();

  const auto ids = unique_column_ids(table.table_id, table.column_names);
  table.columns.resize(width);
  for (std::size_t c = 0; c < width; ++c) {
    table.columns[c].column_id = ids[c];
    table.columns[c].entries.reserve(records.size() - 1);
  }
  for (std::size_t r = 1; r < records.size(); ++r) {
    auto& fields = records[r].fields;
    if (fields.size() != width) {
      throw FormatError("ragged row at line " + std::to_string(records[r].line) + " in " + table.table_id +
                        ": expected " + std::to_string(width) + " fields, found " + std::to_string(fields.size()));
    }
    for (std::size_t c = 0; c < width; ++c) {
      table.columns[c].entries.push_back(to_char_codes(sanitize(fields[c])));
    }
  }
  return table;
}

Table load_table(const std::filesystem::path& path, char delimiter, std::string table_id) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open table " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path.string());
  return parse_table(ss.str(), delimiter, std::move(table_id));
}

std::string sanitize(std::string_view utf8) {
  std::string out;
  out.reserve(utf8.size());
  std::size_t i = 0;
  while (i < utf8.size()) {
    const auto cp = decode_one(utf8, i);
    append_utf8(out, (cp && *cp <= 0xFF) ? *cp : U'\0');
  }
  return out;
}

std::string to_char_codes(std::string_view sanitized_utf8) {
  std::string out;
  out.reserve(sanitized_utf8.size());
  std::size_t i = 0;
  while (i < sanitized_utf8.size()) {
    const auto cp = decode_one(sanitized_utf8, i);
    if (!cp || *cp > 0xFF) throw InvalidArgument("to_char_codes: input is not sanitized");
    out.push_back(static_cast<char>(static_cast<unsigned char>(*cp)));
  }
  return out;
}

std::size_t column_text_length(const Column& column) {
  std::size_t n = 0;
  for (const auto& e : column.entries) n += e.size();
  return n;
}

std::size_t Corpus::column_count() const {
  std::size_t n = 0;
  for (const auto& t : tables) n += t.columns.size();
  return n;
}

std::vector<const Column*> Corpus::columns() const {
  std::vector<const Column*> out;
  out.reserve(column_count());
  for (const auto& t : tables)
    for (const auto& c : t.columns) out.push_back(&c);
  return out;
}

const Column* Corpus::find_column(std::string_view column_id) const {
  for (const auto& t : tables) {
    if (!column_id.starts_with(t.table_id)) continue;
    for (const auto& c : t.columns)
      if (c.column_id == column_id) return &c;
  }
  return nullptr;
}

std::string table_id_for(const std::filesystem::path& root, const std::filesystem::path& file) {
  auto rel = std::filesystem::relative(file, root);
  rel.replace_extension();
  return rel.generic_string();
}

Corpus load_corpus(const std::filesystem::path& root, char delimiter, std::vector<std::string>* rejected) {
  if (!std::filesystem::is_directory(root)) throw IoError("corpus root is not a directory: " + root.string());
  std::vector<std::pair<std::string, std::filesystem::path>> found;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(root)) {
    if (entry.is_regular_file() && accepts_extension(entry.path(), delimiter)) {
      found.emplace_back(table_id_for(root, entry.path()), entry.path());
    }
  }
  std::sort(found.begin(), found.end());
  for (std::size_t i = 1; i < found.size(); ++i) {
    if (found[i].first == found[i - 1].first) throw FormatError("duplicate table id " + found[i].first);
  }

  Corpus corpus;
  corpus.root = root;
  for (auto& [id, path] : found) {
    try {
      corpus.tables.push_back(load_table(path, delimiter, id));
    } catch (const FormatError& e) {
      if (!rejected) throw;
      rejected->push_back(path.string() + ": " + e.what());
      continue;
    }
    corpus.files.push_back(path);
  }
  if (corpus.tables.empty()) throw IoError("no table files found under " + root.string());
  return corpus;
}

std::string_view to_string(Split s) {
  switch (s) {
    case Split::Train:
      return "train";
    case Split::Val:
      return "val";
    case Split::Test:
      return "test";
  }
  return "?";
}

Split split_from_string(std::string_view s) {
  if (s == "train") return Split::Train;
  if (s == "val") return Split::Val;
  if (s == "test") return Split::Test;
  throw FormatError("unknown split name '" + std::string(s) + "'");
}

std::vector<std::string> CorpusManifest::columns_in(Split s) const {
  std::vector<std::string> out;
  for (const auto& [id, split] : splits)
    if (split == s) out.push_back(id);
  return out;
}

CorpusManifest make_manifest(const Corpus& corpus) {
  CorpusManifest m;
  m.root = corpus.root.generic_string();
  for (std::size_t i = 0; i < corpus.tables.size(); ++i) {
    m.tables.push_back({std::filesystem::relative(corpus.files[i], corpus.root).generic_string(),
                        corpus.tables[i].table_id});
    for (const auto& c : corpus.tables[i].columns) m.splits.emplace(c.column_id, Split::Train);
  }
  m.total_columns = corpus.column_count();
  return m;
}

std::array<std::size_t, 3> split_sizes(std::size_t n, const SplitRatios& ratios) {
  const auto r = ratios.as_array();
  double sum = 0.0;
  for (double x : r) {
    if (!(x >= 0.0)) throw InvalidArgument("split ratios must be non-negative");
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw InvalidArgument("split ratios must sum to 1");
  const auto buckets = static_cast<std::size_t>(std::count_if(r.begin(), r.end(), [](double x) { return x > 0.0; }));
  if (n < buckets) {
    throw InvalidArgument("fewer columns (" + std::to_string(n) + ") than split buckets (" + std::to_string(buckets) +
                          ")");
  }

  std::array<std::size_t, 3> sizes{};
  std::array<double, 3> frac{};
  std::size_t assigned = 0;
  for (std::size_t b = 0; b < 3; ++b) {
    const double exact = r[b] * static_cast<double>(n);
    sizes[b] = static_cast<std::size_t>(std::floor(exact + 1e-9));
    frac[b] = exact - static_cast<double>(sizes[b]);
    assigned += sizes[b];
  }
  // Largest remainder; ties go to the earlier bucket.
  while (assigned < n) {
    std::size_t best = 0;
    for (std::size_t b = 1; b < 3; ++b)
      if (frac[b] > frac[best]) best = b;
    ++sizes[best];
    frac[best] = -1.0;
    ++assigned;
  }
  return sizes;
}

CorpusManifest split_corpus(const CorpusManifest& manifest, const SplitRatios& ratios, std::uint64_t seed) {
  std::vector<std::string> ids;
  ids.reserve(manifest.splits.size());
  for (const auto& kv : manifest.splits) ids.push_back(kv.first);

  const auto sizes = split_sizes(ids.size(), ratios);
  Rng rng(seed);
  rng.shuffle(ids);

  CorpusManifest out = manifest;
  out.seed = seed;
  out.ratios = ratios;
  std::size_t pos = 0;
  constexpr std::array kBuckets{Split::Train, Split::Val, Split::Test};
  for (std::size_t b = 0; b < 3; ++b) {
    for (std::size_t i = 0; i < sizes[b]; ++i) out.splits[ids[pos++]] = kBuckets[b];
  }
  return out;
}

nlohmann::ordered_json manifest_to_json(const CorpusManifest& m) {
  nlohmann::ordered_json j;
  j["root"] = m.root;
  auto tables = nlohmann::ordered_json::array();
  for (const auto& t : m.tables) tables.push_back({{"path", t.path}, {"table_id", t.table_id}});
  j["tables"] = std::move(tables);
  j["total_columns"] = m.total_columns;
  auto splits = nlohmann::ordered_json::object();
  for (const auto& [id, s] : m.splits) splits[id] = std::string(to_string(s));
  j["splits"] = std::move(splits);
  j["seed"] = m.seed;
  j["ratios"] = {m.ratios.train, m.ratios.val, m.ratios.test};
  return j;
}

CorpusManifest manifest_from_json(const nlohmann::ordered_json& j) {
  CorpusManifest m;
  try {
    m.root = j.at("root").get<std::string>();
    for (const auto& t : j.at("tables")) m.tables.push_back({t.at("path"), t.at("table_id")});
    m.total_columns = j.at("total_columns").get<std::size_t>();
    for (const auto& [id, s] : j.at("splits").items()) m.splits[id] = split_from_string(s.get<std::string>());
    m.seed = j.at("seed").get<std::uint64_t>();
    const auto& r = j.at("ratios");
    m.ratios = {r.at(0).get<double>(), r.at(1).get<double>(), r.at(2).get<double>()};
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("invalid manifest: ") + e.what());
  }
  return m;
}

std::vector<std::size_t> column_lengths(const Corpus& corpus) {
  std::vector<std::size_t> out;
  out.reserve(corpus.column_count());
  for (const auto& t : corpus.tables)
    for (const auto& c : t.columns) out.push_back(column_text_length(c));
  return out;
}

double coverage_at_cutoff(const std::vector<std::size_t>& lengths, std::size_t cutoff) {
  if (cutoff < 1) throw InvalidArgument("cutoff must be >= 1");
  if (lengths.empty()) throw InvalidArgument("coverage of an empty corpus");
  const auto kept = std::count_if(lengths.begin(), lengths.end(), [&](std::size_t n) { return n <= cutoff; });
  return static_cast<double>(kept) / static_cast<double>(lengths.size());
}

double coverage_at_cutoff(const Corpus& corpus, std::size_t cutoff) {
  return coverage_at_cutoff(column_lengths(corpus), cutoff);
}

LengthStats length_stats(const std::vector<std::size_t>& lengths, const std::vector<std::size_t>& cutoffs) {
  if (lengths.empty()) throw InvalidArgument("length statistics of an empty corpus");
  LengthStats s;
  s.count = lengths.size();
  const auto [lo, hi] = std::minmax_element(lengths.begin(), lengths.end());
  s.min = *lo;
  s.max = *hi;

  // Two-pass moments for accuracy.
  double sum = 0.0;
  for (auto n : lengths) sum += static_cast<double>(n);
  s.mean = sum / static_cast<double>(s.count);
  double sq = 0.0;
  for (auto n : lengths) {
    const double d = static_cast<double>(n) - s.mean;
    sq += d * d;
  }
  s.variance = s.count > 1 ? sq / static_cast<double>(s.count - 1) : 0.0;
  s.std_dev = std::sqrt(s.variance);
  for (auto c : cutoffs) s.coverage_at[c] = coverage_at_cutoff(lengths, c);
  return s;
}

LengthStats length_stats(const Corpus& corpus, const std::vector<std::size_t>& cutoffs) {
  return length_stats(column_lengths(corpus), cutoffs);
}

nlohmann::ordered_json stats_to_json(const LengthStats& s) {
  nlohmann::ordered_json j;
  j["columns"] = s.count;
  j["mean"] = s.mean;
  j["std_dev"] = s.std_dev;
  j["variance"] = s.variance;
  j["min"] = s.min;
  j["max"] = s.max;
  auto cov = nlohmann::ordered_json::array();
  for (const auto& [cutoff, frac] : s.coverage_at) cov.push_back({{"cutoff", cutoff}, {"fraction", frac}});
  j["coverage"] = std::move(cov);
  return j;
}

}  // namespace cae::corpus
