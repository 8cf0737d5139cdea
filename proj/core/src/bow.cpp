#include "cae/analysis/bow.hpp"

#include <set>

namespace cae::analysis {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f'; }

}  // namespace

std::vector<std::string_view> tokenize(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    const std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > start) out.push_back(text.substr(start, i - start));
  }
  return out;
}

BowDictionary BowDictionary::build(std::span<const corpus::Column* const> columns) {
  std::set<std::string, std::less<>> vocab;
  for (const auto* c : columns)
    for (const auto& e : c->entries)
      for (auto t : tokenize(e)) vocab.emplace(t);
  BowDictionary d;
  std::size_t i = 0;
  for (const auto& t : vocab) d.index_.emplace(t, i++);
  return d;
}

std::ptrdiff_t BowDictionary::index_of(std::string_view token) const {
  auto it = index_.find(token);
  return it == index_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
}

std::vector<float> bow_encode_text(std::string_view text, const BowDictionary& dict) {
  std::vector<float> v(dict.size(), 0.0f);
  for (auto t : tokenize(text)) {
    const auto idx = dict.index_of(t);
    if (idx >= 0) v[static_cast<std::size_t>(idx)] += 1.0f;
  }
  return v;
}

std::vector<float> bow_encode(const corpus::Column& column, const BowDictionary& dict) {
  std::vector<float> v(dict.size(), 0.0f);
  for (const auto& e : column.entries) {
    for (auto t : tokenize(e)) {
      const auto idx = dict.index_of(t);
      if (idx >= 0) v[static_cast<std::size_t>(idx)] += 1.0f;
    }
  }
  return v;
}

EmbeddingStore bow_store(std::span<const corpus::Column* const> columns, const BowDictionary& dict) {
  EmbeddingStore store(dict.size());
  for (const auto* c : columns) store.add(c->column_id, bow_encode(*c, dict));
  store.provenance.checkpoint_id = "bow";
  return store;
}

}  // namespace cae::analysis
