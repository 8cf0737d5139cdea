#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cae/analysis/embedding_store.hpp"
#include "cae/corpus.hpp"

namespace cae::analysis {

// Bag-of-words baseline: whitespace tokens of a column's cell texts, raw term
// frequency against a dictionary fixed on the training split.
class BowDictionary {
 public:
  static BowDictionary build(std::span<const corpus::Column* const> columns);

  std::size_t size() const { return index_.size(); }
  // Index of token, or -1 when out of vocabulary.
  std::ptrdiff_t index_of(std::string_view token) const;
  const std::map<std::string, std::size_t, std::less<>>& tokens() const { return index_; }

 private:
  std::map<std::string, std::size_t, std::less<>> index_;  // indices follow sorted token order
};

std::vector<std::string_view> tokenize(std::string_view text);

std::vector<float> bow_encode_text(std::string_view text, const BowDictionary& dict);

// Cells are joined with a space before tokenizing, so tokens never span cells.
std::vector<float> bow_encode(const corpus::Column& column, const BowDictionary& dict);

EmbeddingStore bow_store(std::span<const corpus::Column* const> columns, const BowDictionary& dict);

}  // namespace cae::analysis
