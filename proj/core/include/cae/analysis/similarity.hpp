#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cae/analysis/embedding_store.hpp"

namespace cae::analysis {

struct Similarity {
  double value = 0.0;
  bool degenerate = false;  // an input had zero norm; value is defined as 0
};

Similarity cosine_similarity(std::span<const float> a, std::span<const float> b);
Similarity cosine_similarity(std::span<const double> a, std::span<const double> b);

struct Neighbor {
  std::string column_id;
  double similarity = 0.0;

  bool operator==(const Neighbor&) const = default;
};

// Highest-similarity columns other than the query, descending; ties broken by
// ascending column_id.
std::vector<Neighbor> topk_query(const EmbeddingStore& store, const std::string& query_id, std::size_t k);

struct GroundTruthPairs {
  std::vector<std::pair<std::string, std::string>> pairs;  // (query, target)
};

// CSV with header query_id,target_id.
GroundTruthPairs load_ground_truth(const std::filesystem::path& path);
GroundTruthPairs parse_ground_truth(std::string_view csv);
std::string ground_truth_csv(const GroundTruthPairs& truth);

// Throws if a pair references a missing id or pairs a column with itself.
void validate_ground_truth(const GroundTruthPairs& truth, const EmbeddingStore& store);

struct RetrievalResult {
  std::vector<std::size_t> ranks;  // 1-based rank of the target for each pair
  std::size_t pairs_evaluated = 0;

  // Fraction of pairs whose target ranks within the top k.
  double accuracy_at(std::size_t k) const;
};

RetrievalResult evaluate_retrieval(const EmbeddingStore& store, const GroundTruthPairs& truth);

double topk_accuracy(const EmbeddingStore& store, const GroundTruthPairs& truth, std::size_t k);

}  // namespace cae::analysis
