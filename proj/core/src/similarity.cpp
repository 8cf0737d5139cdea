#include "cae/analysis/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cae/corpus.hpp"
#include "cae/error.hpp"

namespace cae::analysis {

namespace {

template <typename T>
Similarity cosine_impl(std::span<const T> a, std::span<const T> b) {
  if (a.size() != b.size()) throw ShapeError("cosine similarity of vectors with different dimensions");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = a[i], y = b[i];
    dot += x * y;
    na += x * x;
    nb += y * y;
  }
  if (na == 0.0 || nb == 0.0) return {0.0, true};
  const double s = dot / (std::sqrt(na) * std::sqrt(nb));
  return {std::clamp(s, -1.0, 1.0), false};
}

std::vector<Neighbor> full_ranking(const EmbeddingStore& store, const std::string& query_id) {
  const auto& q = store.at(query_id);
  std::vector<Neighbor> all;
  all.reserve(store.size());
  for (const auto& [id, v] : store.entries()) {
    if (id == query_id) continue;
    all.push_back({id, cosine_similarity(std::span<const float>(q), std::span<const float>(v)).value});
  }
  std::sort(all.begin(), all.end(), [](const Neighbor& a, const Neighbor& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return a.column_id < b.column_id;
  });
  return all;
}

}  // namespace

Similarity cosine_similarity(std::span<const float> a, std::span<const float> b) { return cosine_impl(a, b); }

Similarity cosine_similarity(std::span<const double> a, std::span<const double> b) { return cosine_impl(a, b); }

std::vector<Neighbor> topk_query(const EmbeddingStore& store, const std::string& query_id, std::size_t k) {
  if (k < 1) throw InvalidArgument("top-k needs k >= 1");
  if (!store.contains(query_id)) throw InvalidArgument("query id not in store: " + query_id);
  auto all = full_ranking(store, query_id);
  if (all.size() > k) all.resize(k);
  return all;
}

GroundTruthPairs parse_ground_truth(std::string_view csv) {
  const auto table = corpus::parse_table(csv, ',', "ground_truth");
  if (table.column_names.size() != 2 || table.column_names[0] != "query_id" || table.column_names[1] != "target_id") {
    throw FormatError("ground truth CSV must have header query_id,target_id");
  }
  GroundTruthPairs truth;
  for (std::size_t r = 0; r < table.row_count(); ++r) {
    truth.pairs.emplace_back(table.columns[0].entries[r], table.columns[1].entries[r]);
  }
  return truth;
}

GroundTruthPairs load_ground_truth(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open ground truth " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_ground_truth(ss.str());
}

std::string ground_truth_csv(const GroundTruthPairs& truth) {
  std::string out = "query_id,target_id\n";
  auto quote = [](const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + "\"";
  };
  for (const auto& [a, b] : truth.pairs) out += quote(a) + "," + quote(b) + "\n";
  return out;
}

void validate_ground_truth(const GroundTruthPairs& truth, const EmbeddingStore& store) {
  if (truth.pairs.empty()) throw InvalidArgument("ground truth has no pairs");
  for (const auto& [q, t] : truth.pairs) {
    if (q == t) throw InvalidArgument("ground truth pairs a column with itself: " + q);
    if (!store.contains(q)) throw InvalidArgument("ground truth query id not in store: " + q);
    if (!store.contains(t)) throw InvalidArgument("ground truth target id not in store: " + t);
  }
}

double RetrievalResult::accuracy_at(std::size_t k) const {
  if (ranks.empty()) return 0.0;
  const auto hits = std::count_if(ranks.begin(), ranks.end(), [&](std::size_t r) { return r <= k; });
  return static_cast<double>(hits) / static_cast<double>(ranks.size());
}

RetrievalResult evaluate_retrieval(const EmbeddingStore& store, const GroundTruthPairs& truth) {
  validate_ground_truth(truth, store);
  RetrievalResult result;
  result.pairs_evaluated = truth.pairs.size();
  for (const auto& [q, t] : truth.pairs) {
    const auto ranking = full_ranking(store, q);
    const auto it = std::find_if(ranking.begin(), ranking.end(), [&](const Neighbor& n) { return n.column_id == t; });
    result.ranks.push_back(static_cast<std::size_t>(it - ranking.begin()) + 1);
  }
  return result;
}

double topk_accuracy(const EmbeddingStore& store, const GroundTruthPairs& truth, std::size_t k) {
  if (k < 1) throw InvalidArgument("top-k needs k >= 1");
  return evaluate_retrieval(store, truth).accuracy_at(k);
}

}  // namespace cae::analysis
