#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cae/analysis/embedding_store.hpp"

namespace cae::analysis {

// Row-major n x dim point matrix viewed without copying.
struct PointsView {
  std::span<const double> data;
  std::size_t n = 0;
  std::size_t dim = 0;

  std::span<const double> row(std::size_t i) const { return data.subspan(i * dim, dim); }
};

struct KMeansResult {
  std::size_t k = 0;
  std::vector<std::size_t> assignment;  // per point, in [0, k)
  std::vector<double> centroids;        // k x dim
  double wcss = 0.0;
  std::vector<double> wcss_trace;  // after each centroid update; non-increasing
  std::size_t iterations = 0;
  bool converged = false;
};

struct KMeansOptions {
  std::uint64_t seed = 0;
  std::size_t max_iters = 300;
  std::size_t restarts = 5;
};

// Lloyd iterations from k-means++ seeding (or the given initial centroids).
// Stops at an assignment fixpoint or after max_iters.
KMeansResult kmeans(PointsView points, std::size_t k, std::uint64_t seed, std::size_t max_iters,
                    std::span<const double> initial_centroids = {});

// Lowest WCSS over `restarts` seeded runs (plus any warm start), ties to the
// earlier run.
KMeansResult kmeans_best_of(PointsView points, std::size_t k, const KMeansOptions& options,
                            std::span<const double> warm_start = {});

double compute_wcss(PointsView points, std::span<const double> centroids, std::span<const std::size_t> assignment);

struct ElbowResult {
  std::vector<std::pair<std::size_t, double>> curve;  // (k, best WCSS)
  std::size_t chosen_k = 0;
};

// WCSS for each k in [k_min, k_max]; chooses the interior k maximizing
// WCSS(k-1) - 2 WCSS(k) + WCSS(k+1). Each k also gets a warm start from the
// previous k's centroids plus the worst-fit point, so the curve is
// non-increasing.
ElbowResult elbow_scan(PointsView points, std::size_t k_min, std::size_t k_max, const KMeansOptions& options);

// Store-level clustering, ids in ascending order.
struct ClusterResult {
  std::size_t k = 0;
  std::map<std::string, std::size_t> assignment;
  std::vector<std::vector<double>> centroids;
  double wcss = 0.0;
};

ClusterResult kmeans(const EmbeddingStore& store, std::size_t k, const KMeansOptions& options);
ElbowResult elbow_scan(const EmbeddingStore& store, std::size_t k_min, std::size_t k_max,
                       const KMeansOptions& options);

}  // namespace cae::analysis
