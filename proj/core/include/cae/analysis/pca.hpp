#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cae/analysis/embedding_store.hpp"
#include "cae/analysis/kmeans.hpp"

namespace cae::analysis {

struct PcaResult {
  std::vector<double> mean;                      // dim
  std::vector<std::vector<double>> components;   // unit-norm, mutually orthogonal
  std::vector<double> explained_variance;        // non-increasing
  std::vector<std::vector<double>> projections;  // n x components.size()
  bool degenerate = false;                       // fewer components than requested
};

struct PcaOptions {
  std::size_t max_iters = 20000;
  double tolerance = 1e-14;
  std::uint64_t seed = 7;
};

// Principal components of the centered data via power iteration with
// deflation on the sample covariance.
PcaResult pca(PointsView points, std::size_t dims, const PcaOptions& options = {});

struct PcaProjection {
  PcaResult result;
  std::vector<std::pair<std::string, std::vector<double>>> points;  // id order
};

PcaProjection pca_project(const EmbeddingStore& store, std::size_t dims = 2, const PcaOptions& options = {});

}  // namespace cae::analysis
