#include "cae/analysis/kmeans.hpp"

#include <algorithm>
#include <limits>

#include "cae/error.hpp"
#include "cae/random.hpp"

namespace cae::analysis {

namespace {

double sq_dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

std::span<const double> centroid(std::span<const double> centroids, std::size_t c, std::size_t dim) {
  return centroids.subspan(c * dim, dim);
}

std::size_t nearest(std::span<const double> p, std::span<const double> centroids, std::size_t k, std::size_t dim,
                    double* dist = nullptr) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < k; ++c) {
    const double d = sq_dist(p, centroid(centroids, c, dim));
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  if (dist) *dist = best_d;
  return best;
}

std::vector<double> plus_plus_init(PointsView pts, std::size_t k, Rng& rng) {
  std::vector<double> cents;
  cents.reserve(k * pts.dim);
  auto push = [&](std::size_t i) {
    const auto r = pts.row(i);
    cents.insert(cents.end(), r.begin(), r.end());
  };
  push(static_cast<std::size_t>(rng.uniform_index(pts.n)));
  std::vector<double> d2(pts.n, std::numeric_limits<double>::infinity());
  for (std::size_t c = 1; c < k; ++c) {
    const auto last = centroid(cents, c - 1, pts.dim);
    double total = 0.0;
    for (std::size_t i = 0; i < pts.n; ++i) {
      d2[i] = std::min(d2[i], sq_dist(pts.row(i), last));
      total += d2[i];
    }
    std::size_t pick = 0;
    if (total <= 0.0) {
      pick = static_cast<std::size_t>(rng.uniform_index(pts.n));
    } else {
      double target = rng.uniform01() * total;
      pick = pts.n - 1;
      for (std::size_t i = 0; i < pts.n; ++i) {
        if (d2[i] <= 0.0) continue;
        target -= d2[i];
        if (target < 0.0) {
          pick = i;
          break;
        }
      }
    }
    push(pick);
  }
  return cents;
}

void validate(PointsView pts, std::size_t k) {
  if (pts.n == 0) throw InvalidArgument("k-means on an empty point set");
  if (k < 1) throw InvalidArgument("k-means needs k >= 1");
  if (k > pts.n) {
    throw InvalidArgument("k-means with k=" + std::to_string(k) + " exceeds the " + std::to_string(pts.n) +
                          " available points");
  }
  if (pts.data.size() != pts.n * pts.dim) throw ShapeError("point matrix size does not match n x dim");
}

}  // namespace

double compute_wcss(PointsView pts, std::span<const double> centroids, std::span<const std::size_t> assignment) {
  double s = 0.0;
  for (std::size_t i = 0; i < pts.n; ++i) s += sq_dist(pts.row(i), centroid(centroids, assignment[i], pts.dim));
  return s;
}

KMeansResult kmeans(PointsView pts, std::size_t k, std::uint64_t seed, std::size_t max_iters,
                    std::span<const double> initial_centroids) {
  validate(pts, k);
  const std::size_t dim = pts.dim;
  KMeansResult r;
  r.k = k;
  if (!initial_centroids.empty()) {
    if (initial_centroids.size() != k * dim) throw ShapeError("initial centroids must be k x dim");
    r.centroids.assign(initial_centroids.begin(), initial_centroids.end());
  } else {
    Rng rng(seed);
    r.centroids = plus_plus_init(pts, k, rng);
  }

  r.assignment.resize(pts.n);
  for (std::size_t i = 0; i < pts.n; ++i) r.assignment[i] = nearest(pts.row(i), r.centroids, k, dim);

  std::vector<double> sums(k * dim);
  std::vector<std::size_t> counts(k);
  std::vector<std::size_t> next(pts.n);
  for (std::size_t it = 0; it < std::max<std::size_t>(max_iters, 1); ++it) {
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < pts.n; ++i) {
      const auto c = r.assignment[i];
      ++counts[c];
      const auto p = pts.row(i);
      for (std::size_t d = 0; d < dim; ++d) sums[c * dim + d] += p[d];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;  // empty cluster keeps its centroid
      for (std::size_t d = 0; d < dim; ++d) r.centroids[c * dim + d] = sums[c * dim + d] / static_cast<double>(counts[c]);
    }
    r.wcss_trace.push_back(compute_wcss(pts, r.centroids, r.assignment));
    ++r.iterations;

    for (std::size_t i = 0; i < pts.n; ++i) next[i] = nearest(pts.row(i), r.centroids, k, dim);
    if (next == r.assignment) {
      r.converged = true;
      break;
    }
    r.assignment.swap(next);
  }
  r.wcss = compute_wcss(pts, r.centroids, r.assignment);
  if (r.wcss != r.wcss_trace.back()) r.wcss_trace.push_back(r.wcss);
  return r;
}

KMeansResult kmeans_best_of(PointsView pts, std::size_t k, const KMeansOptions& options,
                            std::span<const double> warm_start) {
  validate(pts, k);
  const std::size_t restarts = std::max<std::size_t>(options.restarts, 1);
  KMeansResult best;
  bool have = false;
  for (std::size_t r = 0; r < restarts; ++r) {
    auto res = kmeans(pts, k, seeds::derive(options.seed, 1000 + r), options.max_iters);
    if (!have || res.wcss < best.wcss) {
      best = std::move(res);
      have = true;
    }
  }
  if (!warm_start.empty()) {
    auto res = kmeans(pts, k, options.seed, options.max_iters, warm_start);
    if (res.wcss < best.wcss) best = std::move(res);
  }
  return best;
}

ElbowResult elbow_scan(PointsView pts, std::size_t k_min, std::size_t k_max, const KMeansOptions& options) {
  if (k_min < 1 || k_max > pts.n || k_min > k_max) {
    throw InvalidArgument("elbow range [" + std::to_string(k_min) + ", " + std::to_string(k_max) +
                          "] must lie within [1, " + std::to_string(pts.n) + "]");
  }
  if (k_max - k_min + 1 < 3) throw InvalidArgument("elbow scan needs at least 3 values of k");

  ElbowResult out;
  std::vector<double> warm;
  for (std::size_t k = k_min; k <= k_max; ++k) {
    KMeansResult res = kmeans_best_of(pts, k, options, warm);
    out.curve.emplace_back(k, res.wcss);

    // Warm start for k+1: current centroids plus the point farthest from its centroid.
    if (k < k_max) {
      warm = res.centroids;
      std::size_t worst = 0;
      double worst_d = -1.0;
      for (std::size_t i = 0; i < pts.n; ++i) {
        const double d = sq_dist(pts.row(i), centroid(res.centroids, res.assignment[i], pts.dim));
        if (d > worst_d) {
          worst_d = d;
          worst = i;
        }
      }
      const auto p = pts.row(worst);
      warm.insert(warm.end(), p.begin(), p.end());
    }
  }

  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < out.curve.size(); ++i) {
    const double d2 = out.curve[i - 1].second - 2.0 * out.curve[i].second + out.curve[i + 1].second;
    if (d2 > best) {
      best = d2;
      out.chosen_k = out.curve[i].first;
    }
  }
  return out;
}

ClusterResult kmeans(const EmbeddingStore& store, std::size_t k, const KMeansOptions& options) {
  if (store.empty()) throw InvalidArgument("k-means on an empty store");
  const auto data = store.matrix();
  const PointsView pts{data, store.size(), store.dim()};
  const auto res = kmeans_best_of(pts, k, options);
  ClusterResult out;
  out.k = k;
  out.wcss = res.wcss;
  std::size_t i = 0;
  for (const auto& [id, v] : store.entries()) out.assignment.emplace(id, res.assignment[i++]);
  for (std::size_t c = 0; c < k; ++c) {
    out.centroids.emplace_back(res.centroids.begin() + static_cast<std::ptrdiff_t>(c * store.dim()),
                               res.centroids.begin() + static_cast<std::ptrdiff_t>((c + 1) * store.dim()));
  }
  return out;
}

ElbowResult elbow_scan(const EmbeddingStore& store, std::size_t k_min, std::size_t k_max,
                       const KMeansOptions& options) {
  if (store.empty()) throw InvalidArgument("elbow scan on an empty store");
  const auto data = store.matrix();
  return elbow_scan(PointsView{data, store.size(), store.dim()}, k_min, k_max, options);
}

}  // namespace cae::analysis
