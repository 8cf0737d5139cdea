#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "cae/analysis/embedding_store.hpp"
#include "cae/analysis/kmeans.hpp"
#include "cae/analysis/pca.hpp"
#include "cae/error.hpp"
#include "cae/random.hpp"

using namespace cae;
using namespace cae::analysis;

namespace {

struct Points {
  std::vector<double> data;
  std::size_t n = 0, dim = 0;
  PointsView view() const { return {data, n, dim}; }
};

Points blobs(std::uint64_t seed, std::size_t per_blob = 50, double sigma = 0.5, double side = 12.0) {
  const double h = side * std::sqrt(3.0) / 2.0;
  const double centers[3][2] = {{0, 0}, {side, 0}, {side / 2, h}};
  Rng rng(seed);
  Points p;
  p.dim = 2;
  for (const auto& c : centers)
    for (std::size_t i = 0; i < per_blob; ++i) {
      p.data.push_back(c[0] + sigma * rng.normal());
      p.data.push_back(c[1] + sigma * rng.normal());
      ++p.n;
    }
  return p;
}

double brute_force_best_wcss_k2(const Points& p) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t mask = 1; mask + 1 < (std::size_t{1} << p.n); ++mask) {
    std::vector<std::size_t> a(p.n);
    for (std::size_t i = 0; i < p.n; ++i) a[i] = (mask >> i) & 1u;
    std::vector<double> cent(2 * p.dim, 0.0);
    std::size_t count[2] = {0, 0};
    for (std::size_t i = 0; i < p.n; ++i) {
      ++count[a[i]];
      for (std::size_t d = 0; d < p.dim; ++d) cent[a[i] * p.dim + d] += p.data[i * p.dim + d];
    }
    for (std::size_t c = 0; c < 2; ++c)
      for (std::size_t d = 0; d < p.dim; ++d) cent[c * p.dim + d] /= static_cast<double>(count[c]);
    best = std::min(best, compute_wcss(p.view(), cent, a));
  }
  return best;
}

}  // namespace

TEST(KMeans, FourPointInstanceIsOptimal) {
  Points p{{0, 0, 0, 1, 10, 0, 10, 1}, 4, 2};
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto r = kmeans_best_of(p.view(), 2, {seed, 300, 5});
    EXPECT_EQ(r.wcss, 1.0);
    EXPECT_EQ(r.assignment[0], r.assignment[1]);
    EXPECT_EQ(r.assignment[2], r.assignment[3]);
    EXPECT_NE(r.assignment[0], r.assignment[2]);
  }
  EXPECT_EQ(brute_force_best_wcss_k2(p), 1.0);
}

TEST(KMeans, MatchesBruteForceOnSeparableSets) {
  Rng rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    Points p;
    p.dim = 2;
    p.n = 4 + rng.uniform_index(7);
    for (std::size_t i = 0; i < p.n; ++i) {
      const double off = rng.bernoulli(0.5) ? 20.0 : 0.0;
      p.data.push_back(off + rng.normal());
      p.data.push_back(rng.normal());
    }
    const auto r = kmeans_best_of(p.view(), 2, {static_cast<std::uint64_t>(trial), 300, 5});
    const double best = brute_force_best_wcss_k2(p);
    EXPECT_GE(r.wcss, best - 1e-9);
    EXPECT_NEAR(r.wcss, best, 1e-9 * std::max(1.0, best));
  }
}

TEST(KMeans, DegenerateK) {
  const auto p = blobs(1, 5);
  const auto all = kmeans(p.view(), p.n, 1, 100);
  EXPECT_EQ(all.wcss, 0.0);
  const auto one = kmeans(p.view(), 1, 1, 100);
  for (std::size_t d = 0; d < 2; ++d) {
    double mean = 0.0;
    for (std::size_t i = 0; i < p.n; ++i) mean += p.data[i * 2 + d];
    EXPECT_NEAR(one.centroids[d], mean / static_cast<double>(p.n), 1e-12);
  }
  EXPECT_THROW(kmeans(p.view(), 0, 1, 10), InvalidArgument);
  EXPECT_THROW(kmeans(p.view(), p.n + 1, 1, 10), InvalidArgument);
}

TEST(KMeans, WcssMonotoneWithinRun) {
  Rng rng(2);
  Points p;
  p.dim = 5;
  p.n = 200;
  for (std::size_t i = 0; i < p.n * p.dim; ++i) p.data.push_back(rng.normal());
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto r = kmeans(p.view(), 7, seed, 300);
    ASSERT_FALSE(r.wcss_trace.empty());
    for (std::size_t i = 1; i < r.wcss_trace.size(); ++i) EXPECT_LE(r.wcss_trace[i], r.wcss_trace[i - 1] + 1e-9);
    EXPECT_NEAR(r.wcss, compute_wcss(p.view(), r.centroids, r.assignment), 1e-9);
  }
}

TEST(KMeans, DeterministicForSeed) {
  const auto p = blobs(3);
  const auto a = kmeans_best_of(p.view(), 4, {11, 300, 5});
  const auto b = kmeans_best_of(p.view(), 4, {11, 300, 5});
  EXPECT_EQ(a.assignment, b.assignment);
  EXPECT_EQ(a.centroids, b.centroids);
}

TEST(Elbow, ThreeBlobsChooseThree) {
  std::size_t hits = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto p = blobs(seed);
    const auto e = elbow_scan(p.view(), 1, 8, {seed, 300, 5});
    ASSERT_EQ(e.curve.size(), 8u);
    for (std::size_t i = 1; i < e.curve.size(); ++i) EXPECT_LE(e.curve[i].second, e.curve[i - 1].second);
    hits += e.chosen_k == 3;
  }
  EXPECT_GE(hits, 9u);
}

TEST(Elbow, RangeValidation) {
  const auto p = blobs(1, 3);
  EXPECT_THROW(elbow_scan(p.view(), 1, 2, {}), InvalidArgument);
  EXPECT_THROW(elbow_scan(p.view(), 0, 5, {}), InvalidArgument);
  EXPECT_THROW(elbow_scan(p.view(), 1, 100, {}), InvalidArgument);
}

TEST(Elbow, StoreLevelScan) {
  const auto p = blobs(4);
  EmbeddingStore s(2);
  for (std::size_t i = 0; i < p.n; ++i)
    s.add("c" + std::to_string(1000 + i),
          {static_cast<float>(p.data[2 * i]), static_cast<float>(p.data[2 * i + 1])});
  EXPECT_EQ(elbow_scan(s, 1, 8, {4, 300, 5}).chosen_k, 3u);
  const auto c = kmeans(s, 3, {4, 300, 5});
  EXPECT_EQ(c.assignment.size(), p.n);
  EXPECT_EQ(c.centroids.size(), 3u);
}

TEST(Pca, CollinearDataRecoversDiagonal) {
  Points p;
  p.dim = 2;
  for (double t : {-3.0, -1.0, 0.5, 2.0, 4.0, 7.5}) {
    p.data.push_back(t);
    p.data.push_back(t);
    ++p.n;
  }
  const auto r = pca(p.view(), 1);
  ASSERT_EQ(r.components.size(), 1u);
  const double s = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(r.components[0][0]), s, 1e-6);
  EXPECT_NEAR(std::abs(r.components[0][1]), s, 1e-6);
  EXPECT_EQ(r.components[0][0] > 0, r.components[0][1] > 0);

  const auto two = pca(p.view(), 2);
  EXPECT_NEAR(std::abs(two.components[0][0]), s, 1e-6);
  EXPECT_TRUE(two.degenerate || two.explained_variance[1] < 1e-9);
}

TEST(Pca, OrthonormalSortedAndCentered) {
  Rng rng(5);
  Points p;
  p.dim = 30;
  p.n = 120;
  for (std::size_t i = 0; i < p.n; ++i)
    for (std::size_t d = 0; d < p.dim; ++d) p.data.push_back(rng.normal() * (1.0 + static_cast<double>(d % 7)) + 3.0);
  const auto r = pca(p.view(), 10);
  ASSERT_EQ(r.components.size(), 10u);
  for (std::size_t a = 0; a < 10; ++a)
    for (std::size_t b = 0; b < 10; ++b) {
      double dot = 0.0;
      for (std::size_t d = 0; d < p.dim; ++d) dot += r.components[a][d] * r.components[b][d];
      EXPECT_NEAR(dot, a == b ? 1.0 : 0.0, 1e-6);
    }
  for (std::size_t i = 1; i < r.explained_variance.size(); ++i)
    EXPECT_GE(r.explained_variance[i - 1], r.explained_variance[i]);
  for (std::size_t c = 0; c < 10; ++c) {
    double mean = 0.0;
    for (const auto& row : r.projections) mean += row[c];
    EXPECT_NEAR(mean / static_cast<double>(p.n), 0.0, 1e-9);
  }
}

TEST(Pca, MatchesEigenSolver) {
  Rng rng(6);
  const std::size_t n = 200, dim = 6;
  const double scales[dim] = {6, 4, 3, 2, 1, 0.5};
  Points p;
  p.dim = dim;
  p.n = n;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t d = 0; d < dim; ++d) p.data.push_back(scales[d] * rng.normal());
  // Rotate so the axes are not trivially aligned.
  Eigen::MatrixXd X = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      p.data.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
  Eigen::MatrixXd G(dim, dim);
  for (Eigen::Index i = 0; i < G.size(); ++i) G.data()[i] = rng.normal();
  const Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(G).householderQ();
  X = X * Q;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t d = 0; d < dim; ++d)
      p.data[i * dim + d] = X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d));

  const Eigen::MatrixXd centered = X.rowwise() - X.colwise().mean();
  const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  const auto r = pca(p.view(), dim);
  ASSERT_EQ(r.components.size(), dim);
  for (std::size_t c = 0; c < dim; ++c) {
    const auto idx = static_cast<Eigen::Index>(dim - 1 - c);  // Eigen sorts ascending
    EXPECT_NEAR(r.explained_variance[c], solver.eigenvalues()(idx), 1e-8 * solver.eigenvalues()(idx));
    double dot = 0.0;
    for (std::size_t d = 0; d < dim; ++d) dot += r.components[c][d] * solver.eigenvectors()(static_cast<Eigen::Index>(d), idx);
    EXPECT_NEAR(std::abs(dot), 1.0, 1e-6);
  }
}

TEST(Pca, ProjectStoreAndValidate) {
  EmbeddingStore s(3);
  Rng rng(8);
  for (int i = 0; i < 10; ++i)
    s.add("id" + std::to_string(i), {static_cast<float>(rng.normal()), static_cast<float>(rng.normal()),
                                     static_cast<float>(rng.normal())});
  const auto proj = pca_project(s, 2);
  ASSERT_EQ(proj.points.size(), 10u);
  EXPECT_EQ(proj.points[0].first, "id0");
  EXPECT_EQ(proj.points[0].second.size(), 2u);
  EXPECT_THROW(pca_project(s, 4), InvalidArgument);
  EXPECT_THROW(pca_project(s, 0), InvalidArgument);
}
