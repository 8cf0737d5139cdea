#include "cae/analysis/pca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cae/error.hpp"
#include "cae/random.hpp"

namespace cae::analysis {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

void normalize(std::vector<double>& v) {
  const double n = std::sqrt(dot(v, v));
  if (n > 0.0)
    for (double& x : v) x /= n;
}

void orthogonalize(std::vector<double>& v, const std::vector<std::vector<double>>& basis) {
  // Two Gram-Schmidt passes keep the basis orthonormal to machine precision.
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& b : basis) {
      const double p = dot(v, b);
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= p * b[i];
    }
  }
}

std::vector<double> mat_vec(const std::vector<double>& m, const std::vector<double>& v) {
  const std::size_t d = v.size();
  std::vector<double> out(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) s += m[i * d + j] * v[j];
    out[i] = s;
  }
  return out;
}

}  // namespace

PcaResult pca(PointsView pts, std::size_t dims, const PcaOptions& options) {
  if (dims < 1) throw InvalidArgument("PCA needs at least one component");
  if (pts.n < dims) throw InvalidArgument("PCA needs at least as many points as components");
  if (dims > pts.dim) throw InvalidArgument("PCA cannot return more components than dimensions");
  const std::size_t n = pts.n, d = pts.dim;

  PcaResult r;
  r.mean.assign(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = pts.row(i);
    for (std::size_t j = 0; j < d; ++j) r.mean[j] += p[j];
  }
  for (double& m : r.mean) m /= static_cast<double>(n);

  std::vector<double> cov(d * d, 0.0);
  std::vector<double> c(d);
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = pts.row(i);
    for (std::size_t j = 0; j < d; ++j) c[j] = p[j] - r.mean[j];
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = a; b < d; ++b) cov[a * d + b] += c[a] * c[b];
  }
  const double denom = n > 1 ? static_cast<double>(n - 1) : 1.0;
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = a; b < d; ++b) {
      cov[a * d + b] /= denom;
      cov[b * d + a] = cov[a * d + b];
    }
  }
  double trace = 0.0;
  for (std::size_t a = 0; a < d; ++a) trace += cov[a * d + a];
  const double floor = 1e-12 * std::max(trace, 1e-300);

  Rng rng(options.seed);
  for (std::size_t comp = 0; comp < dims; ++comp) {
    std::vector<double> v(d);
    for (double& x : v) x = rng.uniform(-1.0, 1.0);
    orthogonalize(v, r.components);
    normalize(v);

    double lambda = 0.0;
    for (std::size_t it = 0; it < options.max_iters; ++it) {
      auto w = mat_vec(cov, v);
      orthogonalize(w, r.components);
      const double norm = std::sqrt(dot(w, w));
      if (norm <= floor) {
        lambda = 0.0;
        break;
      }
      for (double& x : w) x /= norm;
      const double change = 1.0 - std::abs(dot(w, v));
      v = std::move(w);
      lambda = dot(v, mat_vec(cov, v));
      if (change < options.tolerance) break;
    }
    if (lambda <= floor) {
      r.degenerate = true;
      break;
    }
    // Sign convention: largest-magnitude coordinate positive.
    const auto big = std::max_element(v.begin(), v.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
    if (*big < 0.0)
      for (double& x : v) x = -x;

    // Deflate.
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) cov[a * d + b] -= lambda * v[a] * v[b];
    r.components.push_back(std::move(v));
    r.explained_variance.push_back(lambda);
  }

  // Power iteration may return nearly-equal eigenvalues out of order.
  std::vector<std::size_t> order(r.components.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return r.explained_variance[a] > r.explained_variance[b]; });
  PcaResult sorted = r;
  for (std::size_t i = 0; i < order.size(); ++i) {
    sorted.components[i] = r.components[order[i]];
    sorted.explained_variance[i] = r.explained_variance[order[i]];
  }
  r = std::move(sorted);

  r.projections.assign(n, std::vector<double>(r.components.size(), 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = pts.row(i);
    for (std::size_t j = 0; j < d; ++j) c[j] = p[j] - r.mean[j];
    for (std::size_t k = 0; k < r.components.size(); ++k) r.projections[i][k] = dot(c, r.components[k]);
  }
  return r;
}

PcaProjection pca_project(const EmbeddingStore& store, std::size_t dims, const PcaOptions& options) {
  const auto data = store.matrix();
  PcaProjection out;
  out.result = pca(PointsView{data, store.size(), store.dim()}, dims, options);
  std::size_t i = 0;
  for (const auto& [id, v] : store.entries()) out.points.emplace_back(id, out.result.projections[i++]);
  return out;
}

}  // namespace cae::analysis
