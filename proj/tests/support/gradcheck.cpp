#include "gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "cae/nn/loss.hpp"
#include "cae/random.hpp"

namespace cae::testing {

using nn::BasicTensor;

namespace {

double relative_error(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-6});
  return std::abs(a - b) / scale;
}

double weighted_sum(const BasicTensor<double>& y, const BasicTensor<double>& w) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += y[i] * w[i];
  return s;
}

}  // namespace

BasicTensor<double> random_tensor(const nn::Shape& shape, std::uint64_t seed, double margin) {
  Rng rng(seed);
  BasicTensor<double> t(shape);
  for (auto& v : t.values()) {
    do {
      v = rng.uniform(-1.0, 1.0);
    } while (std::abs(v) < margin);
  }
  return t;
}

GradCheckReport check_layer(nn::Layer<double>& layer, const BasicTensor<double>& x, std::uint64_t seed,
                            nn::Mode mode, double h) {
  GradCheckReport report;
  report.what = layer.describe();
  auto params = layer.params();
  for (auto& p : params) p.grad->fill(0.0);

  // Dropout in train mode needs a fixed mask for the probes to be meaningful,
  // so probing re-runs forward with the same rng seed each time.
  auto run = [&](const BasicTensor<double>& in) {
    Rng rng(seed ^ 0xABCDEFULL);
    return layer.forward(in, mode, &rng);
  };

  const auto y = run(x);
  const auto w = random_tensor(y.shape(), seed + 1);
  const auto dx = layer.backward(w);

  std::vector<std::vector<double>> analytic_params;
  for (auto& p : params) analytic_params.push_back(p.grad->values());

  auto probe = [&](double& slot, double analytic, const BasicTensor<double>& in) {
    const double saved = slot;
    slot = saved + h;
    const double up = weighted_sum(run(in), w);
    slot = saved - h;
    const double down = weighted_sum(run(in), w);
    slot = saved;
    const double numeric = (up - down) / (2.0 * h);
    report.max_relative_error = std::max(report.max_relative_error, relative_error(analytic, numeric));
    ++report.checked;
  };

  auto xp = x;
  for (std::size_t i = 0; i < xp.size(); ++i) probe(xp[i], dx[i], xp);
  for (std::size_t p = 0; p < params.size(); ++p) {
    auto& values = params[p].value->values();
    for (std::size_t i = 0; i < values.size(); ++i) probe(values[i], analytic_params[p][i], x);
  }
  layer.clear_state();
  return report;
}

GradCheckReport check_mse(const BasicTensor<double>& target, const BasicTensor<double>& prediction,
                          nn::Reduction reduction, double h) {
  GradCheckReport report;
  report.what = reduction == nn::Reduction::Sum ? "MSE(sum)" : "MSE(mean)";
  const auto analytic = nn::mse_loss(target, prediction, reduction).grad;
  auto p = prediction;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double saved = p[i];
    p[i] = saved + h;
    const double up = nn::mse_value(target, p, reduction);
    p[i] = saved - h;
    const double down = nn::mse_value(target, p, reduction);
    p[i] = saved;
    const double numeric = (up - down) / (2.0 * h);
    report.max_relative_error = std::max(report.max_relative_error, relative_error(analytic[i], numeric));
    ++report.checked;
  }
  return report;
}

std::vector<GradCheckReport> check_all_kinds(std::uint64_t seed) {
  Rng rng(seed);
  auto dim = [&](std::size_t lo, std::size_t hi) { return lo + static_cast<std::size_t>(rng.uniform_index(hi - lo + 1)); };
  std::vector<GradCheckReport> out;

  {
    const std::size_t n = dim(1, 4), in = dim(1, 16), o = dim(1, 16);
    nn::Dense<double> layer(in, o);
    Rng init(seed + 10);
    layer.init(init);
    for (auto& b : layer.bias().values()) b = init.uniform(-0.5, 0.5);
    out.push_back(check_layer(layer, random_tensor({n, in}, seed + 11), seed));
  }
  {
    const std::size_t n = dim(1, 2), c = dim(1, 4), o = dim(1, 4), hgt = dim(1, 8), wid = dim(1, 16);
    nn::Conv3x3Same<double> layer(c, o);
    Rng init(seed + 20);
    layer.init(init);
    for (auto& b : layer.bias().values()) b = init.uniform(-0.5, 0.5);
    out.push_back(check_layer(layer, random_tensor({n, c, hgt, wid}, seed + 21), seed));
  }
  {
    nn::ReLU<double> layer;
    // Keep inputs 2h away from the kink, where the derivative is undefined.
    out.push_back(check_layer(layer, random_tensor({dim(1, 16), dim(1, 16)}, seed + 31, 2e-3), seed));
  }
  {
    nn::Dropout<double> layer(0.2);
    out.push_back(check_layer(layer, random_tensor({dim(1, 16), dim(1, 16)}, seed + 41), seed, nn::Mode::Eval));
  }
  {
    const nn::Shape shape{dim(1, 16), dim(1, 16)};
    out.push_back(check_mse(random_tensor(shape, seed + 51), random_tensor(shape, seed + 52), nn::Reduction::Sum));
    out.push_back(check_mse(random_tensor(shape, seed + 53), random_tensor(shape, seed + 54), nn::Reduction::Mean));
  }
  return out;
}

}  // namespace cae::testing
