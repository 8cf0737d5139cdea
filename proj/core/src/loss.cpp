#include "cae/nn/loss.hpp"

#include "cae/error.hpp"

namespace cae::nn {

namespace {

template <typename T>
void check_shapes(const BasicTensor<T>& a, const BasicTensor<T>& b) {
  if (a.shape() != b.shape()) {
    throw ShapeError("mse: shape " + shape_string(a.shape()) + " vs " + shape_string(b.shape()));
  }
}

}  // namespace

template <typename T>
LossResult<T> mse_loss(const BasicTensor<T>& target, const BasicTensor<T>& prediction, Reduction reduction) {
  check_shapes(target, prediction);
  LossResult<T> r;
  r.grad = BasicTensor<T>(prediction.shape());
  const double scale = reduction == Reduction::Mean && !target.empty() ? 1.0 / static_cast<double>(target.size()) : 1.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    const double d = static_cast<double>(prediction[i]) - static_cast<double>(target[i]);
    acc += d * d;
    r.grad[i] = static_cast<T>(2.0 * d * scale);
  }
  r.value = acc * scale;
  return r;
}

template <typename T>
double mse_value(const BasicTensor<T>& target, const BasicTensor<T>& prediction, Reduction reduction) {
  check_shapes(target, prediction);
  double acc = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    const double d = static_cast<double>(prediction[i]) - static_cast<double>(target[i]);
    acc += d * d;
  }
  if (reduction == Reduction::Mean && !target.empty()) acc /= static_cast<double>(target.size());
  return acc;
}

template LossResult<float> mse_loss(const BasicTensor<float>&, const BasicTensor<float>&, Reduction);
template LossResult<double> mse_loss(const BasicTensor<double>&, const BasicTensor<double>&, Reduction);
template double mse_value(const BasicTensor<float>&, const BasicTensor<float>&, Reduction);
template double mse_value(const BasicTensor<double>&, const BasicTensor<double>&, Reduction);

}  // namespace cae::nn
