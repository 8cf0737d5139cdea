#include "cae/nn/adam.hpp"

#include <cmath>

#include "cae/error.hpp"

namespace cae::nn {

template <typename T>
Adam<T>::Adam(std::span<const Param<T>> params, AdamConfig config) : config_(config) {
  if (!(config.learning_rate > 0.0)) throw InvalidArgument("learning rate must be positive");
  m_.reserve(params.size());
  v_.reserve(params.size());
  for (const auto& p : params) {
    m_.emplace_back(p.value->size(), T{0});
    v_.emplace_back(p.value->size(), T{0});
  }
}

template <typename T>
void Adam<T>::step(std::span<const Param<T>> params) {
  if (params.size() != m_.size()) throw ShapeError("adam: parameter list changed since construction");
  ++t_;
  const double b1 = config_.beta1, b2 = config_.beta2;
  const double bc1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  const T lr = static_cast<T>(config_.learning_rate);
  const T eps = static_cast<T>(config_.epsilon);
  const T tb1 = static_cast<T>(b1), tb2 = static_cast<T>(b2);
  const T inv_bc1 = static_cast<T>(1.0 / bc1), inv_bc2 = static_cast<T>(1.0 / bc2);

  for (std::size_t k = 0; k < params.size(); ++k) {
    auto& value = *params[k].value;
    const auto& grad = *params[k].grad;
    auto& m = m_[k];
    auto& v = v_[k];
    if (grad.size() != value.size() || m.size() != value.size()) {
      throw ShapeError("adam: shape mismatch for parameter " + params[k].name);
    }
    T* w = value.data();
    const T* g = grad.data();
    for (std::size_t i = 0; i < value.size(); ++i) {
      m[i] = tb1 * m[i] + (T{1} - tb1) * g[i];
      v[i] = tb2 * v[i] + (T{1} - tb2) * g[i] * g[i];
      const T m_hat = m[i] * inv_bc1;
      const T v_hat = v[i] * inv_bc2;
      w[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
    }
  }
}

template class Adam<float>;
template class Adam<double>;

}  // namespace cae::nn
