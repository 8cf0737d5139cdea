#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cae/nn/layers.hpp"

namespace cae::nn {

struct AdamConfig {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// First/second moment buffers mirror the parameter list they were created for.
template <typename T>
class Adam {
 public:
  Adam(std::span<const Param<T>> params, AdamConfig config = {});

  // theta <- theta - lr * m_hat / (sqrt(v_hat) + eps), t incremented first.
  void step(std::span<const Param<T>> params);

  std::uint64_t steps() const { return t_; }
  const AdamConfig& config() const { return config_; }
  const std::vector<std::vector<T>>& first_moments() const { return m_; }
  const std::vector<std::vector<T>>& second_moments() const { return v_; }

 private:
  AdamConfig config_;
  std::uint64_t t_ = 0;
  std::vector<std::vector<T>> m_, v_;
};

extern template class Adam<float>;
extern template class Adam<double>;

}  // namespace cae::nn
