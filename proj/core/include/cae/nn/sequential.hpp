#pragma once

#include <memory>
#include <vector>

#include "cae/nn/layers.hpp"

namespace cae::nn {

template <typename T>
class Sequential {
 public:
  Sequential() = default;
  Sequential(Sequential&&) noexcept = default;
  Sequential& operator=(Sequential&&) noexcept = default;

  template <typename L, typename... Args>
  L& emplace(Args&&... args) {
    auto layer = std::make_unique<L>(std::forward<Args>(args)...);
    L& ref = *layer;
    layers_.push_back(std::move(layer));
    return ref;
  }

  void add(std::unique_ptr<Layer<T>> layer) { layers_.push_back(std::move(layer)); }

  BasicTensor<T> forward(const BasicTensor<T>& x, Mode mode, Rng* rng = nullptr);
  BasicTensor<T> backward(const BasicTensor<T>& grad_out);
  BasicTensor<T> infer(const BasicTensor<T>& x) const;

  std::vector<Param<T>> params();
  std::size_t parameter_count();
  void zero_grad();
  void init(Rng& rng);
  void clear_state();

  std::size_t size() const { return layers_.size(); }
  Layer<T>& layer(std::size_t i) { return *layers_.at(i); }
  const Layer<T>& layer(std::size_t i) const { return *layers_.at(i); }

 private:
  std::vector<std::unique_ptr<Layer<T>>> layers_;
};

extern template class Sequential<float>;
extern template class Sequential<double>;

}  // namespace cae::nn
