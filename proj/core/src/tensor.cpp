#include "cae/nn/tensor.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

#include "cae/error.hpp"

namespace cae::nn {

std::size_t shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_string(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

template <typename T>
BasicTensor<T>::BasicTensor(Shape shape, T fill) : shape_(std::move(shape)), values_(shape_size(shape_), fill) {}

template <typename T>
BasicTensor<T>::BasicTensor(Shape shape, std::vector<T> values) : shape_(std::move(shape)), values_(std::move(values)) {
  if (shape_size(shape_) != values_.size()) {
    throw ShapeError("tensor shape " + shape_string(shape_) + " does not match " + std::to_string(values_.size()) +
                     " values");
  }
}

template <typename T>
void BasicTensor<T>::reshape(Shape shape) {
  if (shape_size(shape) != values_.size()) {
    throw ShapeError("cannot reshape " + shape_string(shape_) + " to " + shape_string(shape));
  }
  shape_ = std::move(shape);
}

template <typename T>
BasicTensor<T> BasicTensor<T>::reshaped(Shape shape) const {
  BasicTensor out = *this;
  out.reshape(std::move(shape));
  return out;
}

template <typename T>
void BasicTensor<T>::fill(T v) {
  std::fill(values_.begin(), values_.end(), v);
}

template class BasicTensor<float>;
template class BasicTensor<double>;

}  // namespace cae::nn
