#include "cae/nn/sequential.hpp"

#include <string>

namespace cae::nn {

template <typename T>
BasicTensor<T> Sequential<T>::forward(const BasicTensor<T>& x, Mode mode, Rng* rng) {
  if (layers_.empty()) return x;
  BasicTensor<T> h = layers_.front()->forward(x, mode, rng);
  for (std::size_t i = 1; i < layers_.size(); ++i) h = layers_[i]->forward(h, mode, rng);
  return h;
}

template <typename T>
BasicTensor<T> Sequential<T>::backward(const BasicTensor<T>& grad_out) {
  BasicTensor<T> g = grad_out;
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) g = (*it)->backward(g);
  return g;
}

template <typename T>
BasicTensor<T> Sequential<T>::infer(const BasicTensor<T>& x) const {
  if (layers_.empty()) return x;
  BasicTensor<T> h = layers_.front()->infer(x);
  for (std::size_t i = 1; i < layers_.size(); ++i) h = layers_[i]->infer(h);
  return h;
}

template <typename T>
std::vector<Param<T>> Sequential<T>::params() {
  std::vector<Param<T>> out;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    for (auto& p : layers_[i]->params()) {
      p.name = std::to_string(i) + "." + p.name;
      out.push_back(std::move(p));
    }
  }
  return out;
}

template <typename T>
std::size_t Sequential<T>::parameter_count() {
  std::size_t n = 0;
  for (const auto& p : params()) n += p.value->size();
  return n;
}

template <typename T>
void Sequential<T>::zero_grad() {
  for (auto& p : params()) p.grad->fill(T{0});
}

template <typename T>
void Sequential<T>::init(Rng& rng) {
  for (auto& l : layers_) l->init(rng);
}

template <typename T>
void Sequential<T>::clear_state() {
  for (auto& l : layers_) l->clear_state();
}

template class Sequential<float>;
template class Sequential<double>;

}  // namespace cae::nn
