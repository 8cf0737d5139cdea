#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "cae/nn/tensor.hpp"
#include "cae/random.hpp"

namespace cae::nn {

enum class LayerKind : std::uint8_t { Dense, Conv3x3Same, ReLU, Dropout, Reshape };

std::string_view to_string(LayerKind kind);

enum class Mode { Train, Eval };

template <typename T>
struct Param {
  std::string name;
  BasicTensor<T>* value = nullptr;
  BasicTensor<T>* grad = nullptr;
};

// Forward kernels. Inputs carry a leading batch dimension unless noted.

// x [N, in], weight [out, in], bias [out] -> [N, out]; y = W x + b per row.
template <typename T>
BasicTensor<T> dense_forward(const BasicTensor<T>& x, const BasicTensor<T>& weight, const BasicTensor<T>& bias);

// Cross-correlation with a 3x3 kernel and one pixel of zero padding.
// x [N, C, H, W] or [C, H, W]; kernels [O, C, 3, 3]; bias [O].
template <typename T>
BasicTensor<T> conv3x3_same_forward(const BasicTensor<T>& x, const BasicTensor<T>& kernels,
                                    const BasicTensor<T>& bias);

template <typename T>
BasicTensor<T> relu(const BasicTensor<T>& x);

// Inverted dropout. In Train mode each element is zeroed with probability p
// and survivors are scaled by 1/(1-p); Eval mode is the identity.
template <typename T>
BasicTensor<T> dropout(const BasicTensor<T>& x, double p, Mode mode, Rng& rng);

// A differentiable layer. forward() records whatever backward() needs;
// backward() accumulates parameter gradients and returns dL/dx.
template <typename T>
class Layer {
 public:
  virtual ~Layer() = default;

  virtual LayerKind kind() const = 0;
  virtual BasicTensor<T> forward(const BasicTensor<T>& x, Mode mode, Rng* rng) = 0;
  virtual BasicTensor<T> backward(const BasicTensor<T>& grad_out) = 0;
  // Eval-mode forward that records nothing; safe to call concurrently.
  virtual BasicTensor<T> infer(const BasicTensor<T>& x) const = 0;
  virtual std::vector<Param<T>> params() { return {}; }
  virtual void init(Rng& /*rng*/) {}
  virtual std::string describe() const = 0;

  // Drops cached activations.
  virtual void clear_state() = 0;
};

template <typename T>
class Dense final : public Layer<T> {
 public:
  Dense(std::size_t in, std::size_t out);

  LayerKind kind() const override { return LayerKind::Dense; }
  BasicTensor<T> forward(const BasicTensor<T>& x, Mode mode, Rng* rng) override;
  BasicTensor<T> backward(const BasicTensor<T>& grad_out) override;
  BasicTensor<T> infer(const BasicTensor<T>& x) const override;
  std::vector<Param<T>> params() override;
  void init(Rng& rng) override;  // Glorot uniform weights, zero bias
  std::string describe() const override;
  void clear_state() override { input_ = {}; }

  std::size_t in_features() const { return in_; }
  std::size_t out_features() const { return out_; }
  BasicTensor<T>& weight() { return weight_; }
  BasicTensor<T>& bias() { return bias_; }

 private:
  std::size_t in_, out_;
  BasicTensor<T> weight_, bias_, grad_weight_, grad_bias_;
  BasicTensor<T> input_;
};

template <typename T>
class Conv3x3Same final : public Layer<T> {
 public:
  Conv3x3Same(std::size_t in_channels, std::size_t out_channels);

  LayerKind kind() const override { return LayerKind::Conv3x3Same; }
  BasicTensor<T> forward(const BasicTensor<T>& x, Mode mode, Rng* rng) override;
  BasicTensor<T> backward(const BasicTensor<T>& grad_out) override;
  BasicTensor<T> infer(const BasicTensor<T>& x) const override;
  std::vector<Param<T>> params() override;
  void init(Rng& rng) override;
  std::string describe() const override;
  void clear_state() override { input_ = {}; }

  std::size_t in_channels() const { return in_ch_; }
  std::size_t out_channels() const { return out_ch_; }
  BasicTensor<T>& kernels() { return kernels_; }
  BasicTensor<T>& bias() { return bias_; }

 private:
  std::size_t in_ch_, out_ch_;
  BasicTensor<T> kernels_, bias_, grad_kernels_, grad_bias_;
  BasicTensor<T> input_;
};

template <typename T>
class ReLU final : public Layer<T> {
 public:
  LayerKind kind() const override { return LayerKind::ReLU; }
  BasicTensor<T> forward(const BasicTensor<T>& x, Mode mode, Rng* rng) override;
  BasicTensor<T> backward(const BasicTensor<T>& grad_out) override;
  BasicTensor<T> infer(const BasicTensor<T>& x) const override;
  std::string describe() const override { return "ReLU"; }
  void clear_state() override { output_ = {}; }

 private:
  BasicTensor<T> output_;
};

template <typename T>
class Dropout final : public Layer<T> {
 public:
  explicit Dropout(double rate);

  LayerKind kind() const override { return LayerKind::Dropout; }
  BasicTensor<T> forward(const BasicTensor<T>& x, Mode mode, Rng* rng) override;
  BasicTensor<T> backward(const BasicTensor<T>& grad_out) override;
  BasicTensor<T> infer(const BasicTensor<T>& x) const override;
  std::string describe() const override;
  void clear_state() override {
    mask_.clear();
    has_state_ = false;
  }

  double rate() const { return rate_; }

 private:
  double rate_;
  std::vector<T> mask_;  // empty in eval mode: identity
  bool has_state_ = false;
};

// Changes the per-sample shape; the batch dimension is preserved.
template <typename T>
class Reshape final : public Layer<T> {
 public:
  explicit Reshape(Shape sample_shape) : sample_shape_(std::move(sample_shape)) {}

  LayerKind kind() const override { return LayerKind::Reshape; }
  BasicTensor<T> forward(const BasicTensor<T>& x, Mode mode, Rng* rng) override;
  BasicTensor<T> backward(const BasicTensor<T>& grad_out) override;
  BasicTensor<T> infer(const BasicTensor<T>& x) const override;
  std::string describe() const override;
  void clear_state() override { input_shape_.clear(); }

  const Shape& sample_shape() const { return sample_shape_; }

 private:
  Shape sample_shape_;
  Shape input_shape_;
};

}  // namespace cae::nn
