#include "cae/nn/layers.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>

#include "cae/error.hpp"

namespace cae::nn {

namespace {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MapMat = Eigen::Map<RowMat<T>>;
template <typename T>
using CMapMat = Eigen::Map<const RowMat<T>>;

template <typename T>
void glorot_uniform(BasicTensor<T>& w, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (auto& v : w.values()) v = static_cast<T>(rng.uniform(-limit, limit));
}

// cols[(c*9 + ky*3 + kx), (y*W + x)] = x[c, y+ky-1, x+kx-1], zero outside.
template <typename T>
void im2col(const T* img, std::size_t C, std::size_t H, std::size_t W, T* cols) {
  const std::size_t HW = H * W;
  for (std::size_t c = 0; c < C; ++c) {
    for (std::size_t ky = 0; ky < 3; ++ky) {
      for (std::size_t kx = 0; kx < 3; ++kx) {
        T* row = cols + (c * 9 + ky * 3 + kx) * HW;
        for (std::size_t y = 0; y < H; ++y) {
          const auto sy = static_cast<std::ptrdiff_t>(y + ky) - 1;
          T* out = row + y * W;
          if (sy < 0 || sy >= static_cast<std::ptrdiff_t>(H)) {
            std::fill(out, out + W, T{0});
            continue;
          }
          const T* src = img + (c * H + static_cast<std::size_t>(sy)) * W;
          for (std::size_t x = 0; x < W; ++x) {
            const auto sx = static_cast<std::ptrdiff_t>(x + kx) - 1;
            out[x] = (sx < 0 || sx >= static_cast<std::ptrdiff_t>(W)) ? T{0} : src[sx];
          }
        }
      }
    }
  }
}

template <typename T>
void col2im_add(const T* cols, std::size_t C, std::size_t H, std::size_t W, T* img) {
  const std::size_t HW = H * W;
  for (std::size_t c = 0; c < C; ++c) {
    for (std::size_t ky = 0; ky < 3; ++ky) {
      for (std::size_t kx = 0; kx < 3; ++kx) {
        const T* row = cols + (c * 9 + ky * 3 + kx) * HW;
        for (std::size_t y = 0; y < H; ++y) {
          const auto sy = static_cast<std::ptrdiff_t>(y + ky) - 1;
          if (sy < 0 || sy >= static_cast<std::ptrdiff_t>(H)) continue;
          T* dst = img + (c * H + static_cast<std::size_t>(sy)) * W;
          const T* in = row + y * W;
          for (std::size_t x = 0; x < W; ++x) {
            const auto sx = static_cast<std::ptrdiff_t>(x + kx) - 1;
            if (sx >= 0 && sx < static_cast<std::ptrdiff_t>(W)) dst[sx] += in[x];
          }
        }
      }
    }
  }
}

template <typename T>
void require_state(bool ok, std::string_view layer) {
  if (!ok) throw Error(std::string(layer) + ": backward called without a recorded forward pass");
}

}  // namespace

std::string_view to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::Dense:
      return "dense";
    case LayerKind::Conv3x3Same:
      return "conv3x3_same";
    case LayerKind::ReLU:
      return "relu";
    case LayerKind::Dropout:
      return "dropout";
    case LayerKind::Reshape:
      return "reshape";
  }
  return "?";
}

// ---------------------------------------------------------------- kernels

template <typename T>
BasicTensor<T> dense_forward(const BasicTensor<T>& x, const BasicTensor<T>& weight, const BasicTensor<T>& bias) {
  if (weight.rank() != 2 || bias.rank() != 1 || bias.dim(0) != weight.dim(0)) {
    throw ShapeError("dense: weight must be [out, in] and bias [out]");
  }
  const std::size_t out = weight.dim(0), in = weight.dim(1);
  if (x.rank() == 0 || x.size() % in != 0 || x.shape().back() != in) {
    throw ShapeError("dense: input " + shape_string(x.shape()) + " does not end in " + std::to_string(in));
  }
  const std::size_t n = x.size() / in;
  Shape out_shape = x.shape();
  out_shape.back() = out;
  BasicTensor<T> y(out_shape);
  CMapMat<T> X(x.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(in));
  CMapMat<T> Wm(weight.data(), static_cast<Eigen::Index>(out), static_cast<Eigen::Index>(in));
  MapMat<T> Y(y.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(out));
  Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>> b(bias.data(), static_cast<Eigen::Index>(out));
  Y.noalias() = X * Wm.transpose();
  Y.rowwise() += b;
  return y;
}

template <typename T>
BasicTensor<T> conv3x3_same_forward(const BasicTensor<T>& x, const BasicTensor<T>& kernels,
                                    const BasicTensor<T>& bias) {
  if (kernels.rank() != 4 || kernels.dim(2) != 3 || kernels.dim(3) != 3) {
    throw ShapeError("conv3x3: kernels must be [out, in, 3, 3], got " + shape_string(kernels.shape()));
  }
  const std::size_t O = kernels.dim(0), C = kernels.dim(1);
  if (bias.rank() != 1 || bias.dim(0) != O) throw ShapeError("conv3x3: bias must be [out]");
  const bool batched = x.rank() == 4;
  if (!batched && x.rank() != 3) throw ShapeError("conv3x3: input must be [C,H,W] or [N,C,H,W]");
  const std::size_t N = batched ? x.dim(0) : 1;
  const std::size_t off = batched ? 1 : 0;
  if (x.dim(off) != C) {
    throw ShapeError("conv3x3: input has " + std::to_string(x.dim(off)) + " channels, kernel expects " +
                     std::to_string(C));
  }
  const std::size_t H = x.dim(off + 1), W = x.dim(off + 2), HW = H * W;
  if (H < 1 || W < 1) throw ShapeError("conv3x3: empty spatial dims");

  BasicTensor<T> y(batched ? Shape{N, O, H, W} : Shape{O, H, W});
  std::vector<T> cols(C * 9 * HW);
  CMapMat<T> K(kernels.data(), static_cast<Eigen::Index>(O), static_cast<Eigen::Index>(C * 9));
  Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, 1>> b(bias.data(), static_cast<Eigen::Index>(O));
  for (std::size_t n = 0; n < N; ++n) {
    im2col(x.data() + n * C * HW, C, H, W, cols.data());
    CMapMat<T> Cols(cols.data(), static_cast<Eigen::Index>(C * 9), static_cast<Eigen::Index>(HW));
    MapMat<T> Y(y.data() + n * O * HW, static_cast<Eigen::Index>(O), static_cast<Eigen::Index>(HW));
    Y.noalias() = K * Cols;
    Y.colwise() += b;
  }
  return y;
}

template <typename T>
BasicTensor<T> relu(const BasicTensor<T>& x) {
  BasicTensor<T> y = x;
  for (auto& v : y.values()) v = v < T{0} ? T{0} : v;  // NaN passes through
  return y;
}

template <typename T>
BasicTensor<T> dropout(const BasicTensor<T>& x, double p, Mode mode, Rng& rng) {
  if (!(p >= 0.0 && p < 1.0)) throw InvalidArgument("dropout rate must lie in [0, 1)");
  if (mode == Mode::Eval || p == 0.0) return x;
  BasicTensor<T> y = x;
  const T scale = static_cast<T>(1.0 / (1.0 - p));
  for (auto& v : y.values()) v = rng.bernoulli(p) ? T{0} : v * scale;
  return y;
}

// ---------------------------------------------------------------- Dense

template <typename T>
Dense<T>::Dense(std::size_t in, std::size_t out)
    : in_(in),
      out_(out),
      weight_({out, in}),
      bias_({out}),
      grad_weight_({out, in}),
      grad_bias_({out}) {
  if (in == 0 || out == 0) throw InvalidArgument("dense layer dimensions must be positive");
}

template <typename T>
BasicTensor<T> Dense<T>::forward(const BasicTensor<T>& x, Mode /*mode*/, Rng* /*rng*/) {
  auto y = dense_forward(x, weight_, bias_);
  input_ = x;
  return y;
}

template <typename T>
BasicTensor<T> Dense<T>::backward(const BasicTensor<T>& grad_out) {
  require_state<T>(!input_.empty(), "dense");
  const std::size_t n = input_.size() / in_;
  if (grad_out.size() != n * out_) throw ShapeError("dense backward: gradient shape mismatch");
  const auto N = static_cast<Eigen::Index>(n), I = static_cast<Eigen::Index>(in_), O = static_cast<Eigen::Index>(out_);
  CMapMat<T> X(input_.data(), N, I);
  CMapMat<T> G(grad_out.data(), N, O);
  CMapMat<T> Wm(weight_.data(), O, I);
  MapMat<T>(grad_weight_.data(), O, I).noalias() += G.transpose() * X;
  for (std::size_t o = 0; o < out_; ++o) {
    double acc = 0.0;
    for (std::size_t r = 0; r < n; ++r) acc += static_cast<double>(grad_out[r * out_ + o]);
    grad_bias_[o] += static_cast<T>(acc);
  }
  BasicTensor<T> dx(input_.shape());
  MapMat<T>(dx.data(), N, I).noalias() = G * Wm;
  return dx;
}

template <typename T>
BasicTensor<T> Dense<T>::infer(const BasicTensor<T>& x) const {
  return dense_forward(x, weight_, bias_);
}

template <typename T>
std::vector<Param<T>> Dense<T>::params() {
  return {{"weight", &weight_, &grad_weight_}, {"bias", &bias_, &grad_bias_}};
}

template <typename T>
void Dense<T>::init(Rng& rng) {
  glorot_uniform(weight_, in_, out_, rng);
  bias_.fill(T{0});
}

template <typename T>
std::string Dense<T>::describe() const {
  return "Dense(" + std::to_string(in_) + "->" + std::to_string(out_) + ")";
}

// ---------------------------------------------------------------- Conv3x3Same

template <typename T>
Conv3x3Same<T>::Conv3x3Same(std::size_t in_channels, std::size_t out_channels)
    : in_ch_(in_channels),
      out_ch_(out_channels),
      kernels_({out_channels, in_channels, 3, 3}),
      bias_({out_channels}),
      grad_kernels_({out_channels, in_channels, 3, 3}),
      grad_bias_({out_channels}) {
  if (in_channels == 0 || out_channels == 0) throw InvalidArgument("conv channel counts must be positive");
}

template <typename T>
BasicTensor<T> Conv3x3Same<T>::forward(const BasicTensor<T>& x, Mode /*mode*/, Rng* /*rng*/) {
  if (x.rank() != 4) throw ShapeError("conv3x3 layer expects [N, C, H, W], got " + shape_string(x.shape()));
  auto y = conv3x3_same_forward(x, kernels_, bias_);
  input_ = x;
  return y;
}

template <typename T>
BasicTensor<T> Conv3x3Same<T>::backward(const BasicTensor<T>& grad_out) {
  require_state<T>(!input_.empty(), "conv3x3");
  const std::size_t N = input_.dim(0), C = in_ch_, H = input_.dim(2), W = input_.dim(3), HW = H * W;
  const std::size_t O = out_ch_;
  if (grad_out.shape() != Shape{N, O, H, W}) throw ShapeError("conv3x3 backward: gradient shape mismatch");

  BasicTensor<T> dx(input_.shape());
  std::vector<T> cols(C * 9 * HW), dcols(C * 9 * HW);
  const auto Oi = static_cast<Eigen::Index>(O), C9 = static_cast<Eigen::Index>(C * 9),
             HWi = static_cast<Eigen::Index>(HW);
  CMapMat<T> K(kernels_.data(), Oi, C9);
  MapMat<T> dK(grad_kernels_.data(), Oi, C9);
  std::vector<double> bias_acc(O, 0.0);
  for (std::size_t n = 0; n < N; ++n) {
    im2col(input_.data() + n * C * HW, C, H, W, cols.data());
    CMapMat<T> Cols(cols.data(), C9, HWi);
    CMapMat<T> G(grad_out.data() + n * O * HW, Oi, HWi);
    dK.noalias() += G * Cols.transpose();
    MapMat<T> dCols(dcols.data(), C9, HWi);
    dCols.noalias() = K.transpose() * G;
    col2im_add(dcols.data(), C, H, W, dx.data() + n * C * HW);
    for (std::size_t o = 0; o < O; ++o) {
      const T* g = grad_out.data() + (n * O + o) * HW;
      double acc = 0.0;
      for (std::size_t i = 0; i < HW; ++i) acc += static_cast<double>(g[i]);
      bias_acc[o] += acc;
    }
  }
  for (std::size_t o = 0; o < O; ++o) grad_bias_[o] += static_cast<T>(bias_acc[o]);
  return dx;
}

template <typename T>
BasicTensor<T> Conv3x3Same<T>::infer(const BasicTensor<T>& x) const {
  if (x.rank() != 4) throw ShapeError("conv3x3 layer expects [N, C, H, W], got " + shape_string(x.shape()));
  return conv3x3_same_forward(x, kernels_, bias_);
}

template <typename T>
std::vector<Param<T>> Conv3x3Same<T>::params() {
  return {{"kernels", &kernels_, &grad_kernels_}, {"bias", &bias_, &grad_bias_}};
}

template <typename T>
void Conv3x3Same<T>::init(Rng& rng) {
  glorot_uniform(kernels_, in_ch_ * 9, out_ch_ * 9, rng);
  bias_.fill(T{0});
}

template <typename T>
std::string Conv3x3Same<T>::describe() const {
  return "Conv3x3Same(" + std::to_string(in_ch_) + "->" + std::to_string(out_ch_) + ")";
}

// ---------------------------------------------------------------- ReLU

template <typename T>
BasicTensor<T> ReLU<T>::forward(const BasicTensor<T>& x, Mode /*mode*/, Rng* /*rng*/) {
  output_ = relu(x);
  return output_;
}

template <typename T>
BasicTensor<T> ReLU<T>::backward(const BasicTensor<T>& grad_out) {
  require_state<T>(!output_.empty(), "relu");
  if (grad_out.size() != output_.size()) throw ShapeError("relu backward: gradient shape mismatch");
  BasicTensor<T> dx = grad_out;
  for (std::size_t i = 0; i < dx.size(); ++i)
    if (!(output_[i] > T{0})) dx[i] = T{0};
  return dx;
}

template <typename T>
BasicTensor<T> ReLU<T>::infer(const BasicTensor<T>& x) const {
  return relu(x);
}

// ---------------------------------------------------------------- Dropout

template <typename T>
Dropout<T>::Dropout(double rate) : rate_(rate) {
  if (!(rate >= 0.0 && rate < 1.0)) throw InvalidArgument("dropout rate must lie in [0, 1)");
}

template <typename T>
BasicTensor<T> Dropout<T>::forward(const BasicTensor<T>& x, Mode mode, Rng* rng) {
  has_state_ = true;
  mask_.clear();
  if (mode == Mode::Eval || rate_ == 0.0) return x;
  if (rng == nullptr) throw InvalidArgument("dropout in train mode needs an Rng");
  mask_.resize(x.size());
  const T scale = static_cast<T>(1.0 / (1.0 - rate_));
  BasicTensor<T> y = x;
  for (std::size_t i = 0; i < y.size(); ++i) {
    mask_[i] = rng->bernoulli(rate_) ? T{0} : scale;
    y[i] *= mask_[i];
  }
  return y;
}

template <typename T>
BasicTensor<T> Dropout<T>::backward(const BasicTensor<T>& grad_out) {
  require_state<T>(has_state_, "dropout");
  if (mask_.empty()) return grad_out;
  if (grad_out.size() != mask_.size()) throw ShapeError("dropout backward: gradient shape mismatch");
  BasicTensor<T> dx = grad_out;
  for (std::size_t i = 0; i < dx.size(); ++i) dx[i] *= mask_[i];
  return dx;
}

template <typename T>
BasicTensor<T> Dropout<T>::infer(const BasicTensor<T>& x) const {
  return x;
}

template <typename T>
std::string Dropout<T>::describe() const {
  return "Dropout(" + std::to_string(rate_) + ")";
}

// ---------------------------------------------------------------- Reshape

template <typename T>
BasicTensor<T> Reshape<T>::infer(const BasicTensor<T>& x) const {
  if (x.rank() == 0) throw ShapeError("reshape: scalar input");
  const std::size_t n = x.dim(0);
  if (x.size() != n * shape_size(sample_shape_)) {
    throw ShapeError("reshape: cannot view " + shape_string(x.shape()) + " as [N]" + shape_string(sample_shape_));
  }
  Shape s{n};
  s.insert(s.end(), sample_shape_.begin(), sample_shape_.end());
  return x.reshaped(std::move(s));
}

template <typename T>
BasicTensor<T> Reshape<T>::forward(const BasicTensor<T>& x, Mode /*mode*/, Rng* /*rng*/) {
  auto y = infer(x);
  input_shape_ = x.shape();
  return y;
}

template <typename T>
BasicTensor<T> Reshape<T>::backward(const BasicTensor<T>& grad_out) {
  require_state<T>(!input_shape_.empty(), "reshape");
  return grad_out.reshaped(input_shape_);
}

template <typename T>
std::string Reshape<T>::describe() const {
  return "Reshape" + shape_string(sample_shape_);
}

#define CAE_INSTANTIATE(T)                                                                                   \
  template BasicTensor<T> dense_forward(const BasicTensor<T>&, const BasicTensor<T>&, const BasicTensor<T>&); \
  template BasicTensor<T> conv3x3_same_forward(const BasicTensor<T>&, const BasicTensor<T>&,                  \
                                               const BasicTensor<T>&);                                        \
  template BasicTensor<T> relu(const BasicTensor<T>&);                                                        \
  template BasicTensor<T> dropout(const BasicTensor<T>&, double, Mode, Rng&);                                 \
  template class Dense<T>;                                                                                    \
  template class Conv3x3Same<T>;                                                                              \
  template class ReLU<T>;                                                                                     \
  template class Dropout<T>;                                                                                  \
  template class Reshape<T>;

CAE_INSTANTIATE(float)
CAE_INSTANTIATE(double)

#undef CAE_INSTANTIATE

}  // namespace cae::nn
