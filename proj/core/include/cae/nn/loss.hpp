#pragma once

#include "cae/nn/tensor.hpp"

namespace cae::nn {

enum class Reduction {
  Sum,   // squared Frobenius norm of the difference
  Mean,  // divided by element count; used by the optimizer
};

template <typename T>
struct LossResult {
  double value = 0.0;
  BasicTensor<T> grad;  // d loss / d prediction
};

// Squared reconstruction error between target M and prediction M_hat.
// Sum: ||M - M_hat||_F^2 with gradient 2 (M_hat - M). Mean divides both by
// the element count. Accumulates in double.
template <typename T>
LossResult<T> mse_loss(const BasicTensor<T>& target, const BasicTensor<T>& prediction,
                       Reduction reduction = Reduction::Mean);

// Value only, no gradient allocation.
template <typename T>
double mse_value(const BasicTensor<T>& target, const BasicTensor<T>& prediction,
                 Reduction reduction = Reduction::Mean);

}  // namespace cae::nn
