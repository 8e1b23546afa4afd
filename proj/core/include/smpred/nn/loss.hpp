#pragma once

#include "smpred/nn/tensor.hpp"

namespace smpred::nn {

/// Mean squared error over every element of the matrix (rows x cols).
double mse(const Matrix& pred, const Matrix& target);

/// d(mse)/d(pred) = 2 (pred - target) / N with N the total element count.
Matrix mse_grad(const Matrix& pred, const Matrix& target);

}  // namespace smpred::nn
