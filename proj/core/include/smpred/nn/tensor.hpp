#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace smpred::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Named handle onto one parameter tensor and its gradient accumulator.
/// Biases are stored as n x 1 matrices so every parameter is a Matrix.
struct TensorView {
    std::string name;
    Matrix* value = nullptr;
    Matrix* grad = nullptr;
};

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace smpred::nn
