#include "smpred/nn/loss.hpp"

#include <stdexcept>

namespace smpred::nn {

double mse(const Matrix& pred, const Matrix& target) {
    if (pred.rows() != target.rows() || pred.cols() != target.cols()) {
        throw std::invalid_argument("mse: shape mismatch");
    }
    if (pred.size() == 0) throw std::invalid_argument("mse: empty input");
    return (pred - target).squaredNorm() / static_cast<double>(pred.size());
}

Matrix mse_grad(const Matrix& pred, const Matrix& target) {
    if (pred.rows() != target.rows() || pred.cols() != target.cols()) {
        throw std::invalid_argument("mse_grad: shape mismatch");
    }
    if (pred.size() == 0) throw std::invalid_argument("mse_grad: empty input");
    return 2.0 / static_cast<double>(pred.size()) * (pred - target);
}

}  // namespace smpred::nn
