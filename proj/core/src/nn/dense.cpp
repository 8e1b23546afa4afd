#include "smpred/nn/dense.hpp"

#include <cmath>
#include <stdexcept>

namespace smpred::nn {

void glorot_uniform(Matrix& w, Rng& rng) {
    const double fan_in = static_cast<double>(w.cols());
    const double fan_out = static_cast<double>(w.rows());
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    double* p = w.data();
    for (Eigen::Index i = 0; i < w.size(); ++i) p[i] = rng.uniform(-limit, limit);
}

DenseLayer::DenseLayer(std::string name, int in, int out, Activation act)
    : name_(std::move(name)), in_(in), out_(out), act_(act) {
    if (in <= 0 || out <= 0) throw std::invalid_argument("dense layer sizes must be positive");
    w_ = Matrix::Zero(out, in);
    b_ = Matrix::Zero(out, 1);
    dw_ = Matrix::Zero(out, in);
    db_ = Matrix::Zero(out, 1);
}

void DenseLayer::init(Rng& rng) {
    glorot_uniform(w_, rng);
    b_.setZero();
}

Matrix DenseLayer::forward(const Matrix& x, DenseCache& cache) const {
    if (x.rows() != in_) {
        throw std::invalid_argument("dense '" + name_ + "': input has " +
                                    std::to_string(x.rows()) + " rows, expected " +
                                    std::to_string(in_));
    }
    cache.x = x;
    cache.z = (w_ * x).colwise() + b_.col(0);
    if (act_ == Activation::Relu) return cache.z.cwiseMax(0.0);
    return cache.z;
}

Matrix DenseLayer::backward(const Matrix& dy, const DenseCache& cache) {
    Matrix dz = dy;
    if (act_ == Activation::Relu) {
        // ReLU'(0) = 0 by convention.
        dz = (cache.z.array() > 0.0).select(dz, Matrix::Zero(dz.rows(), dz.cols()));
    }
    dw_.noalias() += dz * cache.x.transpose();
    db_.col(0) += dz.rowwise().sum();
    return w_.transpose() * dz;
}

void DenseLayer::zero_grad() {
    dw_.setZero();
    db_.setZero();
}

std::vector<TensorView> DenseLayer::parameters() {
    return {{name_ + ".W", &w_, &dw_}, {name_ + ".b", &b_, &db_}};
}

}  // namespace smpred::nn
