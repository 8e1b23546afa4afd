#include "smpred/nn/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace smpred::nn {

AdamOptimizer::AdamOptimizer(std::vector<TensorView> params, AdamConfig cfg)
    : cfg_(cfg), params_(std::move(params)) {
    for (const TensorView& p : params_) {
        if (p.value == nullptr || p.grad == nullptr) {
            throw std::invalid_argument("adam: null tensor view '" + p.name + "'");
        }
        m_.push_back(Matrix::Zero(p.value->rows(), p.value->cols()));
        v_.push_back(Matrix::Zero(p.value->rows(), p.value->cols()));
    }
}

void AdamOptimizer::step() {
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (std::size_t i = 0; i < params_.size(); ++i) {
        const Matrix& g = *params_[i].grad;
        m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * g;
        v_[i] = cfg_.beta2 * v_[i].array().matrix() +
                (1.0 - cfg_.beta2) * g.array().square().matrix();
        const auto m_hat = m_[i].array() / bc1;
        const auto v_hat = v_[i].array() / bc2;
        params_[i].value->array() -= cfg_.lr * m_hat / (v_hat.sqrt() + cfg_.eps);
    }
}

void AdamOptimizer::zero_grad() {
    for (TensorView& p : params_) p.grad->setZero();
}

}  // namespace smpred::nn
