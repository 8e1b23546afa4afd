#pragma once

#include <vector>

#include "smpred/nn/tensor.hpp"

namespace smpred::nn {

struct AdamConfig {
    double lr = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Adam with bias correction, bound to a fixed parameter list. Moment
/// buffers start at zero; step() reads each view's grad and updates its
/// value in place.
class AdamOptimizer {
public:
    explicit AdamOptimizer(std::vector<TensorView> params, AdamConfig cfg = {});

    void step();
    void zero_grad();

    long step_count() const { return t_; }
    const AdamConfig& config() const { return cfg_; }

private:
    AdamConfig cfg_;
    std::vector<TensorView> params_;
    std::vector<Matrix> m_, v_;
    long t_ = 0;
};

}  // namespace smpred::nn
