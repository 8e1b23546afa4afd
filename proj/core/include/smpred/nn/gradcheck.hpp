#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "smpred/nn/tensor.hpp"

namespace smpred::nn {

struct GradCheckConfig {
    double step = 1e-5;                   // central-difference half step
    std::size_t samples_per_tensor = 200; // capped at the tensor's size
    std::uint64_t seed = 0;               // picks which entries to probe
};

struct GradCheckResult {
    double max_rel_error = 0.0;
    std::string worst_tensor;
    std::size_t worst_index = 0;
    double worst_analytic = 0.0;
    double worst_numeric = 0.0;
    std::size_t entries_checked = 0;
};

/// Compares analytic gradients against central differences.
///
/// `compute_grads` must zero the gradient buffers and run a full
/// forward/backward pass; `loss` must run a forward pass and return the
/// scalar loss. Both are called with the current parameter values, so
/// perturbations made here are visible to them. Relative error per entry is
/// |a - n| / max(1, |a|, |n|).
GradCheckResult grad_check(std::vector<TensorView> params,
                           const std::function<void()>& compute_grads,
                           const std::function<double()>& loss,
                           const GradCheckConfig& cfg = {});

}  // namespace smpred::nn
