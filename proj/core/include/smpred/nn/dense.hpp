#pragma once

#include <string>
#include <vector>

#include "smpred/nn/tensor.hpp"
#include "smpred/rng.hpp"

namespace smpred::nn {

enum class Activation { Identity, Relu };

struct DenseCache {
    Matrix x;  // input, in x B
    Matrix z;  // pre-activation, out x B
};

/// Fully connected layer, column-per-sample convention: Y = act(W X + b).
class DenseLayer {
public:
    DenseLayer(std::string name, int in, int out, Activation act);

    /// Glorot-uniform W (fan_in = columns, fan_out = rows), zero bias.
    void init(Rng& rng);

    Matrix forward(const Matrix& x, DenseCache& cache) const;
    /// Accumulates parameter gradients, returns gradient w.r.t. the input.
    Matrix backward(const Matrix& dy, const DenseCache& cache);

    void zero_grad();
    std::vector<TensorView> parameters();

    int in_size() const { return in_; }
    int out_size() const { return out_; }
    const std::string& name() const { return name_; }

private:
    std::string name_;
    int in_, out_;
    Activation act_;
    Matrix w_, b_;    // out x in, out x 1
    Matrix dw_, db_;
};

/// Shared init rule: uniform on +-sqrt(6 / (fan_in + fan_out)), filled in
/// storage order so the draw sequence is reproducible.
void glorot_uniform(Matrix& w, Rng& rng);

}  // namespace smpred::nn
