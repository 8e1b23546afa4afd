#pragma once

#include <string>
#include <vector>

#include "smpred/nn/tensor.hpp"
#include "smpred/rng.hpp"

namespace smpred::nn {

/// Per-step activations needed to run the step backward.
struct LstmLayerCache {
    Matrix x, h_prev, c_prev;
    Matrix i, f, g, o;  // gate activations, H x B
    Matrix tanh_c;      // tanh of the new cell state
};

/// Whole-window activations for the sequence API, laid out as wide matrices
/// with one column block of width B per time step (T blocks total). Storage
/// is reused across calls once sized.
struct LstmSequenceCache {
    int steps = 0;
    int batch = 0;
    std::vector<Matrix> x;       // [L+1]: x[0] = stack input, x[l+1] = layer l's h
                                 // sequence; x[l] is in_l x (T*B)
    std::vector<Matrix> gates;   // [L]: activated i,f,g,o stacked, 4H x (T*B)
    std::vector<Matrix> h_prev;  // [L]: h_{t-1} per step, H x (T*B)
    std::vector<Matrix> c_prev;  // [L]: c_{t-1} per step, H x (T*B)
    std::vector<Matrix> tanh_c;  // [L]: tanh(c_t) per step, H x (T*B)
    std::vector<Matrix> dpre;    // [L]: backward workspace, 4H x (T*B)
    Matrix scratch;              // step-sized temporaries
};

/// Single LSTM layer with fused gate matrices, gate row order i, f, g, o:
///   pre = Wx x + Wh h_prev + b          (4H x B)
///   c   = f . c_prev + i . g
///   h   = o . tanh(c)
class LstmLayer {
public:
    LstmLayer(std::string name, int in, int hidden);

    /// Glorot-uniform Wx and Wh; bias zero except the forget-gate slice,
    /// which starts at one.
    void init(Rng& rng);

    /// Advances one step; writes the new cell state to c_out and returns h.
    Matrix step(const Matrix& x, const Matrix& h_prev, const Matrix& c_prev, Matrix& c_out,
                LstmLayerCache& cache) const;

    /// Runs one step backward. dh/dc are the incoming gradients for this
    /// step's outputs; dh_prev/dc_prev receive recurrent gradients for the
    /// previous step. Accumulates parameter gradients and returns dx.
    Matrix backward_step(const Matrix& dh, const Matrix& dc, const LstmLayerCache& cache,
                         Matrix& dh_prev, Matrix& dc_prev);

    void zero_grad();
    std::vector<TensorView> parameters();

    int in_size() const { return in_; }
    int hidden_size() const { return hidden_; }

private:
    friend class LstmStack;  // sequence methods batch GEMMs across steps

    std::string name_;
    int in_, hidden_;
    Matrix wx_, wh_, b_;     // 4H x in, 4H x H, 4H x 1
    Matrix dwx_, dwh_, db_;
};

/// Recurrent state for a stack of layers: h[l], c[l] are H_l x B.
struct LstmState {
    std::vector<Matrix> h, c;
};

/// Vertically stacked LSTM layers; the output of layer l feeds layer l+1.
class LstmStack {
public:
    LstmStack(std::string name, int input, const std::vector<int>& hidden_sizes);

    void init(Rng& rng);
    LstmState zero_state(int batch) const;

    /// One time step through the whole stack. `caches` gets one entry per
    /// layer; the state is advanced in place. Returns the top layer's h.
    Matrix step(const Matrix& x, LstmState& state, std::vector<LstmLayerCache>& caches) const;

    /// Backward through one time step, top layer first. `dtop` is the
    /// gradient w.r.t. the returned h; dh/dc carry recurrent gradients per
    /// layer between consecutive calls (step t uses and then replaces the
    /// values from step t+1). Returns dx. Gradients w.r.t. the initial state
    /// are left in dh/dc after the last call and are meant to be dropped.
    Matrix backward_step(const Matrix& dtop, const std::vector<LstmLayerCache>& caches,
                         std::vector<Matrix>& dh, std::vector<Matrix>& dc);

    /// dh/dc buffers of zeros matching zero_state shapes.
    void zero_state_grads(int batch, std::vector<Matrix>& dh, std::vector<Matrix>& dc) const;

    /// Whole-window forward, layer-major: each layer runs over every time
    /// step before the next layer starts, so the input projection Wx X and
    /// the bias are applied to all steps in one pass and only the Wh h_prev
    /// term stays sequential. `x_all` holds the window step-major in column
    /// blocks of width `batch` (in x steps*batch). The state is advanced in
    /// place. Returns the top layer's h sequence by reference into the cache
    /// (valid until the next call). Matches repeated step() calls up to
    /// floating-point associativity.
    const Matrix& forward_sequence(const Matrix& x_all, int steps, int batch, LstmState& state,
                                   LstmSequenceCache& cache) const;

    /// Backward for forward_sequence. `dtop_all` is the gradient w.r.t. the
    /// returned h sequence (same layout). Parameter gradients accumulate;
    /// per-layer weight gradients are formed as single wide GEMMs over the
    /// whole window. Gradients w.r.t. the initial state are dropped. Returns
    /// dx_all by reference into cache storage (valid until the next call).
    const Matrix& backward_sequence(const Matrix& dtop_all, LstmSequenceCache& cache);

    void zero_grad();
    std::vector<TensorView> parameters();

    std::size_t layer_count() const { return layers_.size(); }
    int input_size() const { return input_; }
    int output_size() const;

private:
    int input_;
    std::vector<LstmLayer> layers_;
};

}  // namespace smpred::nn
