#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "smpred/models/architecture.hpp"
#include "smpred/nn/dense.hpp"
#include "smpred/nn/lstm.hpp"
#include "smpred/trajectory.hpp"

namespace smpred::models {

/// Forward activations retained for the backward pass. The model lays a
/// window out as one wide matrix with a column block of width B per time
/// step, so every dense layer runs once per window and the LSTM batches its
/// input projections across steps; these fields mirror that layout. Treat as
/// opaque; reusing one cache across calls reuses its storage.
struct ModelCache {
    int steps = 0;
    int batch = 0;
    std::vector<nn::DenseCache> sensor_hidden;  // one wide cache per layer
    nn::LstmSequenceCache lstm;
    nn::DenseCache z_s_proj;
    std::vector<nn::DenseCache> motor_hidden;
    nn::DenseCache z_m_proj;
    nn::DenseCache pred_hidden;
    nn::DenseCache pred_out;
    nn::Matrix s_all, m_all;  // packed inputs, step-major column blocks
    nn::Matrix z_sm;          // predictor input, wide
    nn::Matrix dpred;         // backward workspace, wide
};

/// Per-step encodings produced by the single-window API.
struct EncodedStep {
    nn::Vector z_s;        // 10
    nn::Vector z_m;        // 5, empty for motorless kinds
    nn::Vector z_sm;       // predictor input (z_s, then z_m if present)
    nn::Vector s_hat_next; // predicted next sensor reading, 5
};

/// One of the four predictive architectures. The sensory path maps s_t
/// through dense hidden layers (and an LSTM stack for recurrent kinds) to a
/// linear 10-d code z_s; motor kinds map m_t through dense layers to a
/// linear 5-d code z_m; the predictor maps their concatenation through one
/// 128-unit ReLU layer to the next normalized sensor reading.
class SensorimotorModel {
public:
    explicit SensorimotorModel(ArchitectureSpec spec);

    /// Glorot-uniform weights drawn in parameter order; biases zero except
    /// LSTM forget gates. Deterministic per seed.
    void init_parameters(std::uint64_t seed);

    const ArchitectureSpec& spec() const { return spec_; }
    bool has_motor() const { return spec_.has_motor(); }
    bool is_recurrent() const { return spec_.is_recurrent(); }

    struct Output {
        std::vector<nn::Matrix> z_s;   // per step, z_s_dims x B
        std::vector<nn::Matrix> z_m;   // per step, z_m_dims x B (motor kinds)
        std::vector<nn::Matrix> pred;  // per step, 5 x B
    };

    /// Batched multi-step forward over column-per-sample matrices.
    /// `sensors[t]` is 5 x B, `motors[t]` is 2 x B (ignored by motorless
    /// kinds). Recurrent state starts at `state0` (zero when null) and, if
    /// `state_out` is given, the post-sequence state is stored there.
    Output forward(const std::vector<nn::Matrix>& sensors, const std::vector<nn::Matrix>& motors,
                   ModelCache& cache, const nn::LstmState* state0 = nullptr,
                   nn::LstmState* state_out = nullptr) const;

    /// Accumulates parameter gradients for dL/dpred[t]. Runs truncated BPTT
    /// across the cached window; no gradient flows into the initial state.
    /// The cache doubles as backward workspace.
    void backward(const std::vector<nn::Matrix>& dpred, ModelCache& cache);

    /// Single-window convenience API over normalized records. A window of L
    /// records (L >= 2) yields L-1 encoded steps, each predicting the next
    /// reading. Recurrent kinds may pass a starting state; motorless kinds
    /// must not.
    std::pair<std::vector<EncodedStep>, nn::LstmState> forward_window(
        const std::vector<data::SensorimotorStep>& window,
        const nn::LstmState* state0 = nullptr) const;

    /// z_s for every step of a normalized sequence, one row per step.
    /// Recurrent kinds process consecutive windows of the truncation length
    /// with zeroed state; a partial final window is still encoded.
    nn::Matrix encode_sequence(const data::SensorimotorSequence& normalized) const;

    void zero_grad();
    std::vector<nn::TensorView> parameters();
    /// Parameter values in canonical order (snapshot / restore for early
    /// stopping and checkpoints).
    std::vector<nn::Matrix> parameter_values() const;
    void set_parameter_values(const std::vector<nn::Matrix>& values);

    nn::LstmState zero_state(int batch) const;

private:
    ArchitectureSpec spec_;
    std::vector<nn::DenseLayer> sensor_hidden_;
    std::optional<nn::LstmStack> lstm_;
    nn::DenseLayer z_s_proj_;
    std::vector<nn::DenseLayer> motor_hidden_;
    std::optional<nn::DenseLayer> z_m_proj_;
    nn::DenseLayer pred_hidden_;
    nn::DenseLayer pred_out_;
};

}  // namespace smpred::models
