#pragma once

#include <string>
#include <vector>

namespace smpred::models {

enum class ArchKind { S, SM, RecurrentS, RecurrentSM };

/// Layer plan for one architecture. Inputs are the 5 normalized sensors and
/// the 2-component motor command; representations are z_s (10) and z_m (5).
struct ArchitectureSpec {
    ArchKind kind = ArchKind::S;
    int sensor_inputs = 5;
    int motor_inputs = 2;
    int z_s_dims = 10;
    int z_m_dims = 5;
    std::vector<int> sensor_hidden;  // dense ReLU sizes before LSTM / z_s
    std::vector<int> lstm_hidden;    // empty for memoryless kinds
    std::vector<int> motor_hidden;   // empty for motorless kinds
    int predictor_hidden = 128;
    int window = 20;  // truncation horizon; memoryless kinds ignore it

    bool has_motor() const { return kind == ArchKind::SM || kind == ArchKind::RecurrentSM; }
    bool is_recurrent() const {
        return kind == ArchKind::RecurrentS || kind == ArchKind::RecurrentSM;
    }
    /// Width of the predictor input: |z_s| (+ |z_m| for motor kinds).
    int z_sm_dims() const { return z_s_dims + (has_motor() ? z_m_dims : 0); }
};

/// The four canonical plans: memoryless encoders use hidden sizes 16/32/64,
/// recurrent ones a single 16 layer followed by a 3x32 LSTM; every predictor
/// has one 128-unit hidden layer.
ArchitectureSpec canonical_spec(ArchKind kind);

std::string to_string(ArchKind kind);
ArchKind arch_from_string(const std::string& name);

}  // namespace smpred::models
