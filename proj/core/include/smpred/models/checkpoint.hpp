#pragma once

#include <cstdint>
#include <string>

#include "smpred/models/model.hpp"

namespace smpred::models {

/// Provenance carried alongside the parameters; enough to re-derive the run
/// and to detect encoder/cluster mismatches downstream.
struct CheckpointMeta {
    ArchKind kind = ArchKind::S;
    std::string model_id;
    std::string env_name;
    std::uint64_t dataset_seed = 0;
    std::uint64_t init_seed = 0;
    std::uint64_t shuffle_seed = 0;
    std::uint64_t best_epoch = 0;  // 1-based epoch whose parameters these are
    std::uint64_t epochs_run = 0;
    double best_val = 0.0;
};

/// Named-tensor container: header, meta, then each parameter as
/// (name, rows, cols, column-major 64-bit values). Exact round trip.
void save_checkpoint(SensorimotorModel& model, const CheckpointMeta& meta,
                     const std::string& path);

struct LoadedModel {
    SensorimotorModel model;
    CheckpointMeta meta;
};

LoadedModel load_checkpoint(const std::string& path);

/// Header and meta only; skips tensor data.
CheckpointMeta read_checkpoint_meta(const std::string& path);

}  // namespace smpred::models
