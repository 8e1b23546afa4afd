#pragma once

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "smpred/analysis/representation.hpp"
#include "smpred/models/checkpoint.hpp"
#include "smpred/models/model.hpp"
#include "smpred/nn/adam.hpp"
#include "smpred/trajectory.hpp"

namespace smpred::models {

class TrainingError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TrainConfig {
    int batch_size = 64;
    nn::AdamConfig adam{};  // lr 0.001, betas 0.9/0.999, eps 1e-8
    int max_epochs = 500;
    int patience = 10;                  // consecutive non-improving epochs
    double min_rel_improvement = 0.05;  // "improve" = beat running best by 5%
    std::uint64_t init_seed = 0;
    std::uint64_t shuffle_seed = 0;
    std::ostream* log = nullptr;  // per-epoch progress lines when set
};

struct EpochStats {
    double train_loss = 0.0;
    double val_loss = 0.0;
};

struct TrainedModel {
    SensorimotorModel model;  // parameters from the best-validation epoch
    std::vector<EpochStats> history;
    std::uint64_t best_epoch = 0;  // 1-based; ties resolved to the earliest
    double best_val = 0.0;
    std::string model_id;
    std::string env_name;
    std::uint64_t dataset_seed = 0;
    std::uint64_t init_seed = 0;
    std::uint64_t shuffle_seed = 0;

    CheckpointMeta meta() const;
};

/// Tracks the early-stopping rule: an epoch "improves" when its validation
/// loss beats the running best by at least the relative margin; training
/// stops after `patience` consecutive non-improving epochs.
class EarlyStopper {
public:
    EarlyStopper(int patience, double min_rel_improvement);

    /// Feed one epoch's validation loss; returns true when training should
    /// stop after this epoch.
    bool observe(double val_loss);

    double running_best() const { return best_; }
    int consecutive_failures() const { return failures_; }

private:
    int patience_;
    double margin_;
    double best_;
    int failures_ = 0;
};

/// Full training loop: Adam on minibatches of 64, per-epoch reshuffle,
/// early stopping on the validation split, best-epoch parameter restore.
/// Memoryless kinds train on shuffled single transitions; recurrent kinds on
/// shuffled stride-one windows of the truncation length with zeroed initial
/// state. Splits are raw (unnormalized); normalization is applied
/// internally. Throws TrainingError on NaN/Inf loss or unusable splits.
TrainedModel train(const ArchitectureSpec& spec, const data::DatasetSplits& splits,
                   const TrainConfig& cfg);

/// Mean squared prediction error per normalized sensor dimension over a raw
/// sequence; recurrent kinds score consecutive windows (19 predictions per
/// full window, plus a partial tail of >= 2 records).
double evaluate(const SensorimotorModel& model, const data::SensorimotorSequence& raw);

/// z_s for every step of a raw trajectory, paired with ground-truth poses
/// and the min-sensor coloring.
analysis::RepresentationSet encode(const SensorimotorModel& model, const std::string& model_id,
                                   const data::Trajectory& raw);

/// History as CSV: epoch,train_loss,val_loss (epoch is 1-based).
void save_history_csv(const TrainedModel& trained, const std::string& path);

}  // namespace smpred::models
