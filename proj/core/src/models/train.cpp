#include "smpred/models/train.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>

namespace smpred::models {

namespace {

void fill_input_col(const data::SensorimotorSequence& seq, std::size_t idx, nn::Matrix& s,
                    nn::Matrix& m, long b) {
    const data::SensorimotorStep& st = seq.steps[idx];
    for (int i = 0; i < 5; ++i) s(i, b) = st.sensors[i];
    m(0, b) = st.motor.d;
    m(1, b) = st.motor.r;
}

struct BatchData {
    std::vector<nn::Matrix> sensors, motors, targets;
};

/// Assembles `count` windows of `record_window` records each (so
/// record_window - 1 input steps) starting at the given item offsets.
void make_batch(const data::SensorimotorSequence& seq, const std::vector<std::size_t>& starts,
                std::size_t begin, std::size_t count, std::size_t record_window, BatchData& out) {
    const std::size_t steps = record_window - 1;
    out.sensors.resize(steps);
    out.motors.resize(steps);
    out.targets.resize(steps);
    for (std::size_t t = 0; t < steps; ++t) {
        out.sensors[t].resize(5, static_cast<long>(count));
        out.motors[t].resize(2, static_cast<long>(count));
        out.targets[t].resize(5, static_cast<long>(count));
        for (std::size_t k = 0; k < count; ++k) {
            const std::size_t base = starts[begin + k];
            fill_input_col(seq, base + t, out.sensors[t], out.motors[t], static_cast<long>(k));
            const data::SensorimotorStep& next = seq.steps[base + t + 1];
            for (int i = 0; i < 5; ++i) out.targets[t](i, static_cast<long>(k)) = next.sensors[i];
        }
    }
}

/// Sum of squared errors over all steps (the caller divides by the element
/// count); optionally fills per-step loss gradients 2 (p - t) / n_total.
double squared_error_sum(const std::vector<nn::Matrix>& pred,
                         const std::vector<nn::Matrix>& target, double n_total,
                         std::vector<nn::Matrix>* dpred) {
    double sum = 0.0;
    if (dpred) dpred->resize(pred.size());
    for (std::size_t t = 0; t < pred.size(); ++t) {
        nn::Matrix diff = pred[t] - target[t];
        sum += diff.squaredNorm();
        if (dpred) (*dpred)[t] = (2.0 / n_total) * diff;
    }
    return sum;
}

/// Evaluation over a normalized sequence; see evaluate() for the protocol.
double evaluate_normalized(const SensorimotorModel& model,
                           const data::SensorimotorSequence& seq) {
    const std::size_t total = seq.size();
    if (total < 2) throw TrainingError("evaluation split needs at least 2 records");

    double sum_sq = 0.0;
    double count = 0.0;
    ModelCache cache;
    BatchData batch;

    if (!model.is_recurrent()) {
        std::vector<std::size_t> starts(total - 1);
        std::iota(starts.begin(), starts.end(), std::size_t{0});
        constexpr std::size_t kChunk = 4096;
        for (std::size_t begin = 0; begin < starts.size(); begin += kChunk) {
            const std::size_t n = std::min(kChunk, starts.size() - begin);
            make_batch(seq, starts, begin, n, 2, batch);
            auto out = model.forward(batch.sensors, batch.motors, cache);
            sum_sq += squared_error_sum(out.pred, batch.targets, 1.0, nullptr);
            count += static_cast<double>(n) * 5.0;
        }
        return sum_sq / count;
    }

    const auto window = static_cast<std::size_t>(model.spec().window);
    std::vector<std::size_t> starts;
    for (std::size_t s = 0; s + window <= total; s += window) starts.push_back(s);
    constexpr std::size_t kWindowChunk = 256;
    for (std::size_t begin = 0; begin < starts.size(); begin += kWindowChunk) {
        const std::size_t n = std::min(kWindowChunk, starts.size() - begin);
        make_batch(seq, starts, begin, n, window, batch);
        auto out = model.forward(batch.sensors, batch.motors, cache);
        sum_sq += squared_error_sum(out.pred, batch.targets, 1.0, nullptr);
        count += static_cast<double>(n * (window - 1)) * 5.0;
    }
    const std::size_t tail_begin = starts.size() * window;
    const std::size_t tail = total - tail_begin;
    if (tail >= 2) {
        std::vector<std::size_t> tail_start{tail_begin};
        make_batch(seq, tail_start, 0, 1, tail, batch);
        auto out = model.forward(batch.sensors, batch.motors, cache);
        sum_sq += squared_error_sum(out.pred, batch.targets, 1.0, nullptr);
        count += static_cast<double>(tail - 1) * 5.0;
    }
    if (count == 0.0) throw TrainingError("evaluation split produced no scorable predictions");
    return sum_sq / count;
}

}  // namespace

CheckpointMeta TrainedModel::meta() const {
    CheckpointMeta m;
    m.kind = model.spec().kind;
    m.model_id = model_id;
    m.env_name = env_name;
    m.dataset_seed = dataset_seed;
    m.init_seed = init_seed;
    m.shuffle_seed = shuffle_seed;
    m.best_epoch = best_epoch;
    m.epochs_run = history.size();
    m.best_val = best_val;
    return m;
}

EarlyStopper::EarlyStopper(int patience, double min_rel_improvement)
    : patience_(patience),
      margin_(min_rel_improvement),
      best_(std::numeric_limits<double>::infinity()) {}

bool EarlyStopper::observe(double val_loss) {
    const bool improved = val_loss < (1.0 - margin_) * best_;
    if (val_loss < best_) best_ = val_loss;
    failures_ = improved ? 0 : failures_ + 1;
    return failures_ >= patience_;
}

TrainedModel train(const ArchitectureSpec& spec, const data::DatasetSplits& splits,
                   const TrainConfig& cfg) {
    const auto window =
        spec.is_recurrent() ? static_cast<std::size_t>(spec.window) : std::size_t{2};
    if (splits.train.size() < window) {
        throw TrainingError("training split too small: " + std::to_string(splits.train.size()) +
                            " records, need at least " + std::to_string(window));
    }
    if (splits.val.size() < 2) {
        throw TrainingError("validation split too small: " + std::to_string(splits.val.size()) +
                            " records");
    }
    if (cfg.batch_size < 1 || cfg.max_epochs < 1 || cfg.patience < 1) {
        throw TrainingError("batch size, max epochs and patience must be positive");
    }

    const data::SensorimotorSequence train_seq = data::normalize(splits.train);
    const data::SensorimotorSequence val_seq = data::normalize(splits.val);

    SensorimotorModel model(spec);
    model.init_parameters(cfg.init_seed);
    nn::AdamOptimizer adam(model.parameters(), cfg.adam);
    Rng shuffle_rng(cfg.shuffle_seed);

    // Memoryless kinds see every transition; recurrent kinds see every full
    // window (stride one, overlapping), so both kinds draw one training item
    // per split position and take comparable update counts per epoch.
    std::vector<std::size_t> items;
    if (spec.is_recurrent()) {
        for (std::size_t s = 0; s + window <= train_seq.size(); s += 1) items.push_back(s);
    } else {
        items.resize(train_seq.size() - 1);
        std::iota(items.begin(), items.end(), std::size_t{0});
    }

    TrainedModel result{SensorimotorModel(spec)};
    result.env_name = splits.train.env_name;
    result.dataset_seed = splits.train.seed;
    result.init_seed = cfg.init_seed;
    result.shuffle_seed = cfg.shuffle_seed;
    result.best_val = std::numeric_limits<double>::infinity();
    std::vector<nn::Matrix> best_params = model.parameter_values();
    EarlyStopper stopper(cfg.patience, cfg.min_rel_improvement);

    ModelCache cache;
    BatchData batch;
    std::vector<nn::Matrix> dpred;

    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        shuffle_rng.shuffle(items);
        double epoch_sq = 0.0;
        double epoch_n = 0.0;
        for (std::size_t begin = 0; begin < items.size();
             begin += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t count =
                std::min(static_cast<std::size_t>(cfg.batch_size), items.size() - begin);
            make_batch(train_seq, items, begin, count, window, batch);
            auto out = model.forward(batch.sensors, batch.motors, cache);

            const double n_total = static_cast<double>((window - 1) * count) * 5.0;
            const double sq = squared_error_sum(out.pred, batch.targets, n_total, &dpred);
            const double loss = sq / n_total;
            if (!std::isfinite(loss)) {
                throw TrainingError("non-finite training loss (arch " + to_string(spec.kind) +
                                    ", epoch " + std::to_string(epoch) + ", batch offset " +
                                    std::to_string(begin) + "): " + std::to_string(loss));
            }
            model.zero_grad();
            model.backward(dpred, cache);
            adam.step();
            epoch_sq += sq;
            epoch_n += n_total;
        }

        const double train_loss = epoch_sq / epoch_n;
        const double val_loss = evaluate_normalized(model, val_seq);
        if (!std::isfinite(val_loss)) {
            throw TrainingError("non-finite validation loss (arch " + to_string(spec.kind) +
                                ", epoch " + std::to_string(epoch) + ")");
        }
        result.history.push_back({train_loss, val_loss});

        if (val_loss < result.best_val) {  // strict: ties keep the earlier epoch
            result.best_val = val_loss;
            result.best_epoch = static_cast<std::uint64_t>(epoch);
            best_params = model.parameter_values();
        }
        if (cfg.log) {
            (*cfg.log) << "epoch " << epoch << "  train " << train_loss << "  val " << val_loss
                       << "  best " << result.best_val << " @" << result.best_epoch << "\n";
        }
        if (stopper.observe(val_loss)) break;
    }

    model.set_parameter_values(best_params);
    result.model = std::move(model);
    result.model_id = to_string(spec.kind) + ":" + result.env_name + ":d" +
                      std::to_string(result.dataset_seed) + ":i" +
                      std::to_string(result.init_seed) + ":s" +
                      std::to_string(result.shuffle_seed);
    return result;
}

double evaluate(const SensorimotorModel& model, const data::SensorimotorSequence& raw) {
    return evaluate_normalized(model, data::normalize(raw));
}

analysis::RepresentationSet encode(const SensorimotorModel& model, const std::string& model_id,
                                   const data::Trajectory& raw) {
    if (raw.poses.size() != raw.sequence.size()) {
        throw std::invalid_argument("encode: trajectory poses out of sync with sequence");
    }
    analysis::RepresentationSet reps;
    reps.codes = model.encode_sequence(data::normalize(raw.sequence));
    reps.poses = raw.poses;
    reps.min_laser = analysis::min_laser_coloring(raw);
    reps.env_name = raw.sequence.env_name;
    reps.model_id = model_id;
    reps.validate();
    return reps;
}

void save_history_csv(const TrainedModel& trained, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "epoch,train_loss,val_loss\n";
    char buf[80];
    for (std::size_t e = 0; e < trained.history.size(); ++e) {
        std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g\n", e + 1, trained.history[e].train_loss,
                      trained.history[e].val_loss);
        out << buf;
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace smpred::models
