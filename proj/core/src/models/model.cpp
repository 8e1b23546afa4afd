#include "smpred/models/model.hpp"

#include <stdexcept>

namespace smpred::models {

namespace {

std::vector<nn::DenseLayer> make_hidden(const std::string& prefix, int in,
                                        const std::vector<int>& sizes) {
    std::vector<nn::DenseLayer> layers;
    int cur = in;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        layers.emplace_back(prefix + ".h" + std::to_string(i), cur, sizes[i],
                            nn::Activation::Relu);
        cur = sizes[i];
    }
    return layers;
}

int last_size(int in, const std::vector<int>& sizes) { return sizes.empty() ? in : sizes.back(); }

}  // namespace

SensorimotorModel::SensorimotorModel(ArchitectureSpec spec)
    : spec_(std::move(spec)),
      sensor_hidden_(make_hidden("enc", spec_.sensor_inputs, spec_.sensor_hidden)),
      z_s_proj_("enc.zs",
                spec_.is_recurrent() ? spec_.lstm_hidden.back()
                                     : last_size(spec_.sensor_inputs, spec_.sensor_hidden),
                spec_.z_s_dims, nn::Activation::Identity),
      pred_hidden_("pred.h0", spec_.z_sm_dims(), spec_.predictor_hidden, nn::Activation::Relu),
      pred_out_("pred.out", spec_.predictor_hidden, spec_.sensor_inputs,
                nn::Activation::Identity) {
    if (spec_.is_recurrent()) {
        lstm_.emplace("enc.lstm", last_size(spec_.sensor_inputs, spec_.sensor_hidden),
                      spec_.lstm_hidden);
    }
    if (spec_.has_motor()) {
        motor_hidden_ = make_hidden("mot", spec_.motor_inputs, spec_.motor_hidden);
        z_m_proj_.emplace("mot.zm", last_size(spec_.motor_inputs, spec_.motor_hidden),
                          spec_.z_m_dims, nn::Activation::Identity);
    }
}

void SensorimotorModel::init_parameters(std::uint64_t seed) {
    Rng rng(seed);
    for (auto& l : sensor_hidden_) l.init(rng);
    if (lstm_) lstm_->init(rng);
    z_s_proj_.init(rng);
    for (auto& l : motor_hidden_) l.init(rng);
    if (z_m_proj_) z_m_proj_->init(rng);
    pred_hidden_.init(rng);
    pred_out_.init(rng);
}

SensorimotorModel::Output SensorimotorModel::forward(const std::vector<nn::Matrix>& sensors,
                                                     const std::vector<nn::Matrix>& motors,
                                                     ModelCache& cache,
                                                     const nn::LstmState* state0,
                                                     nn::LstmState* state_out) const {
    if (sensors.empty()) throw std::invalid_argument("forward: empty input");
    if (has_motor() && motors.size() != sensors.size()) {
        throw std::invalid_argument("forward: sensor/motor step count mismatch");
    }
    if (state0 && !is_recurrent()) {
        throw std::invalid_argument("forward: recurrent state passed to a memoryless kind");
    }
    const std::size_t steps = sensors.size();
    const int batch = static_cast<int>(sensors[0].cols());
    const Eigen::Index wide = static_cast<Eigen::Index>(steps) * batch;

    // Pack the window step-major: column block t holds step t's batch. Each
    // dense layer then runs once over the whole window. resize (not assign)
    // keeps a reused cache's storage.
    cache.steps = static_cast<int>(steps);
    cache.batch = batch;
    cache.s_all.resize(spec_.sensor_inputs, wide);
    for (std::size_t t = 0; t < steps; ++t) {
        if (sensors[t].rows() != spec_.sensor_inputs || sensors[t].cols() != batch) {
            throw std::invalid_argument("forward: sensor step shape mismatch");
        }
        cache.s_all.middleCols(static_cast<Eigen::Index>(t) * batch, batch) = sensors[t];
    }

    cache.sensor_hidden.resize(sensor_hidden_.size());
    nn::Matrix a;
    const nn::Matrix* cur = &cache.s_all;
    for (std::size_t l = 0; l < sensor_hidden_.size(); ++l) {
        a = sensor_hidden_[l].forward(*cur, cache.sensor_hidden[l]);
        cur = &a;
    }
    if (is_recurrent()) {
        nn::LstmState state = state0 ? *state0 : lstm_->zero_state(batch);
        cur = &lstm_->forward_sequence(*cur, static_cast<int>(steps), batch, state, cache.lstm);
        if (state_out) *state_out = std::move(state);
    } else if (state_out) {
        throw std::invalid_argument("forward: no state for memoryless kind");
    }
    const nn::Matrix z_s_all = z_s_proj_.forward(*cur, cache.z_s_proj);

    nn::Matrix z_m_all;
    const nn::Matrix* z_sm_in = &z_s_all;
    if (has_motor()) {
        cache.m_all.resize(spec_.motor_inputs, wide);
        for (std::size_t t = 0; t < steps; ++t) {
            if (motors[t].rows() != spec_.motor_inputs || motors[t].cols() != batch) {
                throw std::invalid_argument("forward: motor step shape mismatch");
            }
            cache.m_all.middleCols(static_cast<Eigen::Index>(t) * batch, batch) = motors[t];
        }
        cache.motor_hidden.resize(motor_hidden_.size());
        nn::Matrix b;
        const nn::Matrix* mcur = &cache.m_all;
        for (std::size_t l = 0; l < motor_hidden_.size(); ++l) {
            b = motor_hidden_[l].forward(*mcur, cache.motor_hidden[l]);
            mcur = &b;
        }
        z_m_all = z_m_proj_->forward(*mcur, cache.z_m_proj);
        cache.z_sm.resize(spec_.z_sm_dims(), wide);
        cache.z_sm.topRows(spec_.z_s_dims) = z_s_all;
        cache.z_sm.bottomRows(spec_.z_m_dims) = z_m_all;
        z_sm_in = &cache.z_sm;
    }
    const nn::Matrix h = pred_hidden_.forward(*z_sm_in, cache.pred_hidden);
    const nn::Matrix pred_all = pred_out_.forward(h, cache.pred_out);

    Output out;
    out.z_s.resize(steps);
    if (has_motor()) out.z_m.resize(steps);
    out.pred.resize(steps);
    for (std::size_t t = 0; t < steps; ++t) {
        const Eigen::Index c0 = static_cast<Eigen::Index>(t) * batch;
        out.z_s[t] = z_s_all.middleCols(c0, batch);
        if (has_motor()) out.z_m[t] = z_m_all.middleCols(c0, batch);
        out.pred[t] = pred_all.middleCols(c0, batch);
    }
    return out;
}

void SensorimotorModel::backward(const std::vector<nn::Matrix>& dpred, ModelCache& cache) {
    if (static_cast<int>(dpred.size()) != cache.steps) {
        throw std::invalid_argument("backward: gradient/cache step count mismatch");
    }
    const std::size_t steps = dpred.size();
    const int batch = cache.batch;
    const Eigen::Index wide = static_cast<Eigen::Index>(steps) * batch;

    cache.dpred.resize(spec_.sensor_inputs, wide);
    for (std::size_t t = 0; t < steps; ++t) {
        if (dpred[t].rows() != spec_.sensor_inputs || dpred[t].cols() != batch) {
            throw std::invalid_argument("backward: gradient step shape mismatch");
        }
        cache.dpred.middleCols(static_cast<Eigen::Index>(t) * batch, batch) = dpred[t];
    }

    nn::Matrix dhid = pred_out_.backward(cache.dpred, cache.pred_out);
    nn::Matrix dz_sm = pred_hidden_.backward(dhid, cache.pred_hidden);

    nn::Matrix dz_s;
    if (has_motor()) {
        dz_s = dz_sm.topRows(spec_.z_s_dims);
        nn::Matrix dm = z_m_proj_->backward(dz_sm.bottomRows(spec_.z_m_dims), cache.z_m_proj);
        for (std::size_t l = motor_hidden_.size(); l-- > 0;) {
            dm = motor_hidden_[l].backward(dm, cache.motor_hidden[l]);
        }
    } else {
        dz_s = std::move(dz_sm);
    }

    nn::Matrix da = z_s_proj_.backward(dz_s, cache.z_s_proj);
    if (is_recurrent()) {
        // Gradients w.r.t. the initial state are dropped by design.
        da = lstm_->backward_sequence(da, cache.lstm);
    }
    for (std::size_t l = sensor_hidden_.size(); l-- > 0;) {
        da = sensor_hidden_[l].backward(da, cache.sensor_hidden[l]);
    }
}

std::pair<std::vector<EncodedStep>, nn::LstmState> SensorimotorModel::forward_window(
    const std::vector<data::SensorimotorStep>& window, const nn::LstmState* state0) const {
    if (window.size() < 2) {
        throw std::invalid_argument("forward_window: need at least 2 records");
    }
    const std::size_t steps = window.size() - 1;  // last record is target-only
    std::vector<nn::Matrix> sensors(steps), motors(steps);
    for (std::size_t t = 0; t < steps; ++t) {
        sensors[t].resize(spec_.sensor_inputs, 1);
        for (int i = 0; i < spec_.sensor_inputs; ++i) sensors[t](i, 0) = window[t].sensors[i];
        motors[t].resize(spec_.motor_inputs, 1);
        motors[t](0, 0) = window[t].motor.d;
        motors[t](1, 0) = window[t].motor.r;
    }

    ModelCache cache;
    nn::LstmState state_out;
    Output out = forward(sensors, motors, cache, state0, is_recurrent() ? &state_out : nullptr);

    std::vector<EncodedStep> encoded(steps);
    for (std::size_t t = 0; t < steps; ++t) {
        encoded[t].z_s = out.z_s[t].col(0);
        if (has_motor()) {
            encoded[t].z_m = out.z_m[t].col(0);
            encoded[t].z_sm.resize(spec_.z_sm_dims());
            encoded[t].z_sm << encoded[t].z_s, encoded[t].z_m;
        } else {
            encoded[t].z_sm = encoded[t].z_s;
        }
        encoded[t].s_hat_next = out.pred[t].col(0);
    }
    return {std::move(encoded), std::move(state_out)};
}

nn::Matrix SensorimotorModel::encode_sequence(const data::SensorimotorSequence& normalized) const {
    const std::size_t total = normalized.size();
    if (total == 0) throw std::invalid_argument("encode_sequence: empty sequence");
    nn::Matrix codes(total, spec_.z_s_dims);

    const auto fill_col = [&](std::size_t record, nn::Matrix& s, nn::Matrix& m, long b) {
        const data::SensorimotorStep& st = normalized.steps[record];
        for (int i = 0; i < spec_.sensor_inputs; ++i) s(i, b) = st.sensors[i];
        m(0, b) = st.motor.d;
        m(1, b) = st.motor.r;
    };

    if (!is_recurrent()) {
        // Every step is independent: chunks of the sequence form the batch
        // axis of a single-step pass. Chunking bounds cache memory.
        constexpr std::size_t kChunk = 8192;
        for (std::size_t begin = 0; begin < total; begin += kChunk) {
            const std::size_t n = std::min(kChunk, total - begin);
            std::vector<nn::Matrix> s(1), m(1);
            s[0].resize(spec_.sensor_inputs, static_cast<long>(n));
            m[0].resize(spec_.motor_inputs, static_cast<long>(n));
            for (std::size_t b = 0; b < n; ++b) {
                fill_col(begin + b, s[0], m[0], static_cast<long>(b));
            }
            ModelCache cache;
            Output out = forward(s, m, cache);
            codes.middleRows(static_cast<long>(begin), static_cast<long>(n)) =
                out.z_s[0].transpose();
        }
        return codes;
    }

    // Recurrent: consecutive windows with zeroed state, every step encoded.
    // Full windows batch together; the partial tail gets its own pass.
    const auto window = static_cast<std::size_t>(spec_.window);
    const std::size_t full = total / window;
    constexpr std::size_t kWindowChunk = 256;
    for (std::size_t wbegin = 0; wbegin < full; wbegin += kWindowChunk) {
        const std::size_t nw = std::min(kWindowChunk, full - wbegin);
        std::vector<nn::Matrix> s(window), m(window);
        for (std::size_t t = 0; t < window; ++t) {
            s[t].resize(spec_.sensor_inputs, static_cast<long>(nw));
            m[t].resize(spec_.motor_inputs, static_cast<long>(nw));
            for (std::size_t b = 0; b < nw; ++b) {
                fill_col((wbegin + b) * window + t, s[t], m[t], static_cast<long>(b));
            }
        }
        ModelCache cache;
        Output out = forward(s, m, cache);
        for (std::size_t t = 0; t < window; ++t) {
            for (std::size_t b = 0; b < nw; ++b) {
                codes.row(static_cast<long>((wbegin + b) * window + t)) =
                    out.z_s[t].col(static_cast<long>(b));
            }
        }
    }
    const std::size_t tail_begin = full * window;
    const std::size_t tail = total - tail_begin;
    if (tail > 0) {
        std::vector<nn::Matrix> s(tail), m(tail);
        for (std::size_t t = 0; t < tail; ++t) {
            s[t].resize(spec_.sensor_inputs, 1);
            m[t].resize(spec_.motor_inputs, 1);
            fill_col(tail_begin + t, s[t], m[t], 0);
        }
        ModelCache cache;
        Output out = forward(s, m, cache);
        for (std::size_t t = 0; t < tail; ++t) {
            codes.row(static_cast<long>(tail_begin + t)) = out.z_s[t].col(0);
        }
    }
    return codes;
}

void SensorimotorModel::zero_grad() {
    for (auto& l : sensor_hidden_) l.zero_grad();
    if (lstm_) lstm_->zero_grad();
    z_s_proj_.zero_grad();
    for (auto& l : motor_hidden_) l.zero_grad();
    if (z_m_proj_) z_m_proj_->zero_grad();
    pred_hidden_.zero_grad();
    pred_out_.zero_grad();
}

std::vector<nn::TensorView> SensorimotorModel::parameters() {
    std::vector<nn::TensorView> out;
    const auto append = [&out](std::vector<nn::TensorView> p) {
        out.insert(out.end(), p.begin(), p.end());
    };
    for (auto& l : sensor_hidden_) append(l.parameters());
    if (lstm_) append(lstm_->parameters());
    append(z_s_proj_.parameters());
    for (auto& l : motor_hidden_) append(l.parameters());
    if (z_m_proj_) append(z_m_proj_->parameters());
    append(pred_hidden_.parameters());
    append(pred_out_.parameters());
    return out;
}

std::vector<nn::Matrix> SensorimotorModel::parameter_values() const {
    auto* self = const_cast<SensorimotorModel*>(this);
    std::vector<nn::Matrix> values;
    for (const nn::TensorView& v : self->parameters()) values.push_back(*v.value);
    return values;
}

void SensorimotorModel::set_parameter_values(const std::vector<nn::Matrix>& values) {
    std::vector<nn::TensorView> views = parameters();
    if (values.size() != views.size()) {
        throw std::invalid_argument("set_parameter_values: tensor count mismatch");
    }
    for (std::size_t i = 0; i < views.size(); ++i) {
        if (values[i].rows() != views[i].value->rows() ||
            values[i].cols() != views[i].value->cols()) {
            throw std::invalid_argument("set_parameter_values: shape mismatch at '" +
                                        views[i].name + "'");
        }
        *views[i].value = values[i];
    }
}

nn::LstmState SensorimotorModel::zero_state(int batch) const {
    if (!is_recurrent()) throw std::invalid_argument("zero_state: memoryless kind has no state");
    return lstm_->zero_state(batch);
}

}  // namespace smpred::models
