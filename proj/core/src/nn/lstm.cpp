#include "smpred/nn/lstm.hpp"

#include <stdexcept>

#include "smpred/nn/dense.hpp"

namespace smpred::nn {

namespace {

Matrix sigmoid(const Matrix& z) { return ((-z.array()).exp() + 1.0).inverse().matrix(); }

// tanh written in terms of exp: Eigen vectorizes exp for doubles but
// evaluates tanh scalar-by-scalar, an order-of-magnitude difference here.
// Algebraically identical, with the right limits at +-inf.
template <typename Derived>
auto tanh_via_exp(const Eigen::ArrayBase<Derived>& x) {
    return 1.0 - 2.0 * ((2.0 * x).exp() + 1.0).inverse();
}

}  // namespace

LstmLayer::LstmLayer(std::string name, int in, int hidden)
    : name_(std::move(name)), in_(in), hidden_(hidden) {
    if (in <= 0 || hidden <= 0) throw std::invalid_argument("lstm layer sizes must be positive");
    wx_ = Matrix::Zero(4 * hidden, in);
    wh_ = Matrix::Zero(4 * hidden, hidden);
    b_ = Matrix::Zero(4 * hidden, 1);
    dwx_ = Matrix::Zero(4 * hidden, in);
    dwh_ = Matrix::Zero(4 * hidden, hidden);
    db_ = Matrix::Zero(4 * hidden, 1);
}

void LstmLayer::init(Rng& rng) {
    glorot_uniform(wx_, rng);
    glorot_uniform(wh_, rng);
    b_.setZero();
    b_.block(hidden_, 0, hidden_, 1).setOnes();  // forget gate opens at init
}

Matrix LstmLayer::step(const Matrix& x, const Matrix& h_prev, const Matrix& c_prev, Matrix& c_out,
                       LstmLayerCache& cache) const {
    if (x.rows() != in_) {
        throw std::invalid_argument("lstm '" + name_ + "': input has " + std::to_string(x.rows()) +
                                    " rows, expected " + std::to_string(in_));
    }
    const int h = hidden_;
    Matrix pre = wx_ * x + wh_ * h_prev;
    pre.colwise() += b_.col(0);

    cache.x = x;
    cache.h_prev = h_prev;
    cache.c_prev = c_prev;
    cache.i = sigmoid(pre.topRows(h));
    cache.f = sigmoid(pre.middleRows(h, h));
    cache.g = tanh_via_exp(pre.middleRows(2 * h, h).array()).matrix();
    cache.o = sigmoid(pre.bottomRows(h));

    c_out = cache.f.cwiseProduct(c_prev) + cache.i.cwiseProduct(cache.g);
    cache.tanh_c = tanh_via_exp(c_out.array()).matrix();
    return cache.o.cwiseProduct(cache.tanh_c);
}

Matrix LstmLayer::backward_step(const Matrix& dh, const Matrix& dc, const LstmLayerCache& cache,
                                Matrix& dh_prev, Matrix& dc_prev) {
    const int h = hidden_;
    const auto ones = Matrix::Ones(h, dh.cols()).array();

    // Total cell gradient: through the output path plus the carry from t+1.
    const Matrix dtanh = dh.cwiseProduct(cache.o);
    const Matrix dcell =
        (dtanh.array() * (ones - cache.tanh_c.array().square())).matrix() + dc;

    Matrix dpre(4 * h, dh.cols());
    dpre.topRows(h) = (dcell.cwiseProduct(cache.g).array() * cache.i.array() *
                       (ones - cache.i.array()))
                          .matrix();
    dpre.middleRows(h, h) = (dcell.cwiseProduct(cache.c_prev).array() * cache.f.array() *
                             (ones - cache.f.array()))
                                .matrix();
    dpre.middleRows(2 * h, h) =
        (dcell.cwiseProduct(cache.i).array() * (ones - cache.g.array().square())).matrix();
    dpre.bottomRows(h) = (dh.cwiseProduct(cache.tanh_c).array() * cache.o.array() *
                          (ones - cache.o.array()))
                             .matrix();

    dwx_.noalias() += dpre * cache.x.transpose();
    dwh_.noalias() += dpre * cache.h_prev.transpose();
    db_.col(0) += dpre.rowwise().sum();

    dh_prev = wh_.transpose() * dpre;
    dc_prev = dcell.cwiseProduct(cache.f);
    return wx_.transpose() * dpre;
}

void LstmLayer::zero_grad() {
    dwx_.setZero();
    dwh_.setZero();
    db_.setZero();
}

std::vector<TensorView> LstmLayer::parameters() {
    return {{name_ + ".Wx", &wx_, &dwx_},
            {name_ + ".Wh", &wh_, &dwh_},
            {name_ + ".b", &b_, &db_}};
}

LstmStack::LstmStack(std::string name, int input, const std::vector<int>& hidden_sizes)
    : input_(input) {
    if (hidden_sizes.empty()) throw std::invalid_argument("lstm stack needs at least one layer");
    int in = input;
    for (std::size_t l = 0; l < hidden_sizes.size(); ++l) {
        layers_.emplace_back(name + ".l" + std::to_string(l), in, hidden_sizes[l]);
        in = hidden_sizes[l];
    }
}

void LstmStack::init(Rng& rng) {
    for (auto& layer : layers_) layer.init(rng);
}

LstmState LstmStack::zero_state(int batch) const {
    LstmState s;
    for (const auto& layer : layers_) {
        s.h.push_back(Matrix::Zero(layer.hidden_size(), batch));
        s.c.push_back(Matrix::Zero(layer.hidden_size(), batch));
    }
    return s;
}

Matrix LstmStack::step(const Matrix& x, LstmState& state,
                       std::vector<LstmLayerCache>& caches) const {
    caches.resize(layers_.size());
    Matrix input = x;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        Matrix c_new;
        Matrix h_new = layers_[l].step(input, state.h[l], state.c[l], c_new, caches[l]);
        state.h[l] = h_new;
        state.c[l] = std::move(c_new);
        input = std::move(h_new);
    }
    return input;
}

Matrix LstmStack::backward_step(const Matrix& dtop, const std::vector<LstmLayerCache>& caches,
                                std::vector<Matrix>& dh, std::vector<Matrix>& dc) {
    Matrix dout = dtop;
    for (std::size_t li = layers_.size(); li-- > 0;) {
        Matrix dh_total = dout + dh[li];
        Matrix dh_prev, dc_prev;
        dout = layers_[li].backward_step(dh_total, dc[li], caches[li], dh_prev, dc_prev);
        dh[li] = std::move(dh_prev);
        dc[li] = std::move(dc_prev);
    }
    return dout;
}

const Matrix& LstmStack::forward_sequence(const Matrix& x_all, int steps, int batch,
                                          LstmState& state, LstmSequenceCache& cache) const {
    const std::size_t layer_count = layers_.size();
    if (x_all.rows() != input_) {
        throw std::invalid_argument("lstm stack: sequence input has " +
                                    std::to_string(x_all.rows()) + " rows, expected " +
                                    std::to_string(input_));
    }
    if (steps <= 0 || batch <= 0 || x_all.cols() != Eigen::Index(steps) * batch) {
        throw std::invalid_argument("lstm stack: sequence input columns do not match steps*batch");
    }

    cache.steps = steps;
    cache.batch = batch;
    const Eigen::Index wide = x_all.cols();
    cache.x.resize(layer_count + 1);
    cache.gates.resize(layer_count);
    cache.h_prev.resize(layer_count);
    cache.c_prev.resize(layer_count);
    cache.tanh_c.resize(layer_count);
    cache.dpre.resize(layer_count);
    cache.x[0] = x_all;
    for (std::size_t l = 0; l < layer_count; ++l) {
        const int h = layers_[l].hidden_;
        cache.gates[l].resize(4 * h, wide);
        cache.h_prev[l].resize(h, wide);
        cache.c_prev[l].resize(h, wide);
        cache.tanh_c[l].resize(h, wide);
        cache.x[l + 1].resize(h, wide);
    }

    for (std::size_t l = 0; l < layer_count; ++l) {
        const LstmLayer& layer = layers_[l];
        const int h = layer.hidden_;
        Matrix& gates = cache.gates[l];
        // Input projection and bias for every step at once; only the
        // recurrent term below runs step by step.
        gates.noalias() = layer.wx_ * cache.x[l];
        gates.colwise() += layer.b_.col(0);
        cache.scratch.resize(h, batch);
        for (int t = 0; t < steps; ++t) {
            const Eigen::Index c0 = Eigen::Index(t) * batch;
            cache.h_prev[l].middleCols(c0, batch) = state.h[l];
            cache.c_prev[l].middleCols(c0, batch) = state.c[l];
            auto gt = gates.middleCols(c0, batch);
            gt.noalias() += layer.wh_ * state.h[l];
            auto gi = gt.topRows(h).array();
            gi = ((-gi).exp() + 1.0).inverse();
            auto gf = gt.middleRows(h, h).array();
            gf = ((-gf).exp() + 1.0).inverse();
            auto gg = gt.middleRows(2 * h, h).array();
            gg = tanh_via_exp(gg);
            auto go = gt.bottomRows(h).array();
            go = ((-go).exp() + 1.0).inverse();

            cache.scratch = gt.middleRows(h, h).cwiseProduct(state.c[l]) +
                            gt.topRows(h).cwiseProduct(gt.middleRows(2 * h, h));
            state.c[l] = cache.scratch;
            auto tc = cache.tanh_c[l].middleCols(c0, batch);
            tc = tanh_via_exp(state.c[l].array()).matrix();
            auto ht = cache.x[l + 1].middleCols(c0, batch);
            ht = gt.bottomRows(h).cwiseProduct(tc);
            state.h[l] = ht;
        }
    }
    return cache.x[layer_count];
}

const Matrix& LstmStack::backward_sequence(const Matrix& dtop_all, LstmSequenceCache& cache) {
    const std::size_t layer_count = layers_.size();
    const int steps = cache.steps;
    const int batch = cache.batch;
    if (steps <= 0 || batch <= 0) {
        throw std::logic_error("lstm stack: backward_sequence before forward_sequence");
    }
    if (dtop_all.rows() != layers_.back().hidden_ ||
        dtop_all.cols() != Eigen::Index(steps) * batch) {
        throw std::invalid_argument("lstm stack: top gradient shape mismatch");
    }

    const Matrix* dstream = &dtop_all;
    for (std::size_t li = layer_count; li-- > 0;) {
        LstmLayer& layer = layers_[li];
        const int h = layer.hidden_;
        const Matrix& gates = cache.gates[li];
        Matrix& dpre = cache.dpre[li];
        dpre.resize(4 * h, Eigen::Index(steps) * batch);
        Matrix dh_carry = Matrix::Zero(h, batch);
        Matrix dc_carry = Matrix::Zero(h, batch);
        const auto ones = Matrix::Ones(h, batch).array();
        for (int t = steps - 1; t >= 0; --t) {
            const Eigen::Index c0 = Eigen::Index(t) * batch;
            const auto i = gates.topRows(h).middleCols(c0, batch);
            const auto f = gates.middleRows(h, h).middleCols(c0, batch);
            const auto g = gates.middleRows(2 * h, h).middleCols(c0, batch);
            const auto o = gates.bottomRows(h).middleCols(c0, batch);
            const auto tanh_c = cache.tanh_c[li].middleCols(c0, batch);
            const auto c_prev = cache.c_prev[li].middleCols(c0, batch);

            const Matrix dh_t = dstream->middleCols(c0, batch) + dh_carry;
            const Matrix dcell =
                (dh_t.cwiseProduct(o).array() * (ones - tanh_c.array().square())).matrix() +
                dc_carry;

            auto dpre_t = dpre.middleCols(c0, batch);
            dpre_t.topRows(h) =
                (dcell.cwiseProduct(g).array() * i.array() * (ones - i.array())).matrix();
            dpre_t.middleRows(h, h) =
                (dcell.cwiseProduct(c_prev).array() * f.array() * (ones - f.array())).matrix();
            dpre_t.middleRows(2 * h, h) =
                (dcell.cwiseProduct(i).array() * (ones - g.array().square())).matrix();
            dpre_t.bottomRows(h) =
                (dh_t.cwiseProduct(tanh_c).array() * o.array() * (ones - o.array())).matrix();

            dh_carry.noalias() = layer.wh_.transpose() * dpre_t;
            dc_carry = dcell.cwiseProduct(f);
        }
        // Weight gradients as single wide products over the whole window.
        layer.dwx_.noalias() += dpre * cache.x[li].transpose();
        layer.dwh_.noalias() += dpre * cache.h_prev[li].transpose();
        layer.db_.col(0) += dpre.rowwise().sum();
        // The stored input sequence is no longer needed; reuse it to hold its
        // own gradient, which is the next layer's output-sequence gradient.
        cache.x[li].noalias() = layer.wx_.transpose() * dpre;
        dstream = &cache.x[li];
    }
    return cache.x[0];
}

void LstmStack::zero_state_grads(int batch, std::vector<Matrix>& dh, std::vector<Matrix>& dc) const {
    dh.clear();
    dc.clear();
    for (const auto& layer : layers_) {
        dh.push_back(Matrix::Zero(layer.hidden_size(), batch));
        dc.push_back(Matrix::Zero(layer.hidden_size(), batch));
    }
}

void LstmStack::zero_grad() {
    for (auto& layer : layers_) layer.zero_grad();
}

std::vector<TensorView> LstmStack::parameters() {
    std::vector<TensorView> out;
    for (auto& layer : layers_) {
        auto p = layer.parameters();
        out.insert(out.end(), p.begin(), p.end());
    }
    return out;
}

int LstmStack::output_size() const { return layers_.back().hidden_size(); }

}  // namespace smpred::nn
