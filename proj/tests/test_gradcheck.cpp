#include <doctest.h>

#include <vector>

#include "smpred/nn/dense.hpp"
#include "smpred/nn/gradcheck.hpp"
#include "smpred/nn/loss.hpp"
#include "smpred/nn/lstm.hpp"
#include "smpred/rng.hpp"

using namespace smpred;
using namespace smpred::nn;

TEST_CASE("two-layer dense net passes at 1e-6") {
    Rng rng(2);
    DenseLayer l1("l1", 4, 8, Activation::Relu);
    DenseLayer l2("l2", 8, 3, Activation::Identity);
    l1.init(rng);
    l2.init(rng);
    const Matrix x = Matrix::NullaryExpr(4, 5, [&] { return rng.uniform(-1.0, 1.0); });
    const Matrix target = Matrix::NullaryExpr(3, 5, [&] { return rng.uniform(-1.0, 1.0); });

    auto forward = [&] {
        DenseCache c1, c2;
        return l2.forward(l1.forward(x, c1), c2);
    };
    auto compute_grads = [&] {
        l1.zero_grad();
        l2.zero_grad();
        DenseCache c1, c2;
        const Matrix h = l1.forward(x, c1);
        const Matrix y = l2.forward(h, c2);
        l1.backward(l2.backward(mse_grad(y, target), c2), c1);
    };
    auto loss = [&] { return mse(forward(), target); };

    std::vector<TensorView> params = l1.parameters();
    for (auto view : l2.parameters()) params.push_back(view);

    const auto result = grad_check(params, compute_grads, loss);
    CAPTURE(result.worst_tensor);
    CAPTURE(result.worst_index);
    CHECK(result.max_rel_error < 1e-6);
    CHECK(result.entries_checked > 0);
}

TEST_CASE("a constant-output model has exactly zero gradients") {
    // ReLU layer with all-negative pre-activations: output identically zero
    // regardless of parameters near this point, so gradients vanish.
    DenseLayer layer("dead", 2, 2, Activation::Relu);
    auto views = layer.parameters();
    views[0].value->setZero();
    *views[1].value = Matrix::Constant(2, 1, -5.0);
    const Matrix x = Matrix::Constant(2, 3, 0.1);
    const Matrix target = Matrix::Zero(2, 3);

    auto compute_grads = [&] {
        layer.zero_grad();
        DenseCache c;
        const Matrix y = layer.forward(x, c);
        layer.backward(mse_grad(y, target), c);
    };
    auto loss = [&] {
        DenseCache c;
        return mse(layer.forward(x, c), target);
    };

    const auto result = grad_check(layer.parameters(), compute_grads, loss);
    CHECK(result.max_rel_error == 0.0);
}

TEST_CASE("gradient checks pass at 1e-5 over 20 random mixed configurations") {
    for (std::uint64_t cfg_seed = 0; cfg_seed < 20; ++cfg_seed) {
        Rng rng(1000 + cfg_seed);
        const int in = 2 + static_cast<int>(rng.index(3));
        const int hidden = 3 + static_cast<int>(rng.index(4));
        const int out = 2 + static_cast<int>(rng.index(3));
        const int batch = 1 + static_cast<int>(rng.index(3));
        const int steps = 2 + static_cast<int>(rng.index(5));
        const bool with_lstm = cfg_seed % 2 == 0;

        DenseLayer enc("enc", in, hidden, Activation::Relu);
        LstmStack lstm("lstm", hidden, {hidden, hidden});
        DenseLayer head("head", hidden, out, Activation::Identity);
        enc.init(rng);
        lstm.init(rng);
        head.init(rng);

        std::vector<Matrix> xs, targets;
        for (int t = 0; t < steps; ++t) {
            xs.push_back(
                Matrix::NullaryExpr(in, batch, [&] { return rng.uniform(-1.0, 1.0); }));
            targets.push_back(
                Matrix::NullaryExpr(out, batch, [&] { return rng.uniform(-1.0, 1.0); }));
        }

        auto loss = [&] {
            LstmState state = lstm.zero_state(batch);
            std::vector<LstmLayerCache> lc(lstm.layer_count());
            double total = 0.0;
            for (int t = 0; t < steps; ++t) {
                DenseCache c1, c2;
                Matrix h = enc.forward(xs[t], c1);
                if (with_lstm) h = lstm.step(h, state, lc);
                total += mse(head.forward(h, c2), targets[t]);
            }
            return total / steps;
        };
        auto compute_grads = [&] {
            enc.zero_grad();
            lstm.zero_grad();
            head.zero_grad();
            LstmState state = lstm.zero_state(batch);
            std::vector<DenseCache> c1(steps), c2(steps);
            std::vector<std::vector<LstmLayerCache>> lc(steps);
            std::vector<Matrix> hs(steps), ys(steps);
            for (int t = 0; t < steps; ++t) {
                hs[t] = enc.forward(xs[t], c1[t]);
                const Matrix& z = with_lstm ? (hs[t] = lstm.step(hs[t], state, lc[t])) : hs[t];
                ys[t] = head.forward(z, c2[t]);
            }
            std::vector<Matrix> dh, dc;
            lstm.zero_state_grads(batch, dh, dc);
            for (int t = steps - 1; t >= 0; --t) {
                Matrix d = head.backward(mse_grad(ys[t], targets[t]) / steps, c2[t]);
                if (with_lstm) d = lstm.backward_step(d, lc[t], dh, dc);
                enc.backward(d, c1[t]);
            }
        };

        std::vector<TensorView> params = enc.parameters();
        if (with_lstm)
            for (auto view : lstm.parameters()) params.push_back(view);
        for (auto view : head.parameters()) params.push_back(view);

        GradCheckConfig gc;
        gc.samples_per_tensor = 60;
        gc.seed = cfg_seed;
        const auto result = grad_check(params, compute_grads, loss, gc);
        CAPTURE(cfg_seed);
        CAPTURE(result.worst_tensor);
        CAPTURE(result.worst_analytic);
        CAPTURE(result.worst_numeric);
        CHECK(result.max_rel_error < 1e-5);
    }
}

TEST_CASE("result reports the worst entry location") {
    // A deliberately wrong gradient must be flagged with a large error.
    Matrix w = Matrix::Constant(2, 2, 0.5);
    Matrix g = Matrix::Zero(2, 2);
    auto compute_grads = [&] { g.setConstant(-123.0); };  // nonsense gradient
    auto loss = [&] { return w.squaredNorm(); };
    const auto result = grad_check({TensorView{"w", &w, &g}}, compute_grads, loss);
    CHECK(result.max_rel_error > 1.0);
    CHECK(result.worst_tensor == "w");
}
