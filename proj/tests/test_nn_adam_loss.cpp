#include <doctest.h>

#include <cmath>

#include "smpred/nn/adam.hpp"
#include "smpred/nn/loss.hpp"
#include "smpred/rng.hpp"

using namespace smpred;
using namespace smpred::nn;

TEST_CASE("mse spec examples") {
    Matrix p(5, 1), t(5, 1);
    p << 1, 0, 0, 0, 0;
    t << 0, 0, 0, 0, 0;
    CHECK(mse(p, p) == 0.0);
    CHECK(mse(p, t) == doctest::Approx(0.2).epsilon(1e-15));  // mean over 5 dims
}

TEST_CASE("mse matches an independent scalar loop within 1e-12") {
    Rng rng(8);
    const Matrix p = Matrix::NullaryExpr(7, 13, [&] { return rng.uniform(-2.0, 2.0); });
    const Matrix t = Matrix::NullaryExpr(7, 13, [&] { return rng.uniform(-2.0, 2.0); });
    double acc = 0.0;
    for (int c = 0; c < 13; ++c)
        for (int r = 0; r < 7; ++r) acc += (p(r, c) - t(r, c)) * (p(r, c) - t(r, c));
    acc /= 7.0 * 13.0;
    CHECK(std::abs(mse(p, t) - acc) < 1e-12);

    const Matrix g = mse_grad(p, t);
    for (int c = 0; c < 13; ++c)
        for (int r = 0; r < 7; ++r)
            CHECK(std::abs(g(r, c) - 2.0 * (p(r, c) - t(r, c)) / (7.0 * 13.0)) < 1e-15);
}

TEST_CASE("mse is batch-permutation invariant and positive unless equal") {
    Rng rng(15);
    Matrix p = Matrix::NullaryExpr(4, 6, [&] { return rng.uniform(-1.0, 1.0); });
    Matrix t = Matrix::NullaryExpr(4, 6, [&] { return rng.uniform(-1.0, 1.0); });
    const double base = mse(p, t);
    CHECK(base > 0.0);

    // Swap two batch columns in both: loss unchanged.
    p.col(1).swap(p.col(4));
    t.col(1).swap(t.col(4));
    CHECK(mse(p, t) == doctest::Approx(base).epsilon(1e-15));
}

TEST_CASE("mse rejects shape mismatch") {
    CHECK_THROWS_AS(mse(Matrix::Zero(2, 2), Matrix::Zero(2, 3)), std::invalid_argument);
}

TEST_CASE("adam: zero gradient leaves parameters unchanged, increments step") {
    Matrix w = Matrix::Constant(3, 3, 0.5);
    Matrix g = Matrix::Zero(3, 3);
    AdamOptimizer opt({TensorView{"w", &w, &g}});
    opt.step();
    opt.step();
    CHECK(opt.step_count() == 2);
    CHECK((w.array() == 0.5).all());
}

TEST_CASE("adam with lr = 0 is the identity") {
    Matrix w = Matrix::Constant(2, 2, 1.25);
    Matrix g = Matrix::Constant(2, 2, 3.0);
    AdamConfig cfg;
    cfg.lr = 0.0;
    AdamOptimizer opt({TensorView{"w", &w, &g}}, cfg);
    opt.step();
    CHECK((w.array() == 1.25).all());
}

TEST_CASE("first adam step moves each parameter by about lr toward descent") {
    // With bias correction, step 1 is exactly -lr * g / (|g| + eps') with
    // eps' tiny, so |delta| ~ lr and sign(delta) = -sign(g) for |g| >> eps.
    Matrix w(2, 2), g(2, 2);
    w << 1, 1, 1, 1;
    g << 0.7, -2.0, 13.0, -0.01;
    AdamOptimizer opt({TensorView{"w", &w, &g}});
    opt.step();
    for (int i = 0; i < 4; ++i) {
        const double delta = w(i) - 1.0;
        CHECK(std::abs(delta + 0.001 * (g(i) > 0 ? 1.0 : -1.0)) < 1e-6);
    }
}

TEST_CASE("two identical steps match a hand-unrolled scalar reference") {
    const double lr = 0.001, b1 = 0.9, b2 = 0.999, eps = 1e-8;
    const double g0 = 0.3;
    double w_ref = 2.0, m = 0.0, v = 0.0;
    for (int t = 1; t <= 2; ++t) {
        m = b1 * m + (1 - b1) * g0;
        v = b2 * v + (1 - b2) * g0 * g0;
        const double mh = m / (1 - std::pow(b1, t));
        const double vh = v / (1 - std::pow(b2, t));
        w_ref -= lr * mh / (std::sqrt(vh) + eps);
    }

    Matrix w = Matrix::Constant(1, 1, 2.0);
    Matrix g = Matrix::Constant(1, 1, g0);
    AdamOptimizer opt({TensorView{"w", &w, &g}});
    opt.step();
    opt.step();
    CHECK(std::abs(w(0, 0) - w_ref) < 1e-12);
}

TEST_CASE("adam converges on a quadratic bowl") {
    Matrix w = Matrix::Constant(1, 1, 5.0);
    Matrix g = Matrix::Zero(1, 1);
    AdamConfig cfg;
    cfg.lr = 0.05;
    AdamOptimizer opt({TensorView{"w", &w, &g}}, cfg);
    for (int t = 0; t < 2000; ++t) {
        g(0, 0) = 2.0 * w(0, 0);  // d/dw of w^2
        opt.step();
    }
    CHECK(std::abs(w(0, 0)) < 1e-3);
}

TEST_CASE("optimizer rejects null tensor views") {
    Matrix w(1, 1);
    CHECK_THROWS_AS(AdamOptimizer({TensorView{"w", &w, nullptr}}), std::invalid_argument);
}
