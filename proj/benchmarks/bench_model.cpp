#include <benchmark/benchmark.h>

#include "smpred/models/model.hpp"
#include "smpred/rng.hpp"

using namespace smpred;

namespace {

// Batched window forward (and optionally backward) for the recurrent
// motor-aware kind: batch 64, truncation-length windows, as in training.
void run_window(benchmark::State& state, bool with_backward) {
    const auto spec = models::canonical_spec(models::ArchKind::RecurrentSM);
    models::SensorimotorModel model(spec);
    model.init_parameters(11);

    const int batch = 64;
    const int steps = spec.window - 1;
    Rng rng(3);
    std::vector<nn::Matrix> sensors(steps), motors(steps), dpred(steps);
    for (int t = 0; t < steps; ++t) {
        sensors[t] = nn::Matrix::NullaryExpr(spec.sensor_inputs, batch,
                                             [&] { return rng.uniform(); });
        motors[t] = nn::Matrix::NullaryExpr(spec.motor_inputs, batch,
                                            [&] { return rng.uniform(-1.0, 1.0); });
        dpred[t] = nn::Matrix::Constant(5, batch, 1e-3);
    }

    models::ModelCache cache;
    for (auto _ : state) {
        auto out = model.forward(sensors, motors, cache);
        if (with_backward) {
            model.zero_grad();
            model.backward(dpred, cache);
        }
        benchmark::DoNotOptimize(out.pred.back());
    }
    state.SetItemsProcessed(state.iterations() * batch * steps);
}

void BM_RecurrentForward(benchmark::State& state) { run_window(state, false); }
BENCHMARK(BM_RecurrentForward)->Unit(benchmark::kMillisecond);

void BM_RecurrentForwardBackward(benchmark::State& state) { run_window(state, true); }
BENCHMARK(BM_RecurrentForwardBackward)->Unit(benchmark::kMillisecond);

void BM_MemorylessForwardBackward(benchmark::State& state) {
    const auto spec = models::canonical_spec(models::ArchKind::SM);
    models::SensorimotorModel model(spec);
    model.init_parameters(11);

    const int batch = 64;
    Rng rng(3);
    std::vector<nn::Matrix> sensors{nn::Matrix::NullaryExpr(
        spec.sensor_inputs, batch, [&] { return rng.uniform(); })};
    std::vector<nn::Matrix> motors{nn::Matrix::NullaryExpr(
        spec.motor_inputs, batch, [&] { return rng.uniform(-1.0, 1.0); })};
    std::vector<nn::Matrix> dpred{nn::Matrix::Constant(5, batch, 1e-3)};

    models::ModelCache cache;
    for (auto _ : state) {
        auto out = model.forward(sensors, motors, cache);
        model.zero_grad();
        model.backward(dpred, cache);
        benchmark::DoNotOptimize(out.pred.back());
    }
    state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(BM_MemorylessForwardBackward)->Unit(benchmark::kMicrosecond);

}  // namespace
