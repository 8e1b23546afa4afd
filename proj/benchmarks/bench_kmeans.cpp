#include <benchmark/benchmark.h>

#include "smpred/analysis/kmeans.hpp"
#include "smpred/rng.hpp"

using namespace smpred;

namespace {

void BM_KMeansFit(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const int d = 10;
    Rng rng(5);
    nn::Matrix codes = nn::Matrix::NullaryExpr(n, d, [&] { return rng.uniform(-1.0, 1.0); });
    for (auto _ : state) {
        auto model = analysis::kmeans_fit(codes, 20, 123);
        benchmark::DoNotOptimize(model.inertia);
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_KMeansFit)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
