#include <benchmark/benchmark.h>

#include "smpred/agent.hpp"
#include "smpred/environment.hpp"
#include "smpred/rng.hpp"

using namespace smpred;

namespace {

sim::Pose random_free_pose(const sim::Environment& env, Rng& rng) {
    for (;;) {
        sim::Pose p{rng.uniform(0.0, env.size()), rng.uniform(0.0, env.size()),
                    rng.uniform(-sim::kPi, sim::kPi)};
        if (env.in_free_space({p.x, p.y}) &&
            env.distance_to_nearest_wall({p.x, p.y}) >= 1.0)
            return p;
    }
}

void BM_RayCast(benchmark::State& state) {
    const auto env = sim::Environment::rooms2();
    Rng rng(7);
    std::vector<sim::Pose> poses;
    for (int i = 0; i < 1024; ++i) poses.push_back(random_free_pose(env, rng));
    std::size_t i = 0;
    for (auto _ : state) {
        const auto& p = poses[i++ & 1023];
        benchmark::DoNotOptimize(
            sim::ray_cast(env, {p.x, p.y}, p.theta, sim::kSensorRange));
    }
}
BENCHMARK(BM_RayCast);

void BM_Sense(benchmark::State& state) {
    const auto env = sim::Environment::rooms2();
    Rng rng(7);
    std::vector<sim::Pose> poses;
    for (int i = 0; i < 1024; ++i) poses.push_back(random_free_pose(env, rng));
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sim::sense(env, poses[i++ & 1023]));
    }
}
BENCHMARK(BM_Sense);

void BM_ExplorationStep(benchmark::State& state) {
    const auto env = sim::Environment::rooms2();
    Rng rng(7);
    sim::Pose pose = random_free_pose(env, rng);
    for (auto _ : state) {
        const auto reading = sim::sense(env, pose);
        const auto cmd = sim::behavior_step(reading, rng);
        pose = sim::apply_motor(env, pose, cmd);
        benchmark::DoNotOptimize(pose);
    }
}
BENCHMARK(BM_ExplorationStep);

}  // namespace
