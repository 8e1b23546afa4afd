#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "smpred/agent.hpp"
#include "smpred/environment.hpp"
#include "smpred/rng.hpp"

namespace smpred::data {

using sim::MotorCommand;
using sim::Pose;
using sim::SensorReading;

/// One time step as seen by a model: the sensor reading taken at the pose,
/// and the motor command executed from that pose.
struct SensorimotorStep {
    SensorReading sensors{};
    MotorCommand motor{};
};

/// Model-facing sequence. Carries no pose information by construction.
struct SensorimotorSequence {
    std::string env_name;
    std::uint64_t seed = 0;
    std::vector<SensorimotorStep> steps;

    std::size_t size() const { return steps.size(); }
    bool empty() const { return steps.empty(); }
};

/// Full generation record: the sequence plus the pose at which each reading
/// was taken. Poses are for analysis only and live in a sidecar file.
struct Trajectory {
    SensorimotorSequence sequence;
    std::vector<Pose> poses;

    std::size_t size() const { return sequence.size(); }
};

struct DatasetSplits {
    SensorimotorSequence train, val, test;
};

struct TrajectorySplits {
    Trajectory train, val, test;
};

/// Roll out the exploration policy for `steps` steps from a uniformly sampled
/// start pose with at least one unit of wall clearance.
Trajectory generate(const sim::Environment& env, std::size_t steps, std::uint64_t seed);

/// Contiguous 80/10/10 boundaries: [0,t0) train, [t0,t1) val, [t1,T) test
/// with t0 = floor(0.8 T), t1 = floor(0.9 T).
std::pair<std::size_t, std::size_t> split_indices(std::size_t total);

DatasetSplits split(const SensorimotorSequence& seq);
TrajectorySplits split(const Trajectory& traj);

/// Writes `path` (sequence) and `path + ".poses"` (pose sidecar).
void save(const Trajectory& traj, const std::string& path);

/// Model-facing loader: reads only the sequence file, never poses.
SensorimotorSequence load_sequence(const std::string& path);

/// Analysis loader for the sidecar written next to `path`.
std::vector<Pose> load_poses(const std::string& path);

/// Rejoins sequence and sidecar, checking that they describe the same run.
Trajectory load_trajectory(const std::string& path);

/// CSV with header step,s0,s1,s2,s3,s4,d,r; one row per time step.
void export_csv(const SensorimotorSequence& seq, const std::string& path);

/// CSV with header step,x,y,theta.
void export_poses_csv(const Trajectory& traj, const std::string& path);

/// Model-input scaling: sensors / 10 -> [0,1], rotation / pi -> [-1,1],
/// displacement unchanged. Throws if any value is outside the raw ranges.
SensorimotorSequence normalize(const SensorimotorSequence& seq);
SensorimotorSequence denormalize(const SensorimotorSequence& seq);

}  // namespace smpred::data
