#pragma once

#include "smpred/environment.hpp"
#include "smpred/rng.hpp"

#include <array>

namespace smpred::sim {

inline constexpr int kSensorCount = 5;
inline constexpr double kSensorRange = 10.0;
/// Ray angles relative to the heading, left to right.
inline constexpr std::array<double, kSensorCount> kSensorAngles = {-0.6, -0.3, 0.0, 0.3, 0.6};

/// Ground-truth agent state. Stored for analysis; models never see it.
struct Pose {
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;  // heading, wrapped to (-pi, pi]
};

/// One motor command: translate d along the heading, then rotate by r.
struct MotorCommand {
    double d = 0.0;
    double r = 0.0;  // wrapped to (-pi, pi]
};

using SensorReading = std::array<double, kSensorCount>;

/// 5 distance sensors, range-limited to 10 units (10 = nothing in range).
SensorReading sense(const Environment& env, const Pose& pose);

/// Translate d along theta, then rotate by r. If the translation ray hits a
/// wall at distance h <= d the translation is clamped to max(0, h - 1e-6);
/// the canonical policy never triggers this (clamped reports when it does).
Pose apply_motor(const Environment& env, const Pose& pose, const MotorCommand& m,
                 bool* clamped = nullptr);

/// Random exploration policy: if any sensor reads below 1 unit, turn around
/// (d = 0, r ~ U(pi - pi/10, pi + pi/10) wrapped); otherwise move forward by
/// d ~ U(0,1) and rotate by r ~ U(-pi/6, pi/6). The branch test consumes no
/// draw; the forward branch draws d then r; the turn branch draws r only.
MotorCommand behavior_step(const SensorReading& reading, Rng& rng);

inline constexpr double kTurnThreshold = 1.0;

}  // namespace smpred::sim
