#include "smpred/agent.hpp"

#include <algorithm>

namespace smpred::sim {

SensorReading sense(const Environment& env, const Pose& pose) {
    SensorReading reading;
    for (int i = 0; i < kSensorCount; ++i) {
        reading[i] = ray_cast(env, {pose.x, pose.y}, pose.theta + kSensorAngles[i], kSensorRange);
    }
    return reading;
}

Pose apply_motor(const Environment& env, const Pose& pose, const MotorCommand& m, bool* clamped) {
    if (clamped) *clamped = false;
    double d = m.d;
    if (d > 0.0) {
        const double h = ray_cast(env, {pose.x, pose.y}, pose.theta,
                                  d + 1.0);  // look just past the move
        if (h <= d) {
            d = std::max(0.0, h - 1e-6);
            if (clamped) *clamped = true;
        }
    }
    return {pose.x + d * std::cos(pose.theta), pose.y + d * std::sin(pose.theta),
            wrap_angle(pose.theta + m.r)};
}

MotorCommand behavior_step(const SensorReading& reading, Rng& rng) {
    const double nearest = *std::min_element(reading.begin(), reading.end());
    if (nearest < kTurnThreshold) {
        const double r = rng.uniform(kPi - kPi / 10.0, kPi + kPi / 10.0);
        return {0.0, wrap_angle(r)};
    }
    const double d = rng.uniform();
    const double r = rng.uniform(-kPi / 6.0, kPi / 6.0);
    return {d, r};
}

}  // namespace smpred::sim
