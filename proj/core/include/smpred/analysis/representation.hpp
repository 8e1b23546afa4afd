#pragma once

#include <string>
#include <vector>

#include "smpred/nn/tensor.hpp"
#include "smpred/trajectory.hpp"

namespace smpred::analysis {

/// Sensory codes for one trajectory, row-aligned with ground-truth poses
/// and the per-step minimum raw sensor value used for plot coloring.
struct RepresentationSet {
    nn::Matrix codes;               // N x 10
    std::vector<sim::Pose> poses;   // N
    std::vector<double> min_laser;  // N, raw sensor units
    std::string env_name;
    std::string model_id;

    std::size_t size() const { return static_cast<std::size_t>(codes.rows()); }
    void validate() const;  // throws on row-count mismatch or non-finite codes
};

void save(const RepresentationSet& reps, const std::string& path);
RepresentationSet load_representations(const std::string& path);

/// Per-step minimum over the 5 raw sensors.
std::vector<double> min_laser_coloring(const data::Trajectory& traj);

}  // namespace smpred::analysis
