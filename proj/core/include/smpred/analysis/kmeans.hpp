#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "smpred/nn/tensor.hpp"

namespace smpred::analysis {

struct ClusterModel {
    nn::Matrix centroids;                 // k x D
    std::vector<int> labels;              // fit-time assignment, N
    double inertia = 0.0;                 // within-cluster sum of squares
    std::vector<double> inertia_history;  // one entry per assignment pass
    std::string model_id;                 // encoder that produced the codes
};

/// Lloyd's algorithm with k-means++ seeding. Stops when the largest centroid
/// movement drops below 1e-6 or after 300 iterations; clusters that empty
/// out mid-run are reseeded to the farthest point. Requires N >= k.
ClusterModel kmeans_fit(const nn::Matrix& codes, int k, std::uint64_t seed);

/// Nearest-centroid labels (Euclidean, ties to the lowest cluster id).
std::vector<int> assign(const ClusterModel& model, const nn::Matrix& codes);

void save(const ClusterModel& model, const std::string& path);
ClusterModel load_clusters(const std::string& path);

}  // namespace smpred::analysis
