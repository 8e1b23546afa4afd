#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "smpred/analysis/kmeans.hpp"
#include "smpred/analysis/pca.hpp"
#include "smpred/analysis/representation.hpp"
#include "smpred/environment.hpp"

namespace smpred::analysis {

struct ClusterReportRow {
    int cluster_id = 0;
    double x = 0.0, y = 0.0, theta = 0.0;
};

/// Per-cluster pose scatter: up to `samples_per_cluster` member poses drawn
/// uniformly without replacement (all members when the cluster is smaller),
/// emitted in ascending cluster order.
std::vector<ClusterReportRow> cluster_report(const ClusterModel& clusters,
                                             const RepresentationSet& reps,
                                             std::size_t samples_per_cluster,
                                             std::uint64_t seed);

/// Cluster centroids from one environment applied to representations of
/// another (or the same) produced by the same encoder. Labels every point.
/// Throws when the representations come from a different encoder than the
/// clusters were fit on.
struct TransferReport {
    std::vector<int> labels;
    std::vector<ClusterReportRow> rows;  // sampled per-cluster poses
};
TransferReport transfer(const ClusterModel& clusters, const RepresentationSet& reps,
                        std::size_t samples_per_cluster, std::uint64_t seed);

/// Fraction of poses within `max_dist` of an environment corner; when
/// `facing_tol` is set, the heading must additionally point within that
/// angle of the corner.
double near_corner_fraction(const sim::Environment& env, const std::vector<sim::Pose>& poses,
                            double max_dist = 3.0,
                            std::optional<double> facing_tol = std::nullopt);

/// Fraction of poses within `max_dist` of a free interior-wall endpoint.
double near_wall_end_fraction(const sim::Environment& env, const std::vector<sim::Pose>& poses,
                              double max_dist = 3.0);

/// Full-membership geometry per cluster (criteria are defined over members,
/// not report samples).
struct ClusterGeometry {
    int cluster_id = 0;
    std::size_t member_count = 0;
    double corner_frac = 0.0;         // position only
    double corner_facing_frac = 0.0;  // position + orientation
    double wall_end_frac = 0.0;
};
std::vector<ClusterGeometry> cluster_geometry(const sim::Environment& env,
                                              const ClusterModel& clusters,
                                              const RepresentationSet& reps);

/// Distribution of the records where every sensor reads its maximum (the
/// agent perceives nothing) across clusters.
struct NothingPerceivedStats {
    std::size_t record_count = 0;
    std::vector<std::size_t> cluster_counts;
    std::size_t clusters_hit = 0;
    double dominant_share = 0.0;  // largest cluster's share of such records
};
NothingPerceivedStats nothing_perceived_stats(const ClusterModel& clusters,
                                              const RepresentationSet& reps);

/// CSV rows cluster_id,x,y,theta.
void write_cluster_report_csv(const std::vector<ClusterReportRow>& rows,
                              const std::string& path);

/// CSV rows point_id,pc1,pc2,min_laser.
void write_projection_csv(const nn::Matrix& projection, const std::vector<double>& min_laser,
                          const std::string& path);

}  // namespace smpred::analysis
