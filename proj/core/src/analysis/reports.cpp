#include "smpred/analysis/reports.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "smpred/agent.hpp"
#include "smpred/geometry.hpp"
#include "smpred/rng.hpp"

namespace smpred::analysis {

namespace {

std::vector<ClusterReportRow> sample_rows(const std::vector<int>& labels,
                                          const std::vector<sim::Pose>& poses, int k,
                                          std::size_t samples_per_cluster, std::uint64_t seed) {
    std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < labels.size(); ++i) {
        members[static_cast<std::size_t>(labels[i])].push_back(i);
    }
    Rng rng = Rng::stream(seed, "cluster-report");
    std::vector<ClusterReportRow> rows;
    for (int c = 0; c < k; ++c) {
        const auto& m = members[static_cast<std::size_t>(c)];
        std::vector<std::size_t> chosen;
        if (m.size() <= samples_per_cluster) {
            chosen.assign(m.begin(), m.end());
        } else {
            for (std::size_t pick : rng.sample_without_replacement(m.size(), samples_per_cluster)) {
                chosen.push_back(m[pick]);
            }
            std::sort(chosen.begin(), chosen.end());
        }
        for (std::size_t i : chosen) {
            rows.push_back({c, poses[i].x, poses[i].y, poses[i].theta});
        }
    }
    return rows;
}

}  // namespace

std::vector<ClusterReportRow> cluster_report(const ClusterModel& clusters,
                                             const RepresentationSet& reps,
                                             std::size_t samples_per_cluster,
                                             std::uint64_t seed) {
    reps.validate();
    const std::vector<int> labels = assign(clusters, reps.codes);
    return sample_rows(labels, reps.poses, static_cast<int>(clusters.centroids.rows()),
                       samples_per_cluster, seed);
}

TransferReport transfer(const ClusterModel& clusters, const RepresentationSet& reps,
                        std::size_t samples_per_cluster, std::uint64_t seed) {
    reps.validate();
    if (!clusters.model_id.empty() && clusters.model_id != reps.model_id) {
        throw std::invalid_argument("transfer: clusters were fit on encoder '" +
                                    clusters.model_id + "' but representations come from '" +
                                    reps.model_id + "'");
    }
    TransferReport report;
    report.labels = assign(clusters, reps.codes);
    report.rows = sample_rows(report.labels, reps.poses,
                              static_cast<int>(clusters.centroids.rows()), samples_per_cluster,
                              seed);
    return report;
}

double near_corner_fraction(const sim::Environment& env, const std::vector<sim::Pose>& poses,
                            double max_dist, std::optional<double> facing_tol) {
    if (poses.empty()) return 0.0;
    const std::vector<sim::Vec2> corners = env.corners();
    std::size_t hits = 0;
    for (const sim::Pose& p : poses) {
        bool hit = false;
        for (const sim::Vec2& c : corners) {
            const sim::Vec2 to{c.x - p.x, c.y - p.y};
            const double dist = to.norm();
            if (dist > max_dist) continue;
            if (facing_tol) {
                // Degenerate at the corner itself: any heading counts.
                if (dist > 1e-12) {
                    const double bearing = std::atan2(to.y, to.x);
                    if (std::abs(sim::wrap_angle(bearing - p.theta)) > *facing_tol) continue;
                }
            }
            hit = true;
            break;
        }
        if (hit) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(poses.size());
}

double near_wall_end_fraction(const sim::Environment& env, const std::vector<sim::Pose>& poses,
                              double max_dist) {
    if (poses.empty()) return 0.0;
    const std::vector<sim::Vec2> ends = env.wall_end_points();
    if (ends.empty()) return 0.0;
    std::size_t hits = 0;
    for (const sim::Pose& p : poses) {
        for (const sim::Vec2& e : ends) {
            const double dx = e.x - p.x;
            const double dy = e.y - p.y;
            if (std::sqrt(dx * dx + dy * dy) <= max_dist) {
                ++hits;
                break;
            }
        }
    }
    return static_cast<double>(hits) / static_cast<double>(poses.size());
}

std::vector<ClusterGeometry> cluster_geometry(const sim::Environment& env,
                                              const ClusterModel& clusters,
                                              const RepresentationSet& reps) {
    reps.validate();
    const std::vector<int> labels = assign(clusters, reps.codes);
    const int k = static_cast<int>(clusters.centroids.rows());
    std::vector<std::vector<sim::Pose>> members(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < labels.size(); ++i) {
        members[static_cast<std::size_t>(labels[i])].push_back(reps.poses[i]);
    }
    std::vector<ClusterGeometry> out;
    for (int c = 0; c < k; ++c) {
        const auto& poses = members[static_cast<std::size_t>(c)];
        ClusterGeometry g;
        g.cluster_id = c;
        g.member_count = poses.size();
        g.corner_frac = near_corner_fraction(env, poses, 3.0, std::nullopt);
        g.corner_facing_frac = near_corner_fraction(env, poses, 3.0, 0.6);
        g.wall_end_frac = near_wall_end_fraction(env, poses, 3.0);
        out.push_back(g);
    }
    return out;
}

NothingPerceivedStats nothing_perceived_stats(const ClusterModel& clusters,
                                              const RepresentationSet& reps) {
    reps.validate();
    const std::vector<int> labels = assign(clusters, reps.codes);
    NothingPerceivedStats stats;
    stats.cluster_counts.assign(static_cast<std::size_t>(clusters.centroids.rows()), 0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (reps.min_laser[i] < sim::kSensorRange - 1e-9) continue;
        ++stats.record_count;
        ++stats.cluster_counts[static_cast<std::size_t>(labels[i])];
    }
    std::size_t dominant = 0;
    for (std::size_t c : stats.cluster_counts) {
        if (c > 0) ++stats.clusters_hit;
        dominant = std::max(dominant, c);
    }
    stats.dominant_share = stats.record_count == 0
                               ? 0.0
                               : static_cast<double>(dominant) /
                                     static_cast<double>(stats.record_count);
    return stats;
}

void write_cluster_report_csv(const std::vector<ClusterReportRow>& rows,
                              const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "cluster_id,x,y,theta\n";
    char buf[120];
    for (const ClusterReportRow& r : rows) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g\n", r.cluster_id, r.x, r.y, r.theta);
        out << buf;
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

void write_projection_csv(const nn::Matrix& projection, const std::vector<double>& min_laser,
                          const std::string& path) {
    if (static_cast<std::size_t>(projection.rows()) != min_laser.size()) {
        throw std::invalid_argument("projection/coloring row mismatch");
    }
    if (projection.cols() != 2) throw std::invalid_argument("projection must be N x 2");
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "point_id,pc1,pc2,min_laser\n";
    char buf[120];
    for (Eigen::Index i = 0; i < projection.rows(); ++i) {
        std::snprintf(buf, sizeof(buf), "%lld,%.17g,%.17g,%.17g\n", static_cast<long long>(i),
                      projection(i, 0), projection(i, 1),
                      min_laser[static_cast<std::size_t>(i)]);
        out << buf;
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace smpred::analysis
