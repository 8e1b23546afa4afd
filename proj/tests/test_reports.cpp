#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "smpred/analysis/reports.hpp"
#include "smpred/models/model.hpp"
#include "smpred/models/train.hpp"
#include "smpred/rng.hpp"
#include "smpred/trajectory.hpp"

using namespace smpred;
using namespace smpred::analysis;

namespace {

// Representation set with codes clustered around integer grid points and
// poses encoding the row index, so sampling can be traced exactly.
RepresentationSet synthetic_reps(int n, int groups, Rng& rng) {
    RepresentationSet reps;
    reps.env_name = "square";
    reps.model_id = "synthetic";
    reps.codes = nn::Matrix(n, 10);
    for (int i = 0; i < n; ++i) {
        const int g = i % groups;
        for (int j = 0; j < 10; ++j)
            reps.codes(i, j) = 10.0 * g + rng.uniform(-0.01, 0.01);
        reps.poses.push_back({static_cast<double>(i), static_cast<double>(g), 0.0});
        reps.min_laser.push_back(10.0);
    }
    return reps;
}

}  // namespace

TEST_CASE("cluster report: small clusters emit every member, large ones the cap") {
    Rng rng(3);
    auto reps = synthetic_reps(230, 2, rng);  // two groups: 115 members each
    auto clusters = kmeans_fit(reps.codes, 2, 1);
    clusters.model_id = reps.model_id;

    const auto rows_all = cluster_report(clusters, reps, 500, 7);
    CHECK(rows_all.size() == 230);  // both clusters below the cap: all members

    const auto rows_capped = cluster_report(clusters, reps, 40, 7);
    CHECK(rows_capped.size() == 80);
    std::map<int, int> per_cluster;
    for (const auto& r : rows_capped) ++per_cluster[r.cluster_id];
    for (const auto& [id, count] : per_cluster) CHECK(count == 40);

    // Ascending cluster order.
    for (std::size_t i = 1; i < rows_capped.size(); ++i)
        CHECK(rows_capped[i].cluster_id >= rows_capped[i - 1].cluster_id);
}

TEST_CASE("cluster report sampling is deterministic per seed") {
    Rng rng(4);
    auto reps = synthetic_reps(300, 3, rng);
    auto clusters = kmeans_fit(reps.codes, 3, 2);
    const auto a = cluster_report(clusters, reps, 20, 9);
    const auto b = cluster_report(clusters, reps, 20, 9);
    const auto c = cluster_report(clusters, reps, 20, 10);
    REQUIRE(a.size() == b.size());
    bool same = true;
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].x == b[i].x);
        CHECK(a[i].y == b[i].y);
        if (a[i].x != (i < c.size() ? c[i].x : -1)) same = false;
    }
    CHECK_FALSE(same);  // a different seed draws a different sample
}

TEST_CASE("every reported pose belongs to the cluster that reports it") {
    Rng rng(5);
    auto reps = synthetic_reps(240, 4, rng);
    auto clusters = kmeans_fit(reps.codes, 4, 3);
    const auto labels = assign(clusters, reps.codes);
    const auto rows = cluster_report(clusters, reps, 30, 11);
    for (const auto& row : rows) {
        // Pose x encodes the original row index.
        const int idx = static_cast<int>(row.x);
        CHECK(labels[idx] == row.cluster_id);
    }
}

TEST_CASE("min_laser coloring matches a brute-force pass over the records") {
    const auto env = sim::Environment::rooms1();
    const auto traj = data::generate(env, 250, 8);
    const auto colors = min_laser_coloring(traj);
    REQUIRE(colors.size() == traj.size());
    for (std::size_t t = 0; t < traj.size(); ++t) {
        const auto& s = traj.sequence.steps[t].sensors;
        CHECK(colors[t] == *std::min_element(s.begin(), s.end()));
    }
}

TEST_CASE("min_laser spec examples") {
    data::Trajectory traj;
    traj.sequence.env_name = "square";
    data::SensorimotorStep a, b;
    a.sensors = {10, 10, 10, 10, 10};
    b.sensors = {0.5, 10, 10, 10, 10};
    traj.sequence.steps = {a, b};
    traj.poses = {{1, 1, 0}, {2, 2, 0}};
    const auto colors = min_laser_coloring(traj);
    CHECK(colors[0] == 10.0);
    CHECK(colors[1] == 0.5);
}

TEST_CASE("same-environment transfer reproduces assign() exactly") {
    Rng rng(6);
    auto reps = synthetic_reps(200, 4, rng);
    auto clusters = kmeans_fit(reps.codes, 4, 4);
    clusters.model_id = reps.model_id;
    const auto report = transfer(clusters, reps, 25, 13);
    CHECK(report.labels == assign(clusters, reps.codes));
    CHECK(report.labels == clusters.labels);
}

TEST_CASE("transfer labels every point") {
    Rng rng(7);
    auto reps_a = synthetic_reps(150, 3, rng);
    auto clusters = kmeans_fit(reps_a.codes, 3, 5);
    clusters.model_id = "enc";

    // "Other environment": different codes, same encoder id.
    auto reps_b = synthetic_reps(170, 5, rng);
    reps_b.env_name = "rooms1";
    reps_b.model_id = "enc";
    const auto report = transfer(clusters, reps_b, 25, 14);
    CHECK(report.labels.size() == reps_b.size());
    for (int l : report.labels) {
        CHECK(l >= 0);
        CHECK(l < 3);
    }
}

TEST_CASE("transfer rejects representations from a different encoder") {
    Rng rng(8);
    auto reps = synthetic_reps(100, 2, rng);
    auto clusters = kmeans_fit(reps.codes, 2, 6);
    clusters.model_id = "encoder-a";
    reps.model_id = "encoder-b";
    CHECK_THROWS_AS(transfer(clusters, reps, 10, 15), std::invalid_argument);
}

TEST_CASE("near_corner_fraction geometry") {
    const auto env = sim::Environment::square();
    SUBCASE("position only") {
        std::vector<sim::Pose> poses{{1, 1, 0}, {25, 25, 0}, {49, 49, 2}, {25, 1, 0}};
        CHECK(near_corner_fraction(env, poses, 3.0) == doctest::Approx(0.5));
    }
    SUBCASE("facing requirement") {
        // At (3,3) looking toward (0,0): bearing -3pi/4.
        std::vector<sim::Pose> facing{{3, 3, -3 * sim::kPi / 4}};
        std::vector<sim::Pose> away{{3, 3, 0.0}};
        CHECK(near_corner_fraction(env, facing, 5.0, 0.6) == 1.0);
        CHECK(near_corner_fraction(env, away, 5.0, 0.6) == 0.0);
        // Slightly off-axis but inside the tolerance.
        std::vector<sim::Pose> offset{{3, 3, -3 * sim::kPi / 4 + 0.5}};
        CHECK(near_corner_fraction(env, offset, 5.0, 0.6) == 1.0);
    }
    SUBCASE("interior wall junctions count as corners") {
        const auto r1 = sim::Environment::rooms1();
        // (25,0) junction of the vertical wall with the bottom boundary.
        std::vector<sim::Pose> poses{{25.5, 1.0, 0.0}};
        CHECK(near_corner_fraction(r1, poses, 3.0) == 1.0);
    }
}

TEST_CASE("near_wall_end_fraction geometry") {
    const auto env = sim::Environment::rooms1();
    // Free ends at (30,25) and (25,17).
    std::vector<sim::Pose> poses{{30, 26, 0}, {25, 15.5, 1}, {10, 10, 0}, {40, 40, 0}};
    CHECK(near_wall_end_fraction(env, poses, 3.0) == doctest::Approx(0.5));
    // The square has no interior walls, hence no wall ends.
    CHECK(near_wall_end_fraction(sim::Environment::square(), poses, 3.0) == 0.0);
}

TEST_CASE("nothing_perceived_stats counts all-max records per cluster") {
    Rng rng(9);
    RepresentationSet reps;
    reps.env_name = "square";
    reps.model_id = "m";
    reps.codes = nn::Matrix(40, 10);
    for (int i = 0; i < 40; ++i) {
        const int g = i < 30 ? 0 : 1;  // two well-separated code groups
        for (int j = 0; j < 10; ++j) reps.codes(i, j) = 5.0 * g + rng.uniform(-0.01, 0.01);
        reps.poses.push_back({0, 0, 0});
        // Records 0..9 and 30..34 perceive nothing.
        reps.min_laser.push_back((i < 10 || (i >= 30 && i < 35)) ? 10.0 : 4.2);
    }
    auto clusters = kmeans_fit(reps.codes, 2, 7);
    const auto stats = nothing_perceived_stats(clusters, reps);
    CHECK(stats.record_count == 15);
    CHECK(stats.clusters_hit == 2);
    CHECK(stats.dominant_share == doctest::Approx(10.0 / 15.0));
}

TEST_CASE("cluster_geometry covers full membership") {
    Rng rng(10);
    auto reps = synthetic_reps(120, 2, rng);
    // Group 0 poses near a corner, group 1 far away.
    for (int i = 0; i < 120; ++i) {
        if (i % 2 == 0)
            reps.poses[i] = {1.0, 1.0, 0.0};
        else
            reps.poses[i] = {25.0, 25.0, 0.0};
    }
    auto clusters = kmeans_fit(reps.codes, 2, 8);
    const auto env = sim::Environment::square();
    const auto geo = cluster_geometry(env, clusters, reps);
    REQUIRE(geo.size() == 2);
    std::size_t total = 0;
    bool corner_cluster = false;
    for (const auto& g : geo) {
        total += g.member_count;
        if (g.corner_frac == 1.0) corner_cluster = true;
    }
    CHECK(total == 120);
    CHECK(corner_cluster);
}

TEST_CASE("csv writers emit the documented headers") {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path();

    const std::vector<ClusterReportRow> rows{{0, 1.5, 2.5, 0.3}, {1, 4.0, 5.0, -0.2}};
    const auto report_path = (dir / "smpred_report_test.csv").string();
    write_cluster_report_csv(rows, report_path);
    std::ifstream in(report_path);
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "cluster_id,x,y,theta");
    std::size_t n = 0;
    while (std::getline(in, line)) ++n;
    CHECK(n == 2);
    fs::remove(report_path);

    nn::Matrix proj(2, 2);
    proj << 0.1, 0.2, 0.3, 0.4;
    const auto proj_path = (dir / "smpred_proj_test.csv").string();
    write_projection_csv(proj, {9.0, 8.0}, proj_path);
    std::ifstream in2(proj_path);
    REQUIRE(std::getline(in2, line));
    CHECK(line == "point_id,pc1,pc2,min_laser");
    n = 0;
    while (std::getline(in2, line)) ++n;
    CHECK(n == 2);
    fs::remove(proj_path);

    CHECK_THROWS_AS(write_projection_csv(nn::Matrix::Zero(3, 2), {1.0}, proj_path),
                    std::invalid_argument);
}
