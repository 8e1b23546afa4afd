#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <set>
#include <vector>

#include "smpred/analysis/kmeans.hpp"
#include "smpred/rng.hpp"

using namespace smpred;
using namespace smpred::analysis;

namespace {

// Independent Lloyd implementation with uniform random seeding, used as a
// best-of-restarts oracle. Shares no code with the library version.
double lloyd_oracle_inertia(const nn::Matrix& codes, int k, Rng& rng) {
    const int n = static_cast<int>(codes.rows());
    const int d = static_cast<int>(codes.cols());
    // Seed with k distinct rows.
    std::vector<std::size_t> pick = rng.sample_without_replacement(n, k);
    nn::Matrix centroids(k, d);
    for (int c = 0; c < k; ++c) centroids.row(c) = codes.row(static_cast<int>(pick[c]));

    std::vector<int> labels(n, 0);
    for (int iter = 0; iter < 300; ++iter) {
        bool changed = false;
        for (int i = 0; i < n; ++i) {
            int best = 0;
            double best_d = (codes.row(i) - centroids.row(0)).squaredNorm();
            for (int c = 1; c < k; ++c) {
                const double dist = (codes.row(i) - centroids.row(c)).squaredNorm();
                if (dist < best_d) {
                    best_d = dist;
                    best = c;
                }
            }
            if (labels[i] != best) {
                labels[i] = best;
                changed = true;
            }
        }
        nn::Matrix sums = nn::Matrix::Zero(k, d);
        std::vector<int> counts(k, 0);
        for (int i = 0; i < n; ++i) {
            sums.row(labels[i]) += codes.row(i);
            ++counts[labels[i]];
        }
        for (int c = 0; c < k; ++c)
            if (counts[c] > 0) centroids.row(c) = sums.row(c) / counts[c];
        if (!changed) break;
    }
    double inertia = 0.0;
    for (int i = 0; i < n; ++i) inertia += (codes.row(i) - centroids.row(labels[i])).squaredNorm();
    return inertia;
}

nn::Matrix three_blobs(int per_blob, Rng& rng) {
    const double centers[3][2] = {{0.0, 0.0}, {10.0, 0.0}, {5.0, 9.0}};
    nn::Matrix codes(3 * per_blob, 2);
    for (int b = 0; b < 3; ++b)
        for (int i = 0; i < per_blob; ++i) {
            codes(b * per_blob + i, 0) = centers[b][0] + rng.uniform(-1.0, 1.0);
            codes(b * per_blob + i, 1) = centers[b][1] + rng.uniform(-1.0, 1.0);
        }
    return codes;
}

}  // namespace

TEST_CASE("N = k distinct points: every point its own centroid, inertia 0") {
    nn::Matrix codes(4, 2);
    codes << 0, 0, 5, 0, 0, 5, 5, 5;
    const auto model = kmeans_fit(codes, 4, 9);
    CHECK(model.inertia == doctest::Approx(0.0).epsilon(1e-12));
    std::set<int> distinct(model.labels.begin(), model.labels.end());
    CHECK(distinct.size() == 4);
    for (int i = 0; i < 4; ++i)
        CHECK((codes.row(i) - model.centroids.row(model.labels[i])).norm() < 1e-12);
}

TEST_CASE("all points identical: one label, inertia 0") {
    nn::Matrix codes = nn::Matrix::Constant(30, 3, 2.5);
    const auto model = kmeans_fit(codes, 5, 1);
    CHECK(model.inertia == 0.0);
    for (int l : model.labels) CHECK(l == model.labels[0]);
}

TEST_CASE("three blobs: recovers the partition at best-of-100-restarts quality") {
    Rng rng(33);
    const nn::Matrix codes = three_blobs(60, rng);

    double oracle = std::numeric_limits<double>::infinity();
    Rng oracle_rng(77);
    for (int r = 0; r < 100; ++r)
        oracle = std::min(oracle, lloyd_oracle_inertia(codes, 3, oracle_rng));

    const auto model = kmeans_fit(codes, 3, 5);
    CHECK(model.inertia <= oracle * 1.01);

    // Each blob lands in a single cluster.
    for (int b = 0; b < 3; ++b) {
        std::set<int> blob_labels;
        for (int i = 0; i < 60; ++i) blob_labels.insert(model.labels[b * 60 + i]);
        CHECK(blob_labels.size() == 1);
    }
}

TEST_CASE("inertia history is non-increasing") {
    Rng rng(21);
    nn::Matrix codes(400, 6);
    for (int i = 0; i < codes.size(); ++i) codes(i) = rng.uniform(-3.0, 3.0);
    const auto model = kmeans_fit(codes, 20, 3);
    REQUIRE(model.inertia_history.size() >= 2);
    for (std::size_t i = 1; i < model.inertia_history.size(); ++i)
        CHECK(model.inertia_history[i] <= model.inertia_history[i - 1] * (1 + 1e-12));
    CHECK(model.inertia == model.inertia_history.back());
}

TEST_CASE("assign on the fit data returns the fit labels") {
    Rng rng(22);
    nn::Matrix codes(300, 4);
    for (int i = 0; i < codes.size(); ++i) codes(i) = rng.uniform(-2.0, 2.0);
    const auto model = kmeans_fit(codes, 7, 4);
    const auto relabeled = assign(model, codes);
    CHECK(relabeled == model.labels);
}

TEST_CASE("fit is deterministic per seed") {
    Rng rng(23);
    nn::Matrix codes(200, 5);
    for (int i = 0; i < codes.size(); ++i) codes(i) = rng.uniform(-2.0, 2.0);
    const auto a = kmeans_fit(codes, 6, 42);
    const auto b = kmeans_fit(codes, 6, 42);
    CHECK((a.centroids - b.centroids).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.labels == b.labels);
    CHECK(a.inertia == b.inertia);
}

TEST_CASE("no empty clusters at fit time") {
    Rng rng(24);
    nn::Matrix codes(100, 3);
    for (int i = 0; i < codes.size(); ++i) codes(i) = rng.uniform(-1.0, 1.0);
    const auto model = kmeans_fit(codes, 10, 5);
    std::vector<int> counts(10, 0);
    for (int l : model.labels) ++counts[l];
    for (int c : counts) CHECK(c > 0);
}

TEST_CASE("requires at least k points") {
    nn::Matrix codes(3, 2);
    codes << 0, 0, 1, 1, 2, 2;
    CHECK_THROWS_AS(kmeans_fit(codes, 4, 1), std::invalid_argument);
}

TEST_CASE("cluster model round trips through its file format") {
    Rng rng(25);
    nn::Matrix codes(120, 4);
    for (int i = 0; i < codes.size(); ++i) codes(i) = rng.uniform(-2.0, 2.0);
    auto model = kmeans_fit(codes, 5, 6);
    model.model_id = "round-trip-test";
    const auto path =
        (std::filesystem::temp_directory_path() / "smpred_clusters_test.bin").string();
    save(model, path);
    const auto back = load_clusters(path);
    CHECK(back.model_id == model.model_id);
    CHECK((back.centroids - model.centroids).cwiseAbs().maxCoeff() == 0.0);
    CHECK(back.labels == model.labels);
    CHECK(back.inertia == model.inertia);
    CHECK(back.inertia_history == model.inertia_history);
    std::filesystem::remove(path);
}
