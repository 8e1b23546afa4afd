#include "smpred/analysis/kmeans.hpp"

#include <fstream>
#include <limits>
#include <stdexcept>

#include "smpred/io/binary.hpp"
#include "smpred/rng.hpp"

namespace smpred::analysis {

namespace {

constexpr char kMagic[9] = "SMPRDCLU";
constexpr std::uint64_t kFormatVersion = 1;
constexpr double kMoveTol = 1e-6;
constexpr int kMaxIters = 300;

/// Nearest-centroid pass. Argmin uses the expanded form with one GEMM;
/// reported distances are recomputed exactly for the chosen pairs.
std::vector<int> assign_all(const nn::Matrix& codes, const nn::Matrix& centroids,
                            std::vector<double>* d2_out) {
    const Eigen::Index n = codes.rows();
    const Eigen::Index k = centroids.rows();
    const nn::Matrix dots = codes * centroids.transpose();
    const nn::Vector cn = centroids.rowwise().squaredNorm();
    const nn::Vector xn = codes.rowwise().squaredNorm();

    std::vector<int> labels(static_cast<std::size_t>(n));
    if (d2_out) d2_out->resize(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (Eigen::Index c = 0; c < k; ++c) {
            const double d = xn(i) - 2.0 * dots(i, c) + cn(c);
            if (d < best_d) {
                best_d = d;
                best = static_cast<int>(c);
            }
        }
        labels[static_cast<std::size_t>(i)] = best;
        if (d2_out) {
            (*d2_out)[static_cast<std::size_t>(i)] =
                (codes.row(i) - centroids.row(best)).squaredNorm();
        }
    }
    return labels;
}

}  // namespace

ClusterModel kmeans_fit(const nn::Matrix& codes, int k, std::uint64_t seed) {
    const Eigen::Index n = codes.rows();
    const Eigen::Index d = codes.cols();
    if (k < 1) throw std::invalid_argument("kmeans_fit: k must be positive");
    if (n < k) {
        throw std::invalid_argument("kmeans_fit: " + std::to_string(n) + " points for k = " +
                                    std::to_string(k));
    }

    Rng rng(seed);
    ClusterModel model;
    model.centroids.resize(k, d);

    // k-means++ seeding: next seed drawn proportionally to the squared
    // distance from the nearest seed so far.
    model.centroids.row(0) = codes.row(static_cast<Eigen::Index>(rng.index(
        static_cast<std::size_t>(n))));
    std::vector<double> seed_d2(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        seed_d2[static_cast<std::size_t>(i)] =
            (codes.row(i) - model.centroids.row(0)).squaredNorm();
    }
    for (int c = 1; c < k; ++c) {
        double total = 0.0;
        for (double v : seed_d2) total += v;
        Eigen::Index pick;
        if (total <= 0.0) {
            pick = static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(n)));
        } else {
            const double u = rng.uniform() * total;
            double cum = 0.0;
            pick = n - 1;
            for (Eigen::Index i = 0; i < n; ++i) {
                cum += seed_d2[static_cast<std::size_t>(i)];
                if (cum >= u) {
                    pick = i;
                    break;
                }
            }
        }
        model.centroids.row(c) = codes.row(pick);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double v = (codes.row(i) - model.centroids.row(c)).squaredNorm();
            auto& cur = seed_d2[static_cast<std::size_t>(i)];
            if (v < cur) cur = v;
        }
    }

    std::vector<double> d2;
    for (int iter = 0; iter < kMaxIters; ++iter) {
        std::vector<int> labels = assign_all(codes, model.centroids, &d2);

        std::vector<Eigen::Index> counts(static_cast<std::size_t>(k), 0);
        for (int l : labels) ++counts[static_cast<std::size_t>(l)];
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) continue;
            // Empty cluster: reseed to the point farthest from its centroid.
            std::size_t far = 0;
            for (std::size_t i = 1; i < d2.size(); ++i) {
                if (d2[i] > d2[far]) far = i;
            }
            model.centroids.row(c) = codes.row(static_cast<Eigen::Index>(far));
            --counts[static_cast<std::size_t>(labels[far])];
            labels[far] = c;
            counts[static_cast<std::size_t>(c)] = 1;
            d2[far] = 0.0;
        }

        double inertia = 0.0;
        for (double v : d2) inertia += v;
        model.inertia_history.push_back(inertia);

        nn::Matrix next = nn::Matrix::Zero(k, d);
        for (Eigen::Index i = 0; i < n; ++i) {
            next.row(labels[static_cast<std::size_t>(i)]) += codes.row(i);
        }
        double movement = 0.0;
        for (int c = 0; c < k; ++c) {
            next.row(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);
            movement = std::max(movement, (next.row(c) - model.centroids.row(c)).norm());
        }
        model.centroids = next;
        if (movement < kMoveTol) break;
    }

    // Final pass so stored labels/inertia match the stored centroids.
    model.labels = assign_all(codes, model.centroids, &d2);
    model.inertia = 0.0;
    for (double v : d2) model.inertia += v;
    model.inertia_history.push_back(model.inertia);
    return model;
}

std::vector<int> assign(const ClusterModel& model, const nn::Matrix& codes) {
    if (codes.cols() != model.centroids.cols()) {
        throw std::invalid_argument("assign: dimension mismatch");
    }
    return assign_all(codes, model.centroids, nullptr);
}

void save(const ClusterModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    io::write_magic(out, kMagic);
    io::write_u64(out, kFormatVersion);
    io::write_string(out, model.model_id);
    io::write_u64(out, static_cast<std::uint64_t>(model.centroids.rows()));
    io::write_u64(out, static_cast<std::uint64_t>(model.centroids.cols()));
    for (Eigen::Index r = 0; r < model.centroids.rows(); ++r) {
        for (Eigen::Index c = 0; c < model.centroids.cols(); ++c) {
            io::write_f64(out, model.centroids(r, c));
        }
    }
    io::write_f64(out, model.inertia);
    io::write_u64(out, model.labels.size());
    for (int l : model.labels) io::write_u64(out, static_cast<std::uint64_t>(l));
    io::write_u64(out, model.inertia_history.size());
    for (double v : model.inertia_history) io::write_f64(out, v);
    if (!out) throw std::runtime_error("write failed: " + path);
}

ClusterModel load_clusters(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    io::expect_magic(in, kMagic, "cluster file");
    io::expect_version(in, kFormatVersion, "cluster file");
    ClusterModel model;
    model.model_id = io::read_string(in);
    const auto rows = static_cast<Eigen::Index>(io::read_u64(in));
    const auto cols = static_cast<Eigen::Index>(io::read_u64(in));
    model.centroids.resize(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) model.centroids(r, c) = io::read_f64(in);
    }
    model.inertia = io::read_f64(in);
    model.labels.resize(io::read_u64(in));
    for (int& l : model.labels) l = static_cast<int>(io::read_u64(in));
    model.inertia_history.resize(io::read_u64(in));
    for (double& v : model.inertia_history) v = io::read_f64(in);
    return model;
}

}  // namespace smpred::analysis
