#include "smpred/analysis/representation.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "smpred/io/binary.hpp"

namespace smpred::analysis {

namespace {
constexpr char kMagic[9] = "SMPRDREP";
constexpr std::uint64_t kFormatVersion = 1;
}  // namespace

void RepresentationSet::validate() const {
    const auto n = static_cast<std::size_t>(codes.rows());
    if (poses.size() != n || min_laser.size() != n) {
        throw std::invalid_argument("representation set: row counts disagree");
    }
    if (!codes.allFinite()) {
        throw std::invalid_argument("representation set: non-finite codes");
    }
}

void save(const RepresentationSet& reps, const std::string& path) {
    reps.validate();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    io::write_magic(out, kMagic);
    io::write_u64(out, kFormatVersion);
    io::write_string(out, reps.env_name);
    io::write_string(out, reps.model_id);
    io::write_u64(out, static_cast<std::uint64_t>(reps.codes.rows()));
    io::write_u64(out, static_cast<std::uint64_t>(reps.codes.cols()));
    for (Eigen::Index r = 0; r < reps.codes.rows(); ++r) {
        for (Eigen::Index c = 0; c < reps.codes.cols(); ++c) io::write_f64(out, reps.codes(r, c));
    }
    for (const sim::Pose& p : reps.poses) {
        io::write_f64(out, p.x);
        io::write_f64(out, p.y);
        io::write_f64(out, p.theta);
    }
    for (double v : reps.min_laser) io::write_f64(out, v);
    if (!out) throw std::runtime_error("write failed: " + path);
}

RepresentationSet load_representations(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    io::expect_magic(in, kMagic, "representation file");
    io::expect_version(in, kFormatVersion, "representation file");
    RepresentationSet reps;
    reps.env_name = io::read_string(in);
    reps.model_id = io::read_string(in);
    const auto rows = static_cast<Eigen::Index>(io::read_u64(in));
    const auto cols = static_cast<Eigen::Index>(io::read_u64(in));
    reps.codes.resize(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) reps.codes(r, c) = io::read_f64(in);
    }
    reps.poses.resize(static_cast<std::size_t>(rows));
    for (sim::Pose& p : reps.poses) {
        p.x = io::read_f64(in);
        p.y = io::read_f64(in);
        p.theta = io::read_f64(in);
    }
    reps.min_laser.resize(static_cast<std::size_t>(rows));
    for (double& v : reps.min_laser) v = io::read_f64(in);
    reps.validate();
    return reps;
}

std::vector<double> min_laser_coloring(const data::Trajectory& traj) {
    std::vector<double> out;
    out.reserve(traj.size());
    for (const data::SensorimotorStep& st : traj.sequence.steps) {
        out.push_back(*std::min_element(st.sensors.begin(), st.sensors.end()));
    }
    return out;
}

}  // namespace smpred::analysis
