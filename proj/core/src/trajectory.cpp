#include "smpred/trajectory.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "smpred/geometry.hpp"
#include "smpred/io/binary.hpp"

namespace smpred::data {

namespace {

constexpr char kSeqMagic[9] = "SMPRDSMT";
constexpr char kPoseMagic[9] = "SMPRDPOS";
constexpr std::uint64_t kFormatVersion = 1;

Pose sample_start_pose(const sim::Environment& env, Rng& rng) {
    const double size = env.size();
    for (int attempt = 0; attempt < 100000; ++attempt) {
        const double x = rng.uniform(0.0, size);
        const double y = rng.uniform(0.0, size);
        const sim::Vec2 p{x, y};
        if (!env.in_free_space(p)) continue;
        if (env.distance_to_nearest_wall(p) < 1.0) continue;
        const double theta = rng.uniform(-sim::kPi, sim::kPi);
        return Pose{x, y, theta};
    }
    throw sim::SimulationError("could not sample a start pose with unit wall clearance in '" +
                               env.name() + "'");
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    return in;
}

}  // namespace

Trajectory generate(const sim::Environment& env, std::size_t steps, std::uint64_t seed) {
    Rng rng(seed);
    Trajectory traj;
    traj.sequence.env_name = env.name();
    traj.sequence.seed = seed;
    traj.sequence.steps.reserve(steps);
    traj.poses.reserve(steps);

    Pose pose = sample_start_pose(env, rng);
    for (std::size_t t = 0; t < steps; ++t) {
        const SensorReading s = sim::sense(env, pose);
        const MotorCommand m = sim::behavior_step(s, rng);
        traj.sequence.steps.push_back(SensorimotorStep{s, m});
        traj.poses.push_back(pose);
        pose = sim::apply_motor(env, pose, m);
    }
    return traj;
}

std::pair<std::size_t, std::size_t> split_indices(std::size_t total) {
    if (total < 10) {
        throw std::invalid_argument("split requires at least 10 steps, got " +
                                    std::to_string(total));
    }
    const auto t0 = static_cast<std::size_t>(std::floor(0.8 * static_cast<double>(total)));
    const auto t1 = static_cast<std::size_t>(std::floor(0.9 * static_cast<double>(total)));
    return {t0, t1};
}

DatasetSplits split(const SensorimotorSequence& seq) {
    const auto [t0, t1] = split_indices(seq.size());
    DatasetSplits out;
    for (auto* part : {&out.train, &out.val, &out.test}) {
        part->env_name = seq.env_name;
        part->seed = seq.seed;
    }
    out.train.steps.assign(seq.steps.begin(), seq.steps.begin() + static_cast<long>(t0));
    out.val.steps.assign(seq.steps.begin() + static_cast<long>(t0),
                         seq.steps.begin() + static_cast<long>(t1));
    out.test.steps.assign(seq.steps.begin() + static_cast<long>(t1), seq.steps.end());
    return out;
}

TrajectorySplits split(const Trajectory& traj) {
    if (traj.poses.size() != traj.sequence.size()) {
        throw std::invalid_argument("trajectory poses out of sync with sequence");
    }
    const auto [t0, t1] = split_indices(traj.size());
    TrajectorySplits out;
    DatasetSplits seqs = split(traj.sequence);
    out.train.sequence = std::move(seqs.train);
    out.val.sequence = std::move(seqs.val);
    out.test.sequence = std::move(seqs.test);
    out.train.poses.assign(traj.poses.begin(), traj.poses.begin() + static_cast<long>(t0));
    out.val.poses.assign(traj.poses.begin() + static_cast<long>(t0),
                         traj.poses.begin() + static_cast<long>(t1));
    out.test.poses.assign(traj.poses.begin() + static_cast<long>(t1), traj.poses.end());
    return out;
}

void save(const Trajectory& traj, const std::string& path) {
    if (traj.poses.size() != traj.sequence.size()) {
        throw std::invalid_argument("trajectory poses out of sync with sequence");
    }
    {
        std::ofstream out = open_out(path);
        io::write_magic(out, kSeqMagic);
        io::write_u64(out, kFormatVersion);
        io::write_string(out, traj.sequence.env_name);
        io::write_u64(out, traj.sequence.seed);
        io::write_u64(out, traj.sequence.size());
        for (const SensorimotorStep& st : traj.sequence.steps) {
            for (double s : st.sensors) io::write_f64(out, s);
            io::write_f64(out, st.motor.d);
            io::write_f64(out, st.motor.r);
        }
        if (!out) throw std::runtime_error("write failed: " + path);
    }
    {
        std::ofstream out = open_out(path + ".poses");
        io::write_magic(out, kPoseMagic);
        io::write_u64(out, kFormatVersion);
        io::write_string(out, traj.sequence.env_name);
        io::write_u64(out, traj.sequence.seed);
        io::write_u64(out, traj.poses.size());
        for (const Pose& p : traj.poses) {
            io::write_f64(out, p.x);
            io::write_f64(out, p.y);
            io::write_f64(out, p.theta);
        }
        if (!out) throw std::runtime_error("write failed: " + path + ".poses");
    }
}

SensorimotorSequence load_sequence(const std::string& path) {
    std::ifstream in = open_in(path);
    io::expect_magic(in, kSeqMagic, "sequence file");
    io::expect_version(in, kFormatVersion, "sequence file");
    SensorimotorSequence seq;
    seq.env_name = io::read_string(in);
    seq.seed = io::read_u64(in);
    const std::uint64_t n = io::read_u64(in);
    seq.steps.resize(n);
    for (std::uint64_t t = 0; t < n; ++t) {
        SensorimotorStep& st = seq.steps[t];
        for (double& s : st.sensors) s = io::read_f64(in);
        st.motor.d = io::read_f64(in);
        st.motor.r = io::read_f64(in);
    }
    return seq;
}

std::vector<Pose> load_poses(const std::string& path) {
    std::ifstream in = open_in(path + ".poses");
    io::expect_magic(in, kPoseMagic, "pose sidecar");
    io::expect_version(in, kFormatVersion, "pose sidecar");
    io::read_string(in);  // env name
    io::read_u64(in);     // seed
    const std::uint64_t n = io::read_u64(in);
    std::vector<Pose> poses(n);
    for (std::uint64_t t = 0; t < n; ++t) {
        poses[t].x = io::read_f64(in);
        poses[t].y = io::read_f64(in);
        poses[t].theta = io::read_f64(in);
    }
    return poses;
}

Trajectory load_trajectory(const std::string& path) {
    Trajectory traj;
    traj.sequence = load_sequence(path);

    std::ifstream in = open_in(path + ".poses");
    io::expect_magic(in, kPoseMagic, "pose sidecar");
    io::expect_version(in, kFormatVersion, "pose sidecar");
    const std::string env_name = io::read_string(in);
    const std::uint64_t seed = io::read_u64(in);
    const std::uint64_t n = io::read_u64(in);
    if (env_name != traj.sequence.env_name || seed != traj.sequence.seed ||
        n != traj.sequence.size()) {
        throw io::FormatError("pose sidecar does not match sequence: " + path);
    }
    traj.poses.resize(n);
    for (std::uint64_t t = 0; t < n; ++t) {
        traj.poses[t].x = io::read_f64(in);
        traj.poses[t].y = io::read_f64(in);
        traj.poses[t].theta = io::read_f64(in);
    }
    return traj;
}

namespace {

void write_g17(std::ofstream& out, double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf;
}

}  // namespace

void export_csv(const SensorimotorSequence& seq, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "step,s0,s1,s2,s3,s4,d,r\n";
    for (std::size_t t = 0; t < seq.size(); ++t) {
        out << t;
        for (double s : seq.steps[t].sensors) {
            out << ',';
            write_g17(out, s);
        }
        out << ',';
        write_g17(out, seq.steps[t].motor.d);
        out << ',';
        write_g17(out, seq.steps[t].motor.r);
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

void export_poses_csv(const Trajectory& traj, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "step,x,y,theta\n";
    for (std::size_t t = 0; t < traj.poses.size(); ++t) {
        out << t << ',';
        write_g17(out, traj.poses[t].x);
        out << ',';
        write_g17(out, traj.poses[t].y);
        out << ',';
        write_g17(out, traj.poses[t].theta);
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

SensorimotorSequence normalize(const SensorimotorSequence& seq) {
    SensorimotorSequence out = seq;
    for (std::size_t t = 0; t < out.size(); ++t) {
        SensorimotorStep& st = out.steps[t];
        for (double& s : st.sensors) {
            if (s < 0.0 || s > sim::kSensorRange) {
                throw std::invalid_argument("sensor value out of range at step " +
                                            std::to_string(t));
            }
            s /= sim::kSensorRange;
        }
        if (st.motor.d < 0.0 || st.motor.d > 1.0) {
            throw std::invalid_argument("displacement out of range at step " + std::to_string(t));
        }
        if (st.motor.r < -sim::kPi || st.motor.r > sim::kPi) {
            throw std::invalid_argument("rotation out of range at step " + std::to_string(t));
        }
        st.motor.r /= sim::kPi;
    }
    return out;
}

SensorimotorSequence denormalize(const SensorimotorSequence& seq) {
    SensorimotorSequence out = seq;
    for (std::size_t t = 0; t < out.size(); ++t) {
        SensorimotorStep& st = out.steps[t];
        for (double& s : st.sensors) {
            if (s < 0.0 || s > 1.0) {
                throw std::invalid_argument("normalized sensor out of range at step " +
                                            std::to_string(t));
            }
            s *= sim::kSensorRange;
        }
        if (st.motor.d < 0.0 || st.motor.d > 1.0) {
            throw std::invalid_argument("displacement out of range at step " + std::to_string(t));
        }
        if (st.motor.r < -1.0 || st.motor.r > 1.0) {
            throw std::invalid_argument("normalized rotation out of range at step " +
                                        std::to_string(t));
        }
        st.motor.r *= sim::kPi;
    }
    return out;
}

}  // namespace smpred::data
