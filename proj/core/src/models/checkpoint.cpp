#include "smpred/models/checkpoint.hpp"

#include <fstream>

#include "smpred/io/binary.hpp"

namespace smpred::models {

namespace {

constexpr char kMagic[9] = "SMPRDCKP";
constexpr std::uint64_t kFormatVersion = 1;

CheckpointMeta read_meta(std::istream& in) {
    io::expect_magic(in, kMagic, "checkpoint");
    io::expect_version(in, kFormatVersion, "checkpoint");
    CheckpointMeta meta;
    meta.kind = arch_from_string(io::read_string(in));
    meta.model_id = io::read_string(in);
    meta.env_name = io::read_string(in);
    meta.dataset_seed = io::read_u64(in);
    meta.init_seed = io::read_u64(in);
    meta.shuffle_seed = io::read_u64(in);
    meta.best_epoch = io::read_u64(in);
    meta.epochs_run = io::read_u64(in);
    meta.best_val = io::read_f64(in);
    return meta;
}

}  // namespace

void save_checkpoint(SensorimotorModel& model, const CheckpointMeta& meta,
                     const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    io::write_magic(out, kMagic);
    io::write_u64(out, kFormatVersion);
    io::write_string(out, to_string(meta.kind));
    io::write_string(out, meta.model_id);
    io::write_string(out, meta.env_name);
    io::write_u64(out, meta.dataset_seed);
    io::write_u64(out, meta.init_seed);
    io::write_u64(out, meta.shuffle_seed);
    io::write_u64(out, meta.best_epoch);
    io::write_u64(out, meta.epochs_run);
    io::write_f64(out, meta.best_val);

    std::vector<nn::TensorView> params = model.parameters();
    io::write_u64(out, params.size());
    for (const nn::TensorView& p : params) {
        io::write_string(out, p.name);
        io::write_u64(out, static_cast<std::uint64_t>(p.value->rows()));
        io::write_u64(out, static_cast<std::uint64_t>(p.value->cols()));
        const double* data = p.value->data();
        for (Eigen::Index i = 0; i < p.value->size(); ++i) io::write_f64(out, data[i]);
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

LoadedModel load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    CheckpointMeta meta = read_meta(in);

    LoadedModel loaded{SensorimotorModel(canonical_spec(meta.kind)), meta};
    std::vector<nn::TensorView> params = loaded.model.parameters();
    const std::uint64_t count = io::read_u64(in);
    if (count != params.size()) {
        throw io::FormatError("checkpoint: expected " + std::to_string(params.size()) +
                              " tensors, file has " + std::to_string(count));
    }
    for (nn::TensorView& p : params) {
        const std::string name = io::read_string(in);
        if (name != p.name) {
            throw io::FormatError("checkpoint: tensor '" + name + "' where '" + p.name +
                                  "' was expected");
        }
        const auto rows = static_cast<Eigen::Index>(io::read_u64(in));
        const auto cols = static_cast<Eigen::Index>(io::read_u64(in));
        if (rows != p.value->rows() || cols != p.value->cols()) {
            throw io::FormatError("checkpoint: tensor '" + name + "' has shape " +
                                  std::to_string(rows) + "x" + std::to_string(cols) +
                                  ", expected " + std::to_string(p.value->rows()) + "x" +
                                  std::to_string(p.value->cols()));
        }
        double* data = p.value->data();
        for (Eigen::Index i = 0; i < p.value->size(); ++i) data[i] = io::read_f64(in);
    }
    return loaded;
}

CheckpointMeta read_checkpoint_meta(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    return read_meta(in);
}

}  // namespace smpred::models
