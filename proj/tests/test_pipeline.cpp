#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "smpred/pipeline/config.hpp"
#include "smpred/pipeline/experiment.hpp"
#include "smpred/rng.hpp"

using namespace smpred;
using namespace smpred::pipeline;
namespace fs = std::filesystem;

namespace {

// Small but complete run: two environments, two architectures, one
// replicate, a few hundred steps. Exercises every pipeline stage fast.
RunConfig mini_config(const std::string& out_dir) {
    RunConfig cfg;
    cfg.environments = {"square", "rooms1"};
    cfg.train_environment = "square";
    cfg.steps = 400;
    cfg.architectures = {"s", "recurrent-sm"};
    cfg.seeds.init = {1};
    cfg.max_epochs = 2;
    cfg.kmeans_k = 4;
    cfg.samples_per_cluster = 50;
    cfg.out_dir = out_dir;
    return cfg;
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("derive_seed: stable, label-sensitive, seed-sensitive") {
    CHECK(derive_seed(1, "dataset") == derive_seed(1, "dataset"));
    CHECK(derive_seed(1, "dataset") != derive_seed(1, "shuffle"));
    CHECK(derive_seed(1, "dataset") != derive_seed(2, "dataset"));
}

TEST_CASE("config json round trip is lossless") {
    RunConfig cfg = desk_scale();
    cfg.environments = {"rooms2", "square"};
    cfg.train_environment = "rooms2";
    cfg.steps = 12345;
    cfg.architectures = {"recurrent-sm", "s"};
    cfg.seeds.dataset = 9;
    cfg.seeds.init = {4, 5, 6, 7};
    cfg.seeds.shuffle = 11;
    cfg.seeds.sampling = 13;
    cfg.batch_size = 32;
    cfg.learning_rate = 0.0005;
    cfg.max_epochs = 77;
    cfg.patience = 4;
    cfg.min_rel_improvement = 0.02;
    cfg.kmeans_k = 10;
    cfg.samples_per_cluster = 123;
    cfg.workers = 2;
    cfg.out_dir = "runs/custom";

    const auto back = config_from_json(config_to_json(cfg));
    CHECK(back.environments == cfg.environments);
    CHECK(back.train_environment == cfg.train_environment);
    CHECK(back.steps == cfg.steps);
    CHECK(back.architectures == cfg.architectures);
    CHECK(back.seeds.dataset == cfg.seeds.dataset);
    CHECK(back.seeds.init == cfg.seeds.init);
    CHECK(back.seeds.shuffle == cfg.seeds.shuffle);
    CHECK(back.seeds.sampling == cfg.seeds.sampling);
    CHECK(back.batch_size == cfg.batch_size);
    CHECK(back.learning_rate == cfg.learning_rate);
    CHECK(back.max_epochs == cfg.max_epochs);
    CHECK(back.patience == cfg.patience);
    CHECK(back.min_rel_improvement == cfg.min_rel_improvement);
    CHECK(back.kmeans_k == cfg.kmeans_k);
    CHECK(back.samples_per_cluster == cfg.samples_per_cluster);
    CHECK(back.workers == cfg.workers);
    CHECK(back.out_dir == cfg.out_dir);
}

TEST_CASE("missing config fields keep their defaults") {
    const auto cfg = config_from_json(R"({"steps": 5000})");
    CHECK(cfg.steps == 5000);
    CHECK(cfg.environments == RunConfig{}.environments);
    CHECK(cfg.batch_size == 64);
}

TEST_CASE("unknown config fields are rejected with the field name") {
    CHECK_THROWS_WITH_AS(config_from_json(R"({"stepz": 5000})"),
                         doctest::Contains("stepz"), ConfigError);
    CHECK_THROWS_WITH_AS(config_from_json(R"({"seeds": {"dataest": 3}})"),
                         doctest::Contains("dataest"), ConfigError);
}

TEST_CASE("validation names the offending field") {
    auto cfg = smoke_scale();
    cfg.steps = 0;
    CHECK_THROWS_WITH_AS(validate(cfg), doctest::Contains("steps"), ConfigError);

    cfg = smoke_scale();
    cfg.train_environment = "rooms9";
    CHECK_THROWS_WITH_AS(validate(cfg), doctest::Contains("train_environment"), ConfigError);

    cfg = smoke_scale();
    cfg.architectures = {"s", "s"};
    CHECK_THROWS_WITH_AS(validate(cfg), doctest::Contains("architectures"), ConfigError);

    cfg = smoke_scale();
    cfg.seeds.init.clear();
    CHECK_THROWS_WITH_AS(validate(cfg), doctest::Contains("seeds.init"), ConfigError);

    cfg = smoke_scale();
    cfg.kmeans_k = 0;
    CHECK_THROWS_WITH_AS(validate(cfg), doctest::Contains("kmeans_k"), ConfigError);

    cfg = smoke_scale();
    cfg.steps = 24;  // floor(0.8*24) = 19 < one recurrent window
    CHECK_THROWS_WITH_AS(validate(cfg), doctest::Contains("steps"), ConfigError);
}

TEST_CASE("scale presets") {
    CHECK(desk_scale().steps == 100000);
    CHECK(full_scale().steps == 1000000);
    CHECK(smoke_scale().steps < desk_scale().steps);
    CHECK_NOTHROW(validate(desk_scale()));
    CHECK_NOTHROW(validate(full_scale()));
    CHECK_NOTHROW(validate(smoke_scale()));
    CHECK_THROWS_AS(scale_preset("galactic"), ConfigError);
}

TEST_CASE("invalid config leaves no partial outputs") {
    const auto dir = fresh_dir("smpred_pipe_invalid");
    auto cfg = mini_config(dir.string());
    cfg.steps = 0;
    CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
    CHECK_FALSE(fs::exists(dir));
}

TEST_CASE("mini experiment produces the documented artifact tree") {
    const auto dir = fresh_dir("smpred_pipe_mini");
    const auto cfg = mini_config(dir.string());
    const auto result = run_experiment(cfg);

    CHECK(fs::exists(dir / "config.json"));
    CHECK(fs::exists(dir / "manifest.json"));
    CHECK(fs::exists(dir / "data/square.smt"));
    CHECK(fs::exists(dir / "data/square.smt.poses"));
    CHECK(fs::exists(dir / "data/rooms1.smt"));
    CHECK(fs::exists(dir / "models/s-r0.ckpt"));
    CHECK(fs::exists(dir / "models/recurrent-sm-r0.ckpt"));
    CHECK(fs::exists(dir / "models/recurrent-sm-r0.history.csv"));
    CHECK(fs::exists(dir / "eval/raw.csv"));
    CHECK(fs::exists(dir / "eval/table.csv"));
    CHECK(fs::exists(dir / "reps/recurrent-sm-r0.square.reps"));
    CHECK(fs::exists(dir / "reps/recurrent-sm-r0.square.projection.csv"));
    CHECK(fs::exists(dir / "clusters/recurrent-sm-r0.square.clusters.bin"));
    CHECK(fs::exists(dir / "clusters/recurrent-sm-r0.square.report.csv"));
    CHECK(fs::exists(dir / "transfers/recurrent-sm-r0.rooms1.reps"));
    CHECK(fs::exists(dir / "transfers/recurrent-sm-r0.rooms1.report.csv"));
    CHECK(fs::exists(dir / "analysis/summary.json"));

    // The in-memory table covers arch x env and medians match replicates.
    for (const auto& arch : cfg.architectures)
        for (const auto& env : cfg.environments) {
            REQUIRE(result.median_error.count(arch));
            REQUIRE(result.median_error.at(arch).count(env));
            const auto& reps = result.replicate_error.at(arch).at(env);
            CHECK(reps.size() == cfg.seeds.init.size());
            CHECK(result.median_error.at(arch).at(env) ==
                  median(std::vector<double>(reps)));
        }

    // Every output file is reachable from the manifest.
    const auto [mcfg, hashes] = read_manifest((dir / "manifest.json").string());
    CHECK(mcfg.steps == cfg.steps);
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const auto rel = fs::relative(entry.path(), dir).generic_string();
        if (rel == "manifest.json") continue;
        CHECK(hashes.count(rel) == 1);
    }

    fs::remove_all(dir);
}

TEST_CASE("identical configs produce identical manifests; reruns verify") {
    const auto dir = fresh_dir("smpred_pipe_det");
    const auto cfg = mini_config(dir.string());

    const auto res_a = run_experiment(cfg);
    const auto hashes_a = res_a.file_hashes;
    fs::remove_all(dir);
    const auto res_b = run_experiment(cfg);
    REQUIRE(hashes_a.size() == res_b.file_hashes.size());
    for (const auto& [file, hash] : hashes_a) {
        REQUIRE(res_b.file_hashes.count(file) == 1);
        CHECK(res_b.file_hashes.at(file) == hash);
    }

    // Re-running from the manifest (out_dir intact) reports byte-identity.
    const auto report = rerun_from_manifest((dir / "manifest.json").string());
    CHECK(report.identical);
    CHECK(report.mismatched.empty());
    CHECK(report.missing.empty());

    fs::remove_all(dir);
}

TEST_CASE("median helper") {
    CHECK(median({3.0}) == 3.0);
    CHECK(median({5.0, 1.0, 3.0}) == 3.0);
    CHECK(median({4.0, 1.0, 3.0, 2.0}) == 2.5);
}

TEST_CASE("format_eval_table lists architectures by row") {
    const auto dir = fresh_dir("smpred_pipe_table");
    auto cfg = mini_config(dir.string());
    cfg.environments = {"square"};
    const auto result = run_experiment(cfg);
    const auto table = format_eval_table(result);
    CHECK(table.find("arch") != std::string::npos);
    CHECK(table.find("square") != std::string::npos);
    CHECK(table.find("recurrent-sm") != std::string::npos);
    fs::remove_all(dir);
}
