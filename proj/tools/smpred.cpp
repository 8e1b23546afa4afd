// Command-line front end for the sensorimotor prediction pipeline:
// dataset generation, model training/evaluation, representation analysis
// and the one-command reproduction run.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <string>

#include "smpred/analysis/kmeans.hpp"
#include "smpred/analysis/pca.hpp"
#include "smpred/analysis/reports.hpp"
#include "smpred/environment.hpp"
#include "smpred/models/checkpoint.hpp"
#include "smpred/models/train.hpp"
#include "smpred/pipeline/config.hpp"
#include "smpred/pipeline/experiment.hpp"
#include "smpred/trajectory.hpp"

namespace fs = std::filesystem;
using smpred::derive_seed;
using smpred::pipeline::ConfigError;

namespace {

void ensure_parent_dir(const std::string& path) {
    const fs::path parent = fs::path(path).parent_path();
    if (!parent.empty()) fs::create_directories(parent);
}

smpred::sim::Environment env_from_arg(const std::string& name) {
    try {
        return smpred::sim::Environment::from_layout(name);
    } catch (const std::exception& ex) {
        throw ConfigError(ex.what());
    }
}

smpred::models::ArchitectureSpec spec_from_arg(const std::string& arch) {
    try {
        return smpred::models::canonical_spec(smpred::models::arch_from_string(arch));
    } catch (const std::exception& ex) {
        throw ConfigError(ex.what());
    }
}

std::string resolve_checkpoint(const std::string& path) {
    if (fs::exists(path) && fs::is_regular_file(path)) return path;
    if (fs::exists(path + ".ckpt")) return path + ".ckpt";
    throw std::runtime_error("checkpoint not found: " + path);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sensorimotor prediction: simulator, models and analysis"};
    app.require_subcommand(1);

    // generate
    std::string gen_env = "square";
    std::size_t gen_steps = 100000;
    std::uint64_t gen_seed = 1;
    std::string gen_out;
    bool gen_csv = false;
    auto* gen = app.add_subcommand("generate", "Roll out the exploration policy into a dataset");
    gen->add_option("--env", gen_env, "Layout: square, rooms1 or rooms2");
    gen->add_option("--steps", gen_steps, "Trajectory length");
    gen->add_option("--seed", gen_seed, "Dataset seed");
    gen->add_option("--out", gen_out, "Output path (.smt; pose sidecar alongside)")->required();
    gen->add_flag("--csv", gen_csv, "Also export step and pose CSV files");

    // train
    std::string tr_arch, tr_data, tr_out;
    std::uint64_t tr_seed = 1;
    std::uint64_t tr_shuffle_seed = 0;
    bool tr_has_shuffle = false;
    int tr_batch = 64, tr_max_epochs = 500, tr_patience = 10;
    double tr_lr = 0.001, tr_min_rel = 0.05;
    bool tr_verbose = false;
    auto* tr = app.add_subcommand("train", "Train one architecture on a dataset");
    tr->add_option("--arch", tr_arch, "s, sm, recurrent-s or recurrent-sm")->required();
    tr->add_option("--data", tr_data, "Dataset (.smt)")->required();
    tr->add_option("--seed", tr_seed, "Parameter init seed");
    tr->add_option("--shuffle-seed", tr_shuffle_seed, "Batch shuffle seed (derived when absent)")
        ->each([&](const std::string&) { tr_has_shuffle = true; });
    tr->add_option("--batch", tr_batch, "Minibatch size");
    tr->add_option("--lr", tr_lr, "Adam learning rate");
    tr->add_option("--max-epochs", tr_max_epochs, "Epoch cap");
    tr->add_option("--patience", tr_patience, "Non-improving epochs before stopping");
    tr->add_option("--min-rel-improvement", tr_min_rel, "Relative improvement margin");
    tr->add_option("--out", tr_out, "Output prefix (.ckpt, .history.csv)")->required();
    tr->add_flag("--verbose", tr_verbose, "Per-epoch progress on stderr");

    // evaluate
    std::string ev_model, ev_data, ev_split = "test";
    auto* ev = app.add_subcommand("evaluate", "Prediction error of a checkpoint on a dataset");
    ev->add_option("--model", ev_model, "Checkpoint path (or prefix)")->required();
    ev->add_option("--data", ev_data, "Dataset (.smt)")->required();
    ev->add_option("--split", ev_split, "train, val, test or all");

    // represent
    std::string rp_model, rp_data, rp_out;
    auto* rp = app.add_subcommand("represent",
                                  "Encode a trajectory and export codes + 2D projection");
    rp->add_option("--model", rp_model, "Checkpoint path (or prefix)")->required();
    rp->add_option("--data", rp_data, "Dataset (.smt; pose sidecar required)")->required();
    rp->add_option("--out", rp_out, "Output directory")->required();

    // cluster
    std::string cl_reps;
    int cl_k = 20;
    std::uint64_t cl_seed = 1;
    std::size_t cl_samples = 500;
    auto* cl = app.add_subcommand("cluster", "Fit k-means on exported representations");
    cl->add_option("--reps", cl_reps, "Directory written by `represent`")->required();
    cl->add_option("--k", cl_k, "Cluster count");
    cl->add_option("--seed", cl_seed, "Sampling seed (seeding + report subsampling)");
    cl->add_option("--samples", cl_samples, "Report samples per cluster");

    // transfer
    std::string tf_encoder, tf_clusters, tf_data, tf_out;
    std::uint64_t tf_seed = 1;
    std::size_t tf_samples = 500;
    auto* tf = app.add_subcommand(
        "transfer", "Apply an encoder and its clusters to another environment's trajectory");
    tf->add_option("--encoder", tf_encoder, "Checkpoint path (or prefix)")->required();
    tf->add_option("--clusters", tf_clusters, "clusters.bin from `cluster`")->required();
    tf->add_option("--data", tf_data, "Dataset (.smt; pose sidecar required)")->required();
    tf->add_option("--out", tf_out, "Output directory")->required();
    tf->add_option("--seed", tf_seed, "Report sampling seed");
    tf->add_option("--samples", tf_samples, "Report samples per cluster");

    // repro
    std::string rr_scale = "desk", rr_config, rr_manifest, rr_out;
    int rr_workers = 0;
    std::uint64_t rr_seed_dataset = 0, rr_seed_shuffle = 0, rr_seed_sampling = 0;
    std::vector<std::uint64_t> rr_seed_init;
    auto* rr = app.add_subcommand("repro", "Run the full reproduction pipeline");
    rr->add_option("--scale", rr_scale, "Preset: desk, full or smoke");
    rr->add_option("--config", rr_config, "Config JSON (overrides --scale)");
    rr->add_option("--from-manifest", rr_manifest,
                   "Re-run a recorded experiment and verify byte-identical outputs");
    rr->add_option("--out", rr_out, "Override the output directory");
    rr->add_option("--workers", rr_workers, "Override parallel training slots");
    auto* rr_sd = rr->add_option("--seed-dataset", rr_seed_dataset, "Override the dataset seed");
    auto* rr_si = rr->add_option("--seed-init", rr_seed_init,
                                 "Override the per-replicate init seeds")->delimiter(',');
    auto* rr_ss = rr->add_option("--seed-shuffle", rr_seed_shuffle, "Override the shuffle seed");
    auto* rr_sp = rr->add_option("--seed-sampling", rr_seed_sampling,
                                 "Override the analysis sampling seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (gen->parsed()) {
            if (gen_steps < 10) throw ConfigError("--steps must be at least 10");
            const smpred::sim::Environment env = env_from_arg(gen_env);
            ensure_parent_dir(gen_out);
            const smpred::data::Trajectory traj =
                smpred::data::generate(env, gen_steps, gen_seed);
            smpred::data::save(traj, gen_out);
            if (gen_csv) {
                smpred::data::export_csv(traj.sequence, gen_out + ".csv");
                smpred::data::export_poses_csv(traj, gen_out + ".poses.csv");
            }
            std::cout << "wrote " << gen_out << " (" << traj.size() << " steps, env "
                      << env.name() << ", seed " << gen_seed << ")\n";
        } else if (tr->parsed()) {
            const auto spec = spec_from_arg(tr_arch);
            const auto seq = smpred::data::load_sequence(tr_data);
            const auto splits = smpred::data::split(seq);

            smpred::models::TrainConfig tc;
            tc.batch_size = tr_batch;
            tc.adam.lr = tr_lr;
            tc.max_epochs = tr_max_epochs;
            tc.patience = tr_patience;
            tc.min_rel_improvement = tr_min_rel;
            tc.init_seed = tr_seed;
            tc.shuffle_seed = tr_has_shuffle ? tr_shuffle_seed : derive_seed(tr_seed, "shuffle");
            if (tr_verbose) tc.log = &std::cerr;

            smpred::models::TrainedModel tm = smpred::models::train(spec, splits, tc);
            ensure_parent_dir(tr_out);
            smpred::models::save_checkpoint(tm.model, tm.meta(), tr_out + ".ckpt");
            smpred::models::save_history_csv(tm, tr_out + ".history.csv");
            std::cout << "best val " << tm.best_val << " at epoch " << tm.best_epoch << "/"
                      << tm.history.size() << "; wrote " << tr_out << ".ckpt\n";
        } else if (ev->parsed()) {
            auto loaded = smpred::models::load_checkpoint(resolve_checkpoint(ev_model));
            const auto seq = smpred::data::load_sequence(ev_data);
            const smpred::data::SensorimotorSequence* part = &seq;
            smpred::data::DatasetSplits splits;
            if (ev_split != "all") {
                splits = smpred::data::split(seq);
                if (ev_split == "train") part = &splits.train;
                else if (ev_split == "val") part = &splits.val;
                else if (ev_split == "test") part = &splits.test;
                else throw ConfigError("--split must be train, val, test or all");
            }
            const double err = smpred::models::evaluate(loaded.model, *part);
            std::cout << "arch=" << to_string(loaded.meta.kind) << " data=" << ev_data
                      << " split=" << ev_split << " error=" << err << "\n";
        } else if (rp->parsed()) {
            auto loaded = smpred::models::load_checkpoint(resolve_checkpoint(rp_model));
            const auto traj = smpred::data::load_trajectory(rp_data);
            const auto reps =
                smpred::models::encode(loaded.model, loaded.meta.model_id, traj);
            fs::create_directories(rp_out);
            smpred::analysis::save(reps, rp_out + "/representations.reps");
            const auto pca = smpred::analysis::pca_fit(reps.codes);
            smpred::analysis::write_projection_csv(
                smpred::analysis::pca_project(pca, reps.codes), reps.min_laser,
                rp_out + "/projection.csv");
            std::cout << "wrote " << rp_out << "/representations.reps (" << reps.size()
                      << " codes) and projection.csv\n";
        } else if (cl->parsed()) {
            if (cl_k < 1) throw ConfigError("--k must be positive");
            const auto reps =
                smpred::analysis::load_representations(cl_reps + "/representations.reps");
            auto clusters = smpred::analysis::kmeans_fit(reps.codes, cl_k, cl_seed);
            clusters.model_id = reps.model_id;
            smpred::analysis::save(clusters, cl_reps + "/clusters.bin");
            const auto rows = smpred::analysis::cluster_report(
                clusters, reps, cl_samples, derive_seed(cl_seed, "report"));
            smpred::analysis::write_cluster_report_csv(rows, cl_reps + "/report.csv");
            std::cout << "k=" << cl_k << " inertia=" << clusters.inertia << " iterations="
                      << clusters.inertia_history.size() << "; wrote " << cl_reps
                      << "/clusters.bin and report.csv\n";
        } else if (tf->parsed()) {
            auto loaded = smpred::models::load_checkpoint(resolve_checkpoint(tf_encoder));
            const auto clusters = smpred::analysis::load_clusters(tf_clusters);
            const auto traj = smpred::data::load_trajectory(tf_data);
            const auto reps =
                smpred::models::encode(loaded.model, loaded.meta.model_id, traj);
            const auto report = smpred::analysis::transfer(clusters, reps, tf_samples,
                                                           derive_seed(tf_seed, "transfer"));
            fs::create_directories(tf_out);
            const std::string env_name = traj.sequence.env_name;
            smpred::analysis::save(reps, tf_out + "/" + env_name + ".reps");
            smpred::analysis::write_cluster_report_csv(
                report.rows, tf_out + "/" + env_name + ".report.csv");
            std::cout << "labeled " << report.labels.size() << " points of " << env_name
                      << " with clusters from " << clusters.model_id << "; wrote " << tf_out
                      << "/" << env_name << ".report.csv\n";
        } else if (rr->parsed()) {
            if (!rr_manifest.empty()) {
                const auto report = smpred::pipeline::rerun_from_manifest(rr_manifest);
                if (report.identical) {
                    std::cout << "re-run byte-identical to manifest\n";
                    return 0;
                }
                for (const auto& f : report.missing) std::cout << "missing: " << f << "\n";
                for (const auto& f : report.mismatched) std::cout << "differs: " << f << "\n";
                return 1;
            }
            smpred::pipeline::RunConfig config = rr_config.empty()
                                                     ? smpred::pipeline::scale_preset(rr_scale)
                                                     : smpred::pipeline::load_config(rr_config);
            if (!rr_out.empty()) config.out_dir = rr_out;
            if (rr_workers > 0) config.workers = rr_workers;
            if (*rr_sd) config.seeds.dataset = rr_seed_dataset;
            if (*rr_si) config.seeds.init = rr_seed_init;
            if (*rr_ss) config.seeds.shuffle = rr_seed_shuffle;
            if (*rr_sp) config.seeds.sampling = rr_seed_sampling;
            const auto result = smpred::pipeline::run_experiment(config);
            std::cout << smpred::pipeline::format_eval_table(result);
            std::cout << "manifest: " << result.out_dir << "/manifest.json\n";
        }
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
