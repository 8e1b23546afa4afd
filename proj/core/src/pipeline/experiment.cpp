#include "smpred/pipeline/experiment.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "smpred/analysis/kmeans.hpp"
#include "smpred/analysis/pca.hpp"
#include "smpred/analysis/reports.hpp"
#include "smpred/environment.hpp"
#include "smpred/io/hash.hpp"
#include "smpred/models/train.hpp"
#include "smpred/trajectory.hpp"
#include "smpred/version.hpp"

namespace smpred::pipeline {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Runs jobs on `workers` threads (in order on the calling thread when
/// workers == 1); rethrows the first job exception.
void run_jobs(const std::vector<std::function<void()>>& jobs, int workers) {
    if (workers <= 1) {
        for (const auto& job : jobs) job();
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            try {
                jobs[i]();
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const int n = std::min<int>(workers, static_cast<int>(jobs.size()));
    pool.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

struct JobOutput {
    models::CheckpointMeta meta;
    std::map<std::string, double> errors;  // env -> error
    analysis::NothingPerceivedStats nothing;
    std::vector<analysis::ClusterGeometry> geometry;
    // transfer target env -> geometry over the transferred labels
    std::map<std::string, std::vector<analysis::ClusterGeometry>> transfer_geometry;
    std::vector<std::string> files;  // rel paths written by this job
};

ordered_json geometry_json(const std::vector<analysis::ClusterGeometry>& gs) {
    ordered_json arr = ordered_json::array();
    for (const auto& g : gs) {
        arr.push_back(ordered_json{{"cluster_id", g.cluster_id},
                                   {"members", g.member_count},
                                   {"corner_frac", g.corner_frac},
                                   {"corner_facing_frac", g.corner_facing_frac},
                                   {"wall_end_frac", g.wall_end_frac}});
    }
    return arr;
}

}  // namespace

double median(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("median of empty set");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

ExperimentResult run_experiment(const RunConfig& config) {
    validate(config);

    const fs::path out(config.out_dir);
    for (const char* sub : {"", "data", "models", "eval", "reps", "clusters", "transfers",
                            "analysis"}) {
        fs::create_directories(out / sub);
    }

    ExperimentResult result;
    result.out_dir = config.out_dir;
    result.architectures = config.architectures;
    result.environments = config.environments;

    std::vector<std::string> files;  // rel paths, hashed at the end
    save_config(config, (out / "config.json").string());
    files.push_back("config.json");

    // Datasets: one trajectory per environment, split 80/10/10.
    std::map<std::string, sim::Environment> envs;
    std::map<std::string, data::Trajectory> trajectories;
    std::map<std::string, data::DatasetSplits> splits;
    for (const std::string& name : config.environments) {
        sim::Environment env = sim::Environment::from_layout(name);
        data::Trajectory traj =
            data::generate(env, config.steps, derive_seed(config.seeds.dataset, "dataset-" + name));
        const std::string rel = "data/" + name + ".smt";
        data::save(traj, (out / rel).string());
        files.push_back(rel);
        files.push_back(rel + ".poses");
        splits[name] = data::split(traj.sequence);
        trajectories[name] = std::move(traj);
        envs.insert({name, std::move(env)});
    }

    // Training jobs: architecture x replicate, all on the train environment.
    const std::size_t replicates = config.seeds.init.size();
    std::vector<JobOutput> outputs(config.architectures.size() * replicates);
    std::vector<std::function<void()>> jobs;
    std::mutex log_mutex;

    for (std::size_t a = 0; a < config.architectures.size(); ++a) {
        for (std::size_t r = 0; r < replicates; ++r) {
            jobs.push_back([&, a, r] {
                const std::string& arch = config.architectures[a];
                const std::string tag = arch + "-r" + std::to_string(r);
                JobOutput& job = outputs[a * replicates + r];

                models::TrainConfig tc;
                tc.batch_size = config.batch_size;
                tc.adam.lr = config.learning_rate;
                tc.max_epochs = config.max_epochs;
                tc.patience = config.patience;
                tc.min_rel_improvement = config.min_rel_improvement;
                tc.init_seed = config.seeds.init[r];
                tc.shuffle_seed = derive_seed(config.seeds.shuffle, "shuffle-" + tag);

                models::TrainedModel tm =
                    models::train(models::canonical_spec(models::arch_from_string(arch)),
                                  splits.at(config.train_environment), tc);
                job.meta = tm.meta();

                const std::string ckpt = "models/" + tag + ".ckpt";
                models::save_checkpoint(tm.model, job.meta, (out / ckpt).string());
                job.files.push_back(ckpt);
                const std::string hist = "models/" + tag + ".history.csv";
                models::save_history_csv(tm, (out / hist).string());
                job.files.push_back(hist);

                for (const std::string& env_name : config.environments) {
                    job.errors[env_name] = models::evaluate(tm.model, splits.at(env_name).test);
                }

                // Representations, projection, clusters and the pose report
                // on the training environment.
                analysis::RepresentationSet reps = models::encode(
                    tm.model, tm.model_id, trajectories.at(config.train_environment));
                const std::string reps_rel =
                    "reps/" + tag + "." + config.train_environment + ".reps";
                analysis::save(reps, (out / reps_rel).string());
                job.files.push_back(reps_rel);

                const analysis::PcaModel pca = analysis::pca_fit(reps.codes);
                const std::string proj_rel =
                    "reps/" + tag + "." + config.train_environment + ".projection.csv";
                analysis::write_projection_csv(analysis::pca_project(pca, reps.codes),
                                               reps.min_laser, (out / proj_rel).string());
                job.files.push_back(proj_rel);

                analysis::ClusterModel clusters = analysis::kmeans_fit(
                    reps.codes, config.kmeans_k,
                    derive_seed(config.seeds.sampling, "kmeans-" + tag));
                clusters.model_id = tm.model_id;
                const std::string clu_rel =
                    "clusters/" + tag + "." + config.train_environment + ".clusters.bin";
                analysis::save(clusters, (out / clu_rel).string());
                job.files.push_back(clu_rel);

                const auto report_rows = analysis::cluster_report(
                    clusters, reps, config.samples_per_cluster,
                    derive_seed(config.seeds.sampling, "report-" + tag));
                const std::string report_rel =
                    "clusters/" + tag + "." + config.train_environment + ".report.csv";
                analysis::write_cluster_report_csv(report_rows, (out / report_rel).string());
                job.files.push_back(report_rel);

                job.nothing = analysis::nothing_perceived_stats(clusters, reps);
                job.geometry = analysis::cluster_geometry(envs.at(config.train_environment),
                                                          clusters, reps);

                // Cross-environment transfer for the paper's transfer model.
                if (arch == "recurrent-sm") {
                    for (const std::string& env_name : config.environments) {
                        if (env_name == config.train_environment) continue;
                        analysis::RepresentationSet reps_b = models::encode(
                            tm.model, tm.model_id, trajectories.at(env_name));
                        const std::string treps_rel =
                            "transfers/" + tag + "." + env_name + ".reps";
                        analysis::save(reps_b, (out / treps_rel).string());
                        job.files.push_back(treps_rel);

                        const analysis::TransferReport tr = analysis::transfer(
                            clusters, reps_b, config.samples_per_cluster,
                            derive_seed(config.seeds.sampling,
                                        "transfer-" + tag + "-" + env_name));
                        const std::string trep_rel =
                            "transfers/" + tag + "." + env_name + ".report.csv";
                        analysis::write_cluster_report_csv(tr.rows, (out / trep_rel).string());
                        job.files.push_back(trep_rel);

                        job.transfer_geometry[env_name] =
                            analysis::cluster_geometry(envs.at(env_name), clusters, reps_b);
                    }
                }

                {
                    std::lock_guard<std::mutex> lock(log_mutex);
                    std::cerr << "[run] " << tag << ": best val " << job.meta.best_val
                              << " at epoch " << job.meta.best_epoch << "/" << job.meta.epochs_run
                              << "\n";
                }
            });
        }
    }
    run_jobs(jobs, config.workers);

    for (const JobOutput& job : outputs) {
        files.insert(files.end(), job.files.begin(), job.files.end());
    }

    // Evaluation tables: one row per replicate, then the Table-I medians.
    {
        std::ofstream raw((out / "eval/raw.csv").string(), std::ios::trunc);
        raw << "arch,replicate,init_seed,env,error\n";
        for (std::size_t a = 0; a < config.architectures.size(); ++a) {
            const std::string& arch = config.architectures[a];
            for (std::size_t r = 0; r < replicates; ++r) {
                const JobOutput& job = outputs[a * replicates + r];
                for (const std::string& env_name : config.environments) {
                    raw << arch << ',' << r << ',' << config.seeds.init[r] << ',' << env_name
                        << ',' << g17(job.errors.at(env_name)) << '\n';
                    result.replicate_error[arch][env_name].push_back(job.errors.at(env_name));
                }
            }
        }
        if (!raw) throw std::runtime_error("write failed: eval/raw.csv");
        files.push_back("eval/raw.csv");

        std::ofstream table((out / "eval/table.csv").string(), std::ios::trunc);
        table << "arch";
        for (const std::string& env_name : config.environments) table << ',' << env_name;
        table << '\n';
        for (const std::string& arch : config.architectures) {
            table << arch;
            for (const std::string& env_name : config.environments) {
                const double med = median(result.replicate_error[arch][env_name]);
                result.median_error[arch][env_name] = med;
                table << ',' << g17(med);
            }
            table << '\n';
        }
        if (!table) throw std::runtime_error("write failed: eval/table.csv");
        files.push_back("eval/table.csv");
    }

    // Analysis summary for human inspection.
    {
        ordered_json summary;
        summary["train_environment"] = config.train_environment;
        ordered_json models_json = ordered_json::object();
        for (std::size_t a = 0; a < config.architectures.size(); ++a) {
            for (std::size_t r = 0; r < replicates; ++r) {
                const JobOutput& job = outputs[a * replicates + r];
                const std::string tag =
                    config.architectures[a] + "-r" + std::to_string(r);
                ordered_json m;
                m["model_id"] = job.meta.model_id;
                m["best_epoch"] = job.meta.best_epoch;
                m["epochs_run"] = job.meta.epochs_run;
                m["best_val"] = job.meta.best_val;
                ordered_json errs = ordered_json::object();
                for (const std::string& env_name : config.environments) {
                    errs[env_name] = job.errors.at(env_name);
                }
                m["test_error"] = errs;
                m["nothing_perceived"] =
                    ordered_json{{"records", job.nothing.record_count},
                                 {"clusters_hit", job.nothing.clusters_hit},
                                 {"dominant_share", job.nothing.dominant_share}};
                m["clusters"] = geometry_json(job.geometry);
                if (!job.transfer_geometry.empty()) {
                    ordered_json tj = ordered_json::object();
                    for (const auto& [env_name, geom] : job.transfer_geometry) {
                        tj[env_name] = geometry_json(geom);
                    }
                    m["transfer_clusters"] = tj;
                }
                models_json[tag] = m;
            }
        }
        summary["models"] = models_json;
        std::ofstream sf((out / "analysis/summary.json").string(), std::ios::trunc);
        sf << summary.dump(2) << '\n';
        if (!sf) throw std::runtime_error("write failed: analysis/summary.json");
        files.push_back("analysis/summary.json");
    }

    std::sort(files.begin(), files.end());
    for (const std::string& rel : files) {
        result.file_hashes[rel] = io::hash_hex(io::fnv1a_file((out / rel).string()));
    }
    write_manifest(config, result.file_hashes, (out / "manifest.json").string());
    return result;
}

std::string format_eval_table(const ExperimentResult& result) {
    std::ostringstream os;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%-14s", "arch");
    os << buf;
    for (const std::string& env_name : result.environments) {
        std::snprintf(buf, sizeof(buf), "%12s", env_name.c_str());
        os << buf;
    }
    os << '\n';
    for (const std::string& arch : result.architectures) {
        std::snprintf(buf, sizeof(buf), "%-14s", arch.c_str());
        os << buf;
        for (const std::string& env_name : result.environments) {
            std::snprintf(buf, sizeof(buf), "%12.6g", result.median_error.at(arch).at(env_name));
            os << buf;
        }
        os << '\n';
    }
    return os.str();
}

void write_manifest(const RunConfig& config, const std::map<std::string, std::string>& file_hashes,
                    const std::string& path) {
    ordered_json j;
    j["format"] = "smpred-manifest";
    j["manifest_version"] = 1;
    j["tool_version"] = kVersionString;
    j["config"] = ordered_json::parse(config_to_json(config));
    ordered_json fj = ordered_json::object();
    for (const auto& [rel, hash] : file_hashes) fj[rel] = hash;
    j["files"] = fj;
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::pair<RunConfig, std::map<std::string, std::string>> read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open manifest: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    ordered_json j;
    try {
        j = ordered_json::parse(ss.str());
    } catch (const std::exception& ex) {
        throw std::runtime_error(std::string("manifest is not valid JSON: ") + ex.what());
    }
    if (!j.contains("format") || j["format"] != "smpred-manifest") {
        throw std::runtime_error("not a manifest file: " + path);
    }
    RunConfig config = config_from_json(j.at("config").dump());
    std::map<std::string, std::string> hashes;
    for (const auto& [rel, hash] : j.at("files").items()) {
        hashes[rel] = hash.get<std::string>();
    }
    return {config, hashes};
}

RerunReport rerun_from_manifest(const std::string& manifest_path) {
    auto [config, expected] = read_manifest(manifest_path);
    ExperimentResult result = run_experiment(config);
    RerunReport report;
    report.identical = true;
    for (const auto& [rel, hash] : expected) {
        auto it = result.file_hashes.find(rel);
        if (it == result.file_hashes.end()) {
            report.missing.push_back(rel);
            report.identical = false;
        } else if (it->second != hash) {
            report.mismatched.push_back(rel);
            report.identical = false;
        }
    }
    return report;
}

}  // namespace smpred::pipeline
