#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "smpred/pipeline/config.hpp"

namespace smpred::pipeline {

/// Everything run_experiment produced, plus the evaluation numbers in
/// memory for printing and tests. File hashes are FNV-1a 64 of the bytes,
/// keyed by path relative to out_dir.
struct ExperimentResult {
    std::string out_dir;
    std::vector<std::string> architectures;  // config order
    std::vector<std::string> environments;   // config order
    // arch -> env -> error, median over replicates
    std::map<std::string, std::map<std::string, double>> median_error;
    // arch -> env -> one error per replicate (seeds.init order)
    std::map<std::string, std::map<std::string, std::vector<double>>> replicate_error;
    std::map<std::string, std::string> file_hashes;
};

/// Full pipeline: datasets for every environment, all architecture x
/// replicate trainings on the train environment, the evaluation table over
/// every environment's test split, representation/cluster/transfer exports,
/// and a manifest sufficient to re-run the experiment bit-identically.
ExperimentResult run_experiment(const RunConfig& config);

/// Evaluation medians rendered as a fixed-width text table
/// (architectures x environments).
std::string format_eval_table(const ExperimentResult& result);

double median(std::vector<double> values);

void write_manifest(const RunConfig& config,
                    const std::map<std::string, std::string>& file_hashes,
                    const std::string& path);
std::pair<RunConfig, std::map<std::string, std::string>> read_manifest(const std::string& path);

/// Re-runs the experiment recorded in a manifest and compares every listed
/// file hash against the fresh outputs.
struct RerunReport {
    bool identical = false;
    std::vector<std::string> mismatched;  // hash differs
    std::vector<std::string> missing;     // listed in manifest, not reproduced
};
RerunReport rerun_from_manifest(const std::string& manifest_path);

}  // namespace smpred::pipeline
