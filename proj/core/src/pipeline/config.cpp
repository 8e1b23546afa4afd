#include "smpred/pipeline/config.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "smpred/environment.hpp"
#include "smpred/models/architecture.hpp"

namespace smpred::pipeline {

namespace {

using ordered_json = nlohmann::ordered_json;

std::uint64_t get_u64(const ordered_json& j, const std::string& field) {
    const auto& v = j.at(field);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return v.get<std::uint64_t>();
    throw ConfigError("config field '" + field + "' must be a non-negative integer");
}

int get_int(const ordered_json& j, const std::string& field) {
    const auto& v = j.at(field);
    if (!v.is_number_integer() && !v.is_number_unsigned()) {
        throw ConfigError("config field '" + field + "' must be an integer");
    }
    return v.get<int>();
}

double get_double(const ordered_json& j, const std::string& field) {
    const auto& v = j.at(field);
    if (!v.is_number()) throw ConfigError("config field '" + field + "' must be a number");
    return v.get<double>();
}

std::string get_string(const ordered_json& j, const std::string& field) {
    const auto& v = j.at(field);
    if (!v.is_string()) throw ConfigError("config field '" + field + "' must be a string");
    return v.get<std::string>();
}

std::vector<std::string> get_string_list(const ordered_json& j, const std::string& field) {
    const auto& v = j.at(field);
    if (!v.is_array()) throw ConfigError("config field '" + field + "' must be an array");
    std::vector<std::string> out;
    for (const auto& e : v) {
        if (!e.is_string()) {
            throw ConfigError("config field '" + field + "' must contain only strings");
        }
        out.push_back(e.get<std::string>());
    }
    return out;
}

}  // namespace

RunConfig desk_scale() {
    RunConfig c;
    c.steps = 100000;
    c.out_dir = "runs/desk";
    return c;
}

RunConfig full_scale() {
    RunConfig c;
    c.steps = 1000000;
    c.out_dir = "runs/full";
    return c;
}

RunConfig smoke_scale() {
    RunConfig c;
    c.steps = 2000;
    c.max_epochs = 15;
    c.out_dir = "runs/smoke";
    return c;
}

RunConfig scale_preset(const std::string& name) {
    if (name == "desk") return desk_scale();
    if (name == "full") return full_scale();
    if (name == "smoke") return smoke_scale();
    throw ConfigError("unknown scale preset '" + name + "' (expected desk, full or smoke)");
}

void validate(const RunConfig& config) {
    if (config.steps == 0) throw ConfigError("config field 'steps' must be positive");
    if (config.steps < 10) {
        throw ConfigError("config field 'steps' must be at least 10 for 80/10/10 splits");
    }
    if (config.environments.empty()) {
        throw ConfigError("config field 'environments' must not be empty");
    }
    for (const std::string& e : config.environments) {
        try {
            sim::Environment::from_layout(e);
        } catch (const std::exception&) {
            throw ConfigError("config field 'environments' has unknown layout '" + e + "'");
        }
    }
    bool found = false;
    for (const std::string& e : config.environments) found = found || e == config.train_environment;
    if (!found) {
        throw ConfigError("config field 'train_environment' ('" + config.train_environment +
                          "') must appear in 'environments'");
    }
    if (config.architectures.empty()) {
        throw ConfigError("config field 'architectures' must not be empty");
    }
    std::set<std::string> seen;
    bool any_recurrent = false;
    for (const std::string& a : config.architectures) {
        models::ArchKind kind;
        try {
            kind = models::arch_from_string(a);
        } catch (const std::exception& ex) {
            throw ConfigError(std::string("config field 'architectures': ") + ex.what());
        }
        if (!seen.insert(a).second) {
            throw ConfigError("config field 'architectures' has duplicate entry '" + a + "'");
        }
        any_recurrent = any_recurrent || models::canonical_spec(kind).is_recurrent();
    }
    if (any_recurrent) {
        const auto train_len = static_cast<std::size_t>(
            std::floor(0.8 * static_cast<double>(config.steps)));
        if (train_len < 20) {
            throw ConfigError(
                "config field 'steps' too small: recurrent training needs a train split of at "
                "least one 20-record window");
        }
    }
    if (config.seeds.init.empty()) {
        throw ConfigError("config field 'seeds.init' must list at least one replicate seed");
    }
    if (config.batch_size < 1) throw ConfigError("config field 'batch_size' must be positive");
    if (!(config.learning_rate > 0.0)) {
        throw ConfigError("config field 'learning_rate' must be positive");
    }
    if (config.max_epochs < 1) throw ConfigError("config field 'max_epochs' must be positive");
    if (config.patience < 1) throw ConfigError("config field 'patience' must be positive");
    if (!(config.min_rel_improvement >= 0.0) || config.min_rel_improvement >= 1.0) {
        throw ConfigError("config field 'min_rel_improvement' must be in [0, 1)");
    }
    if (config.kmeans_k < 1) throw ConfigError("config field 'kmeans_k' must be positive");
    if (config.samples_per_cluster < 1) {
        throw ConfigError("config field 'samples_per_cluster' must be positive");
    }
    if (config.workers < 1) throw ConfigError("config field 'workers' must be positive");
    if (config.out_dir.empty()) throw ConfigError("config field 'out_dir' must not be empty");
}

std::string config_to_json(const RunConfig& config) {
    ordered_json j;
    j["environments"] = config.environments;
    j["train_environment"] = config.train_environment;
    j["steps"] = config.steps;
    j["architectures"] = config.architectures;
    j["seeds"] = ordered_json{{"dataset", config.seeds.dataset},
                              {"init", config.seeds.init},
                              {"shuffle", config.seeds.shuffle},
                              {"sampling", config.seeds.sampling}};
    j["batch_size"] = config.batch_size;
    j["learning_rate"] = config.learning_rate;
    j["max_epochs"] = config.max_epochs;
    j["patience"] = config.patience;
    j["min_rel_improvement"] = config.min_rel_improvement;
    j["kmeans_k"] = config.kmeans_k;
    j["samples_per_cluster"] = config.samples_per_cluster;
    j["workers"] = config.workers;
    j["out_dir"] = config.out_dir;
    return j.dump(2) + "\n";
}

RunConfig config_from_json(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& ex) {
        throw ConfigError(std::string("config is not valid JSON: ") + ex.what());
    }
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");

    static const std::set<std::string> known = {
        "environments", "train_environment", "steps",    "architectures",
        "seeds",        "batch_size",        "learning_rate", "max_epochs",
        "patience",     "min_rel_improvement", "kmeans_k", "samples_per_cluster",
        "workers",      "out_dir"};
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!known.count(key)) throw ConfigError("unknown config field '" + key + "'");
    }

    RunConfig config;
    try {
        if (j.contains("environments")) config.environments = get_string_list(j, "environments");
        if (j.contains("train_environment")) {
            config.train_environment = get_string(j, "train_environment");
        }
        if (j.contains("steps")) config.steps = static_cast<std::size_t>(get_u64(j, "steps"));
        if (j.contains("architectures")) {
            config.architectures = get_string_list(j, "architectures");
        }
        if (j.contains("seeds")) {
            const auto& s = j.at("seeds");
            if (!s.is_object()) throw ConfigError("config field 'seeds' must be an object");
            static const std::set<std::string> seed_known = {"dataset", "init", "shuffle",
                                                             "sampling"};
            for (const auto& [key, value] : s.items()) {
                (void)value;
                if (!seed_known.count(key)) {
                    throw ConfigError("unknown config field 'seeds." + key + "'");
                }
            }
            if (s.contains("dataset")) config.seeds.dataset = get_u64(s, "dataset");
            if (s.contains("init")) {
                const auto& arr = s.at("init");
                if (!arr.is_array()) {
                    throw ConfigError("config field 'seeds.init' must be an array");
                }
                config.seeds.init.clear();
                for (const auto& e : arr) {
                    if (e.is_number_unsigned()) {
                        config.seeds.init.push_back(e.get<std::uint64_t>());
                    } else if (e.is_number_integer() && e.get<std::int64_t>() >= 0) {
                        config.seeds.init.push_back(e.get<std::uint64_t>());
                    } else {
                        throw ConfigError(
                            "config field 'seeds.init' must contain non-negative integers");
                    }
                }
            }
            if (s.contains("shuffle")) config.seeds.shuffle = get_u64(s, "shuffle");
            if (s.contains("sampling")) config.seeds.sampling = get_u64(s, "sampling");
        }
        if (j.contains("batch_size")) config.batch_size = get_int(j, "batch_size");
        if (j.contains("learning_rate")) config.learning_rate = get_double(j, "learning_rate");
        if (j.contains("max_epochs")) config.max_epochs = get_int(j, "max_epochs");
        if (j.contains("patience")) config.patience = get_int(j, "patience");
        if (j.contains("min_rel_improvement")) {
            config.min_rel_improvement = get_double(j, "min_rel_improvement");
        }
        if (j.contains("kmeans_k")) config.kmeans_k = get_int(j, "kmeans_k");
        if (j.contains("samples_per_cluster")) {
            config.samples_per_cluster =
                static_cast<std::size_t>(get_u64(j, "samples_per_cluster"));
        }
        if (j.contains("workers")) config.workers = get_int(j, "workers");
        if (j.contains("out_dir")) config.out_dir = get_string(j, "out_dir");
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& ex) {
        throw ConfigError(std::string("malformed config: ") + ex.what());
    }
    return config;
}

void save_config(const RunConfig& config, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << config_to_json(config);
    if (!out) throw std::runtime_error("write failed: " + path);
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return config_from_json(ss.str());
}

}  // namespace smpred::pipeline
