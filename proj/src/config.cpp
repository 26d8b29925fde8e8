#include "bivirus/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "bivirus/errors.hpp"

namespace bivirus {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, value] : j.items())
        if (!allowed.count(key))
            throw ConfigError("unknown key '" + key + "' in " + where);
}

template <typename T>
void get_if_present(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
    }
}

} // namespace

void validate_config(const ExperimentConfig& cfg) {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0)) throw ConfigError(std::string(name) + " must be positive");
    };
    positive(cfg.beta1, "beta1");
    positive(cfg.delta1, "delta1");
    positive(cfg.beta2, "beta2");
    positive(cfg.delta2, "delta2");
    positive(cfg.t_end, "t_end");
    positive(cfg.dt0, "dt0");
    positive(cfg.sample_every, "sample_every");
    positive(cfg.tolerances.eig_tol, "tolerances.eig_tol");
    positive(cfg.tolerances.fp_tol, "tolerances.fp_tol");
    positive(cfg.tolerances.eq_tol, "tolerances.eq_tol");
    if (cfg.seeds < 1) throw ConfigError("seeds must be at least 1");
}

ExperimentConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config root must be an object");

    check_keys(j,
               {"graph_a", "graph_b", "beta1", "delta1", "beta2", "delta2", "t_end", "dt0",
                "sample_every", "seeds", "rng_seed", "tolerances"},
               "config");

    ExperimentConfig cfg;
    get_if_present(j, "graph_a", cfg.graph_a_path);
    get_if_present(j, "graph_b", cfg.graph_b_path);
    get_if_present(j, "beta1", cfg.beta1);
    get_if_present(j, "delta1", cfg.delta1);
    get_if_present(j, "beta2", cfg.beta2);
    get_if_present(j, "delta2", cfg.delta2);
    get_if_present(j, "t_end", cfg.t_end);
    get_if_present(j, "dt0", cfg.dt0);
    get_if_present(j, "sample_every", cfg.sample_every);
    get_if_present(j, "seeds", cfg.seeds);
    get_if_present(j, "rng_seed", cfg.rng_seed);
    if (j.contains("tolerances")) {
        const json& t = j.at("tolerances");
        if (!t.is_object()) throw ConfigError("tolerances must be an object");
        check_keys(t, {"eig_tol", "fp_tol", "eq_tol"}, "tolerances");
        get_if_present(t, "eig_tol", cfg.tolerances.eig_tol);
        get_if_present(t, "fp_tol", cfg.tolerances.fp_tol);
        get_if_present(t, "eq_tol", cfg.tolerances.eq_tol);
    }
    validate_config(cfg);
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
    json j;
    j["graph_a"] = cfg.graph_a_path;
    j["graph_b"] = cfg.graph_b_path;
    j["beta1"] = cfg.beta1;
    j["delta1"] = cfg.delta1;
    j["beta2"] = cfg.beta2;
    j["delta2"] = cfg.delta2;
    j["t_end"] = cfg.t_end;
    j["dt0"] = cfg.dt0;
    j["sample_every"] = cfg.sample_every;
    j["seeds"] = cfg.seeds;
    j["rng_seed"] = cfg.rng_seed;
    j["tolerances"] = {{"eig_tol", cfg.tolerances.eig_tol},
                       {"fp_tol", cfg.tolerances.fp_tol},
                       {"eq_tol", cfg.tolerances.eq_tol}};
    return j.dump(2);
}

} // namespace bivirus
