#ifndef BIVIRUS_CONFIG_HPP
#define BIVIRUS_CONFIG_HPP

#include <cstdint>
#include <string>

namespace bivirus {

struct Tolerances {
    double eig_tol = 1e-10;
    double fp_tol = 1e-12;
    double eq_tol = 1e-10;

    bool operator==(const Tolerances&) const = default;
};

/// One canonical record of an experiment. JSON on disk; unknown keys are
/// rejected so stale configs fail loudly.
struct ExperimentConfig {
    std::string graph_a_path;
    std::string graph_b_path;
    double beta1 = 1.0;
    double delta1 = 1.0;
    double beta2 = 1.0;
    double delta2 = 1.0;
    double t_end = 100.0;
    double dt0 = 1e-2;
    double sample_every = 1.0;
    std::uint64_t seeds = 1;
    std::uint64_t rng_seed = 0;
    Tolerances tolerances;

    bool operator==(const ExperimentConfig&) const = default;
};

/// Parses and validates; throws ConfigError on unknown keys, wrong types
/// or out-of-range values.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config_file(const std::string& path);
std::string serialize_config(const ExperimentConfig& cfg);

/// Range checks shared by the parser and the CLI overrides.
void validate_config(const ExperimentConfig& cfg);

} // namespace bivirus

#endif
