#ifndef BIVIRUS_EXPERIMENT_HPP
#define BIVIRUS_EXPERIMENT_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bivirus/config.hpp"
#include "bivirus/dynamics.hpp"
#include "bivirus/regimes.hpp"

namespace bivirus {

inline constexpr const char* kToolVersion = "0.1.0";

struct ExperimentOutput {
    ExperimentConfig config;
    RegimeReport regime;
    std::vector<std::pair<std::uint64_t, Trajectory>> trajectories;  // seed index -> samples
    EquilibriumSet equilibria;
};

/// Full multi-seed protocol: classify, integrate every seed from a
/// deterministic initial state, refine the endpoints into an equilibrium
/// set. Identical config (and thread-count-independent kernels) means
/// bit-identical output.
ExperimentOutput run_experiment(const ExperimentConfig& cfg);

/// Writes regime.json, trajectory_<seed>.csv (header "t,avgX,avgY"),
/// equilibria.json and manifest.json into dir. Numbers carry 17
/// significant digits.
std::vector<std::string> emit_outputs(const ExperimentOutput& out, const std::string& dir);

// JSON bodies shared with the CLI subcommands
std::string regime_report_json(const RegimeReport& rep);
std::string equilibrium_set_json(const EquilibriumSet& set);

/// CSV with header "t,avgX,avgY", one row per sample, full precision.
std::string trajectory_avg_csv(const Trajectory& t);

/// CSV with header "t,x_0..x_{N-1},y_0..y_{N-1}".
std::string trajectory_full_csv(const Trajectory& t);

std::string sweep_csv(const std::vector<SweepCell>& cells);

} // namespace bivirus

#endif
