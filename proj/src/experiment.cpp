#include "bivirus/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "bivirus/errors.hpp"
#include "bivirus/log.hpp"
#include "bivirus/spectral.hpp"

namespace bivirus {

using nlohmann::json;

namespace {

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json state_json(const BiVirusState& s) {
    return json{{"x", s.x}, {"y", s.y}};
}

const char* stability_name(StabilityVerdict v) {
    switch (v) {
        case StabilityVerdict::Stable: return "stable";
        case StabilityVerdict::Unstable: return "unstable";
        case StabilityVerdict::Marginal: return "marginal";
    }
    return "?";
}

void write_file(const std::filesystem::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open '" + path.string() + "' for writing");
    out << body;
    if (!out) throw ConfigError("short write to '" + path.string() + "'");
}

} // namespace

std::string regime_report_json(const RegimeReport& rep) {
    json j;
    j["t1_lambda_a"] = rep.t1_lam_a;
    j["t2_lambda_b"] = rep.t2_lam_b;
    j["t1_lambda_sya"] = rep.t1_lam_sya;
    j["t2_lambda_sxb"] = rep.t2_lam_sxb;
    j["region"] = to_string(rep.region);
    j["predicted"] = to_string(rep.predicted);
    j["boundary"] = rep.boundary;
    j["x_star"] = rep.x_star;
    j["y_star"] = rep.y_star;
    return j.dump(2);
}

std::string equilibrium_set_json(const EquilibriumSet& set) {
    json pts = json::array();
    for (const EquilibriumPoint& p : set.points) {
        json e = state_json(p.state);
        e["residual"] = p.residual;
        e["stability"] = stability_name(p.stability);
        e["seeds"] = p.seeds;
        pts.push_back(std::move(e));
    }
    json fails = json::array();
    for (const SeedFailure& f : set.failures)
        fails.push_back({{"seed", f.seed_index}, {"reason", f.reason}});
    json j;
    j["points"] = std::move(pts);
    j["failures"] = std::move(fails);
    j["cluster_tolerance"] = set.cluster_tolerance;
    j["rng_seed"] = set.rng_seed;
    j["generator"] = set.generator;
    return j.dump(2);
}

std::string trajectory_avg_csv(const Trajectory& t) {
    std::string out = "t,avgX,avgY\n";
    for (std::size_t i = 0; i < t.times.size(); ++i) {
        const auto [ax, ay] = avg_projection(t.states[i]);
        out += fmt17(t.times[i]);
        out += ',';
        out += fmt17(ax);
        out += ',';
        out += fmt17(ay);
        out += '\n';
    }
    return out;
}

std::string trajectory_full_csv(const Trajectory& t) {
    const std::size_t n = t.states.empty() ? 0 : t.states.front().size();
    std::string out = "t";
    for (std::size_t i = 0; i < n; ++i) out += ",x_" + std::to_string(i);
    for (std::size_t i = 0; i < n; ++i) out += ",y_" + std::to_string(i);
    out += '\n';
    for (std::size_t k = 0; k < t.times.size(); ++k) {
        out += fmt17(t.times[k]);
        for (double v : t.states[k].x) {
            out += ',';
            out += fmt17(v);
        }
        for (double v : t.states[k].y) {
            out += ',';
            out += fmt17(v);
        }
        out += '\n';
    }
    return out;
}

std::string sweep_csv(const std::vector<SweepCell>& cells) {
    std::string out = "tau1,tau2,region,predicted,verified\n";
    for (const SweepCell& c : cells) {
        out += fmt17(c.tau1);
        out += ',';
        out += fmt17(c.tau2);
        out += ',';
        if (c.report) {
            out += to_string(c.report->region);
            out += ',';
            out += to_string(c.report->predicted);
        } else {
            out += "error,error";
        }
        out += ',';
        switch (c.verified) {
            case VerifyStatus::NotRun: out += "-"; break;
            case VerifyStatus::Match: out += "match"; break;
            case VerifyStatus::Mismatch: out += "mismatch"; break;
            case VerifyStatus::Failed: out += "failed"; break;
        }
        out += '\n';
    }
    return out;
}

ExperimentOutput run_experiment(const ExperimentConfig& cfg) {
    validate_config(cfg);
    if (cfg.graph_a_path.empty() || cfg.graph_b_path.empty())
        throw ConfigError("graph_a and graph_b paths are required");

    const Graph a = load_edge_list_file(cfg.graph_a_path);
    const Graph b = load_edge_list_file(cfg.graph_b_path);
    const VirusParams p1(cfg.beta1, cfg.delta1);
    const VirusParams p2(cfg.beta2, cfg.delta2);

    ExperimentOutput out;
    out.config = cfg;

    ClassifyOptions copt;
    copt.eig_tol = cfg.tolerances.eig_tol;
    copt.fp_tol = cfg.tolerances.fp_tol;
    out.regime = classify(p1, p2, a, b, copt);
    log::info("classified as " + to_string(out.regime.region) + " / " +
              to_string(out.regime.predicted));

    const std::size_t n = a.node_count();
    const std::size_t k = static_cast<std::size_t>(cfg.seeds);
    out.trajectories.resize(k);
    std::vector<std::string> errors(k);

#pragma omp parallel for schedule(dynamic)
    for (long s = 0; s < static_cast<long>(k); ++s) {
        try {
            const BiVirusState s0 = sample_initial_state(n, cfg.rng_seed, s);
            IntegrateOptions io;
            io.t_end = cfg.t_end;
            io.dt0 = cfg.dt0;
            io.sample_every = cfg.sample_every;
            out.trajectories[s] = {static_cast<std::uint64_t>(s),
                                   integrate(s0, p1, p2, a, b, io)};
        } catch (const std::exception& e) {
            errors[s] = e.what();
        }
    }

    // refine endpoints into the equilibrium set, seed order
    EquilibriumSet set;
    set.cluster_tolerance = 1e-6;
    set.rng_seed = cfg.rng_seed;
    set.generator = "mt19937_64/splitmix64";
    for (std::size_t s = 0; s < k; ++s) {
        if (!errors[s].empty()) {
            set.failures.push_back({s, errors[s]});
            continue;
        }
        try {
            auto [eq, res] =
                find_equilibrium(out.trajectories[s].second, p1, p2, a, b, cfg.tolerances.eq_tol);
            bool merged = false;
            for (EquilibriumPoint& pt : set.points) {
                double dist = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    dist = std::max(dist, std::fabs(pt.state.x[i] - eq.x[i]));
                    dist = std::max(dist, std::fabs(pt.state.y[i] - eq.y[i]));
                }
                if (dist <= set.cluster_tolerance) {
                    pt.seeds.push_back(s);
                    pt.residual = std::min(pt.residual, res);
                    merged = true;
                    break;
                }
            }
            if (!merged) {
                EquilibriumPoint pt;
                pt.state = std::move(eq);
                pt.residual = res;
                pt.seeds = {s};
                set.points.push_back(std::move(pt));
            }
        } catch (const std::exception& e) {
            set.failures.push_back({s, e.what()});
        }
    }
    for (EquilibriumPoint& pt : set.points) {
        try {
            pt.stability =
                stability_at(pt.state, p1, p2, a, b, std::max(1e-8, 10.0 * cfg.tolerances.eq_tol));
        } catch (const std::exception& e) {
            set.failures.push_back({pt.seeds.front(),
                                    std::string("stability classification failed: ") + e.what()});
        }
    }
    out.equilibria = std::move(set);
    return out;
}

std::vector<std::string> emit_outputs(const ExperimentOutput& out, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);

    std::vector<std::string> written;
    auto emit = [&](const std::string& name, const std::string& body) {
        write_file(fs::path(dir) / name, body);
        written.push_back(name);
    };

    emit("regime.json", regime_report_json(out.regime));
    for (const auto& [seed, traj] : out.trajectories)
        emit("trajectory_" + std::to_string(seed) + ".csv", trajectory_avg_csv(traj));
    emit("equilibria.json", equilibrium_set_json(out.equilibria));

    json manifest;
    manifest["tool"] = "bivirus";
    manifest["version"] = kToolVersion;
    manifest["rng_seed"] = out.config.rng_seed;
    manifest["generator"] = out.equilibria.generator;
    manifest["config"] = json::parse(serialize_config(out.config));
    emit("manifest.json", manifest.dump(2));
    return written;
}

} // namespace bivirus
