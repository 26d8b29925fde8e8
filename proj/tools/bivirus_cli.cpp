// Command-line front end: validate | spectral | sis | simulate | classify |
// sweep | equilibria | monotone-test. Data goes to stdout or --out; all
// diagnostics go to stderr (BIVIRUS_LOG controls verbosity). Any error
// exits nonzero.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bivirus/config.hpp"
#include "bivirus/dynamics.hpp"
#include "bivirus/errors.hpp"
#include "bivirus/experiment.hpp"
#include "bivirus/graph.hpp"
#include "bivirus/log.hpp"
#include "bivirus/ordering.hpp"
#include "bivirus/regimes.hpp"
#include "bivirus/sis.hpp"
#include "bivirus/spectral.hpp"

namespace {

using namespace bivirus;

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_or_print(const std::string& out_dir, const std::string& filename,
                    const std::string& body) {
    if (out_dir.empty()) {
        std::cout << body;
        return;
    }
    std::filesystem::create_directories(out_dir);
    const auto path = std::filesystem::path(out_dir) / filename;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open '" + path.string() + "' for writing");
    f << body;
    log::info("wrote " + path.string());
}

std::vector<double> read_vector_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open vector file '" + path + "'");
    std::vector<double> vals;
    std::string tok;
    while (std::getline(in, tok)) {
        std::replace(tok.begin(), tok.end(), ',', ' ');
        std::istringstream ls(tok);
        double v;
        while (ls >> v) vals.push_back(v);
    }
    return vals;
}

// Parses "min:max:steps" into a uniform grid.
std::vector<double> parse_grid(const std::string& spec) {
    double lo = 0.0, hi = 0.0;
    long steps = 0;
    char c1 = 0, c2 = 0;
    std::istringstream ss(spec);
    if (!(ss >> lo >> c1 >> hi >> c2 >> steps) || c1 != ':' || c2 != ':' || steps < 1)
        throw ConfigError("bad grid spec '" + spec + "'; expected min:max:steps");
    std::vector<double> grid(static_cast<std::size_t>(steps));
    if (steps == 1) {
        grid[0] = lo;
        return grid;
    }
    for (long k = 0; k < steps; ++k)
        grid[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(steps - 1);
    return grid;
}

// Config assembly shared by the model-driven subcommands: --config gives
// the base record, explicit flags override it.
struct ModelArgs {
    std::string config_path;
    ExperimentConfig cfg;

    void add_common(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "experiment config file (JSON)");
        cmd->add_option("--graph-a", cfg.graph_a_path, "edge list for Virus 1's graph");
        cmd->add_option("--graph-b", cfg.graph_b_path, "edge list for Virus 2's graph");
        cmd->add_option("--beta1", cfg.beta1, "Virus 1 infection rate");
        cmd->add_option("--delta1", cfg.delta1, "Virus 1 recovery rate");
        cmd->add_option("--beta2", cfg.beta2, "Virus 2 infection rate");
        cmd->add_option("--delta2", cfg.delta2, "Virus 2 recovery rate");
        cmd->add_option("--rng-seed", cfg.rng_seed, "seed for initial-state sampling");
        cmd->add_option("--tol", cfg.tolerances.eq_tol, "equilibrium residual tolerance");
    }

    ExperimentConfig resolve(const CLI::App* cmd) const {
        ExperimentConfig merged = cfg;
        if (!config_path.empty()) {
            merged = load_config_file(config_path);
            auto override_if = [&](const char* flag, auto member) {
                if (cmd->count(flag)) merged.*member = cfg.*member;
            };
            override_if("--graph-a", &ExperimentConfig::graph_a_path);
            override_if("--graph-b", &ExperimentConfig::graph_b_path);
            override_if("--beta1", &ExperimentConfig::beta1);
            override_if("--delta1", &ExperimentConfig::delta1);
            override_if("--beta2", &ExperimentConfig::beta2);
            override_if("--delta2", &ExperimentConfig::delta2);
            override_if("--rng-seed", &ExperimentConfig::rng_seed);
            if (cmd->count("--tol")) merged.tolerances.eq_tol = cfg.tolerances.eq_tol;
            if (cmd->get_option_no_throw("--t-end") && cmd->count("--t-end"))
                merged.t_end = cfg.t_end;
            if (cmd->get_option_no_throw("--dt0") && cmd->count("--dt0")) merged.dt0 = cfg.dt0;
            if (cmd->get_option_no_throw("--sample-every") && cmd->count("--sample-every"))
                merged.sample_every = cfg.sample_every;
            if (cmd->get_option_no_throw("--seeds") && cmd->count("--seeds"))
                merged.seeds = cfg.seeds;
        }
        validate_config(merged);
        if (merged.graph_a_path.empty() || merged.graph_b_path.empty())
            throw ConfigError("--graph-a and --graph-b (or a config providing them) are required");
        return merged;
    }
};

int cmd_validate(const std::string& graph_path) {
    const Graph g = load_edge_list_file(graph_path);
    const DegreeStats st = degree_stats(g);
    std::cout << "nodes " << g.node_count() << '\n'
              << "edges " << g.edge_count() << '\n'
              << "d_min " << fmt17(st.d_min) << '\n'
              << "d_max " << fmt17(st.d_max) << '\n'
              << "connected yes\n";
    return 0;
}

int cmd_spectral(const std::string& graph_path, const std::string& scale_path, double tol) {
    const Graph g = load_edge_list_file(graph_path);
    const EigenPair p = pf_eigenpair(g.adjacency(), tol);
    std::cout << "lambda " << fmt17(p.value) << '\n';
    std::cout << "residual " << fmt17(p.residual) << '\n';
    std::cout << "node,pf_vector\n";
    for (std::size_t i = 0; i < p.vector.size(); ++i)
        std::cout << g.label(i) << ',' << fmt17(p.vector[i]) << '\n';
    if (!scale_path.empty()) {
        const std::vector<double> s = read_vector_file(scale_path);
        std::cout << "lambda_scaled " << fmt17(scaled_spectral(s, g, tol)) << '\n';
    }
    return 0;
}

int cmd_sis(const std::string& graph_path, double beta, double delta, double tol) {
    const Graph g = load_edge_list_file(graph_path);
    const VirusParams p(beta, delta);
    const DichotomyVerdict v = sis_threshold(p, g);
    const SisFixedPoint fp = sis_fixed_point(p, g, tol);
    std::cout << "threshold_product " << fmt17(v.threshold_product) << '\n'
              << "verdict " << (v.regime == SisRegime::VirusFree ? "virus_free" : "endemic")
              << '\n'
              << "residual " << fmt17(fp.residual) << '\n'
              << "node,x_star\n";
    for (std::size_t i = 0; i < fp.x_star.size(); ++i)
        std::cout << g.label(i) << ',' << fmt17(fp.x_star[i]) << '\n';
    return 0;
}

BiVirusState resolve_initial_state(const std::string& x0_spec, const std::string& y0_spec,
                                   std::size_t n) {
    auto is_uniform = [](const std::string& s) { return s.rfind("uniform:", 0) == 0; };
    auto uniform_seed = [](const std::string& s) {
        return static_cast<std::uint64_t>(std::stoull(s.substr(8)));
    };

    BiVirusState s0 = BiVirusState::zero(n);
    if (is_uniform(x0_spec) || is_uniform(y0_spec)) {
        const std::string& u = is_uniform(x0_spec) ? x0_spec : y0_spec;
        s0 = sample_initial_state(n, uniform_seed(u), 0);
        if (!x0_spec.empty() && !is_uniform(x0_spec)) s0.x = read_vector_file(x0_spec);
        if (!y0_spec.empty() && !is_uniform(y0_spec)) s0.y = read_vector_file(y0_spec);
    } else {
        if (!x0_spec.empty()) s0.x = read_vector_file(x0_spec);
        if (!y0_spec.empty()) s0.y = read_vector_file(y0_spec);
    }
    if (s0.x.size() != n || s0.y.size() != n)
        throw ConfigError("initial state length does not match the graph's node count");
    if (!in_state_space(s0, 0.0))
        throw StateOutOfDError("initial state violates x,y >= 0, x+y <= 1");
    return s0;
}

int cmd_simulate(const ExperimentConfig& cfg, const std::string& x0_spec,
                 const std::string& y0_spec, const std::string& full_state_path,
                 const std::string& out_dir) {
    if (x0_spec.empty() && y0_spec.empty()) {
        // multi-seed experiment protocol
        if (out_dir.empty())
            throw ConfigError(
                "simulate without --x0/--y0 runs the full experiment and needs --out");
        const ExperimentOutput out = run_experiment(cfg);
        emit_outputs(out, out_dir);
        return 0;
    }

    const Graph a = load_edge_list_file(cfg.graph_a_path);
    const Graph b = load_edge_list_file(cfg.graph_b_path);
    const VirusParams p1(cfg.beta1, cfg.delta1);
    const VirusParams p2(cfg.beta2, cfg.delta2);
    const BiVirusState s0 = resolve_initial_state(x0_spec, y0_spec, a.node_count());

    IntegrateOptions io;
    io.t_end = cfg.t_end;
    io.dt0 = cfg.dt0;
    io.sample_every = cfg.sample_every;
    const Trajectory traj = integrate(s0, p1, p2, a, b, io);

    write_or_print(out_dir, "trajectory.csv", trajectory_avg_csv(traj));
    if (!full_state_path.empty()) {
        std::ofstream f(full_state_path, std::ios::binary);
        if (!f) throw ConfigError("cannot open '" + full_state_path + "' for writing");
        f << trajectory_full_csv(traj);
    }
    return 0;
}

int cmd_classify(const ExperimentConfig& cfg, const std::string& out_dir) {
    const Graph a = load_edge_list_file(cfg.graph_a_path);
    const Graph b = load_edge_list_file(cfg.graph_b_path);
    ClassifyOptions copt;
    copt.eig_tol = cfg.tolerances.eig_tol;
    copt.fp_tol = cfg.tolerances.fp_tol;
    const RegimeReport rep = classify(VirusParams(cfg.beta1, cfg.delta1),
                                      VirusParams(cfg.beta2, cfg.delta2), a, b, copt);
    write_or_print(out_dir, "regime.json", regime_report_json(rep) + "\n");
    return 0;
}

int cmd_equilibria(const ExperimentConfig& cfg, const std::string& out_dir) {
    const Graph a = load_edge_list_file(cfg.graph_a_path);
    const Graph b = load_edge_list_file(cfg.graph_b_path);
    MultiStartOptions ms;
    ms.n_seeds = cfg.seeds;
    ms.rng_seed = cfg.rng_seed;
    ms.newton_tol = cfg.tolerances.eq_tol;
    const EquilibriumSet set = multi_start_equilibria(
        VirusParams(cfg.beta1, cfg.delta1), VirusParams(cfg.beta2, cfg.delta2), a, b, ms);
    write_or_print(out_dir, "equilibria.json", equilibrium_set_json(set) + "\n");
    return 0;
}

int cmd_sweep(const ExperimentConfig& cfg, const std::string& tau1_spec,
              const std::string& tau2_spec, bool verify, const std::string& out_dir) {
    const Graph a = load_edge_list_file(cfg.graph_a_path);
    const Graph b = load_edge_list_file(cfg.graph_b_path);
    SweepOptions opt;
    opt.verify = verify;
    opt.rng_seed = cfg.rng_seed;
    opt.classify_opt.eig_tol = cfg.tolerances.eig_tol;
    opt.classify_opt.fp_tol = cfg.tolerances.fp_tol;
    const std::vector<SweepCell> cells =
        sweep(a, b, parse_grid(tau1_spec), parse_grid(tau2_spec), opt);
    write_or_print(out_dir, "sweep.csv", sweep_csv(cells));
    return 0;
}

int cmd_monotone_test(const ExperimentConfig& cfg, std::uint64_t pairs, double t_end) {
    const Graph a = load_edge_list_file(cfg.graph_a_path);
    const Graph b = load_edge_list_file(cfg.graph_b_path);
    const VirusParams p1(cfg.beta1, cfg.delta1);
    const VirusParams p2(cfg.beta2, cfg.delta2);

    std::vector<double> sample_times;
    for (int k = 1; k <= 8; ++k) sample_times.push_back(t_end * k / 8.0);

    std::cout << "pair,pass,min_strict_margin,max_leq_violation\n";
    bool all_pass = true;
    double worst_margin = std::numeric_limits<double>::infinity();
    double worst_violation = -std::numeric_limits<double>::infinity();
    for (std::uint64_t k = 0; k < pairs; ++k) {
        const auto [lo, hi] = sample_ordered_interior_pair(a.node_count(), cfg.rng_seed, k);
        const TrialResult r = monotonicity_trial(lo, hi, p1, p2, a, b, sample_times);
        all_pass = all_pass && r.pass;
        worst_margin = std::min(worst_margin, r.min_strict_margin);
        worst_violation = std::max(worst_violation, r.max_leq_violation);
        std::cout << k << ',' << (r.pass ? "pass" : "FAIL") << ','
                  << fmt17(r.min_strict_margin) << ',' << fmt17(r.max_leq_violation) << '\n';
    }
    std::cout << "worst_margin " << fmt17(worst_margin) << '\n'
              << "worst_violation " << fmt17(worst_violation) << '\n'
              << (all_pass ? "PASS" : "FAIL") << '\n';
    return all_pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"bi-virus epidemic laboratory"};
    app.require_subcommand(1);

    std::string out_dir;
    app.add_option("--out", out_dir, "output directory");

    // validate
    auto* c_validate = app.add_subcommand("validate", "check an edge-list file");
    std::string v_graph;
    c_validate->add_option("--graph", v_graph, "edge list path")->required();

    // spectral
    auto* c_spectral = app.add_subcommand("spectral", "PF eigenpair of a graph");
    std::string s_graph, s_scale;
    double s_tol = 1e-10;
    c_spectral->add_option("--graph", s_graph)->required();
    c_spectral->add_option("--scale", s_scale, "scale file, one value per line");
    c_spectral->add_option("--tol", s_tol);

    // sis
    auto* c_sis = app.add_subcommand("sis", "single-virus threshold and fixed point");
    std::string i_graph;
    double i_beta = 1.0, i_delta = 1.0, i_tol = 1e-12;
    c_sis->add_option("--graph", i_graph)->required();
    c_sis->add_option("--beta", i_beta)->required();
    c_sis->add_option("--delta", i_delta)->required();
    c_sis->add_option("--tol", i_tol);

    // simulate
    auto* c_sim = app.add_subcommand("simulate", "integrate trajectories / run the experiment");
    ModelArgs sim_args;
    sim_args.add_common(c_sim);
    std::string x0_spec, y0_spec, full_state_path;
    c_sim->add_option("--x0", x0_spec, "initial x: CSV path or uniform:SEED");
    c_sim->add_option("--y0", y0_spec, "initial y: CSV path or uniform:SEED");
    c_sim->add_option("--t-end", sim_args.cfg.t_end);
    c_sim->add_option("--dt0", sim_args.cfg.dt0);
    c_sim->add_option("--sample-every", sim_args.cfg.sample_every);
    c_sim->add_option("--seeds", sim_args.cfg.seeds);
    c_sim->add_option("--full-state", full_state_path, "also write the full state CSV here");

    // classify
    auto* c_classify = app.add_subcommand("classify", "regime report for a parameter pair");
    ModelArgs cls_args;
    cls_args.add_common(c_classify);

    // sweep
    auto* c_sweep = app.add_subcommand("sweep", "classify a (tau1, tau2) grid");
    ModelArgs swp_args;
    swp_args.add_common(c_sweep);
    std::string tau1_spec, tau2_spec;
    bool verify = false;
    c_sweep->add_option("--tau1", tau1_spec, "grid min:max:steps")->required();
    c_sweep->add_option("--tau2", tau2_spec, "grid min:max:steps")->required();
    c_sweep->add_flag("--verify", verify, "simulate each cell and compare with the prediction");

    // equilibria
    auto* c_eq = app.add_subcommand("equilibria", "multi-start equilibrium discovery");
    ModelArgs eq_args;
    eq_args.add_common(c_eq);
    c_eq->add_option("--seeds", eq_args.cfg.seeds);

    // monotone-test
    auto* c_mono = app.add_subcommand("monotone-test", "trajectory-pair monotonicity trials");
    ModelArgs mono_args;
    mono_args.add_common(c_mono);
    std::uint64_t pairs = 10;
    double mono_t_end = 20.0;
    c_mono->add_option("--pairs", pairs);
    c_mono->add_option("--t-end", mono_t_end);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*c_validate) return cmd_validate(v_graph);
        if (*c_spectral) return cmd_spectral(s_graph, s_scale, s_tol);
        if (*c_sis) return cmd_sis(i_graph, i_beta, i_delta, i_tol);
        if (*c_sim)
            return cmd_simulate(sim_args.resolve(c_sim), x0_spec, y0_spec, full_state_path,
                                out_dir);
        if (*c_classify) return cmd_classify(cls_args.resolve(c_classify), out_dir);
        if (*c_sweep)
            return cmd_sweep(swp_args.resolve(c_sweep), tau1_spec, tau2_spec, verify, out_dir);
        if (*c_eq) return cmd_equilibria(eq_args.resolve(c_eq), out_dir);
        if (*c_mono) return cmd_monotone_test(mono_args.resolve(c_mono), pairs, mono_t_end);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
