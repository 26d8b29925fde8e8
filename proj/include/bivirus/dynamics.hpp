#ifndef BIVIRUS_DYNAMICS_HPP
#define BIVIRUS_DYNAMICS_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bivirus/graph.hpp"
#include "bivirus/sis.hpp"
#include "bivirus/spectral.hpp"

namespace bivirus {

/// Point of the bi-virus state space D = {x,y >= 0, x+y <= 1}.
struct BiVirusState {
    std::vector<double> x;
    std::vector<double> y;

    std::size_t size() const { return x.size(); }
    static BiVirusState zero(std::size_t n) { return {std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)}; }
};

/// x >= -tol, y >= -tol, x+y <= 1+tol componentwise.
bool in_state_space(const BiVirusState& s, double tol = 0.0);

/// (avgX, avgY) projection used for two-dimensional phase plots.
std::pair<double, double> avg_projection(const BiVirusState& s);

/// Bi-virus vector field (G, H):
///   G_i = beta1*(1-x_i-y_i)*(Ax)_i - delta1*x_i
///   H_i = beta2*(1-x_i-y_i)*(By)_i - delta2*y_i
std::pair<std::vector<double>, std::vector<double>>
bivirus_field(const BiVirusState& s, const VirusParams& p1, const VirusParams& p2,
              const Graph& a, const Graph& b);

// ---------------------------------------------------------------------
// generic (possibly nonlinear) infection rates

enum class RateFamily { Linear, Saturating, Custom };

/// Per-virus infection rate function f: [0,1]^N -> R^N_{>=0} with f(0)=0,
/// plus its Jacobian at 0 (analytic for the built-in families, central
/// finite differences for Custom).
class RateFunction {
public:
    /// f(x) = beta * A x
    static RateFunction linear(double beta, const Graph& g);
    /// f_i(x) = beta * sum_j a_ij * x_j / (1 + x_j)
    static RateFunction saturating(double beta, const Graph& g);
    /// Arbitrary evaluator over the given graph; Jacobian at 0 by central
    /// differences with step 1e-6. f(0)=0 is checked at construction.
    static RateFunction custom(std::function<std::vector<double>(std::span<const double>)> f,
                               const Graph& g);

    RateFamily family() const { return family_; }
    std::size_t size() const { return n_; }

    /// Evaluates the rate vector; throws RateAssumptionViolatedError if a
    /// negative component shows up.
    std::vector<double> operator()(std::span<const double> v) const;

    /// Jacobian of f at the origin, dense.
    const kernels::Dense& jacobian_at_zero() const { return j0_; }

private:
    RateFunction() = default;
    RateFamily family_ = RateFamily::Custom;
    std::size_t n_ = 0;
    std::function<std::vector<double>(std::span<const double>)> eval_;
    kernels::Dense j0_;
};

/// Generic-rate bi-virus field:
///   G = diag(1-x-y) g(x) - diag(delta1) x
///   H = diag(1-x-y) h(y) - diag(delta2) y
std::pair<std::vector<double>, std::vector<double>>
generic_field(const BiVirusState& s, const RateFunction& g_rate, const RateFunction& h_rate,
              std::span<const double> delta1, std::span<const double> delta2);

struct GenericThresholds {
    double t_hat_x = 0.0;   // lambda(Jg(0) - diag(delta1))
    double t_hat_y = 0.0;   // lambda(Jh(0) - diag(delta2))
    double t_x_at_ystar = 0.0;  // lambda(diag(1-y*) Jg(0) - diag(delta1))
    double t_y_at_xstar = 0.0;  // lambda(diag(1-x*) Jh(0) - diag(delta2))
    std::vector<double> x_star;
    std::vector<double> y_star;
};

/// Threshold eigenvalues of the generic model; x*, y* are obtained by
/// long-horizon integration of the single-virus reductions.
GenericThresholds generic_thresholds(const RateFunction& g_rate, const RateFunction& h_rate,
                                     std::span<const double> delta1,
                                     std::span<const double> delta2, double tol = 1e-10);

// ---------------------------------------------------------------------
// integration

struct Trajectory {
    std::vector<double> times;
    std::vector<BiVirusState> states;
    double terminal_residual = 0.0;

    const BiVirusState& terminal() const { return states.back(); }
};

struct IntegrateOptions {
    double t_end = 100.0;
    double dt0 = 1e-2;
    double sample_every = 1.0;
    double local_error_target = 1e-9;  // per unit step
    double drift_tol = 1e-9;           // D-membership slack before InvarianceViolated
    double field_stop = 1e-12;         // early exit when ||(G,H)||_inf drops below
    double max_step = 1.0;
};

/// Classic RK4 with step-doubling adaptivity. Sample times (multiples of
/// sample_every, plus t=0 and the terminal time) are hit exactly by step
/// clipping. States are never clamped: leaving D beyond drift_tol throws
/// InvarianceViolated, because the exact flow cannot leave D.
Trajectory integrate(const BiVirusState& s0, const VirusParams& p1, const VirusParams& p2,
                     const Graph& a, const Graph& b, const IntegrateOptions& opt);

/// Same integrator over an arbitrary field (used for the generic-rate
/// single-virus reductions and by tests).
Trajectory integrate_field(
    const BiVirusState& s0,
    const std::function<void(const BiVirusState&, BiVirusState&)>& field,
    const IntegrateOptions& opt);

/// Variant with an explicit list of sample instants (sorted, positive;
/// the last one is the horizon). Lets trajectory pairs be compared at
/// identical times regardless of each trajectory's accepted steps.
Trajectory integrate_sampled(const BiVirusState& s0, const VirusParams& p1,
                             const VirusParams& p2, const Graph& a, const Graph& b,
                             const std::vector<double>& sample_times,
                             const IntegrateOptions& opt);

// ---------------------------------------------------------------------
// equilibrium discovery

/// Newton refinement of a near-equilibrium trajectory endpoint, using the
/// analytic Jacobian. Components within 1e-13 of 0 are snapped to 0 so
/// face equilibria come out exact.
std::pair<BiVirusState, double>
find_equilibrium(const Trajectory& t, const VirusParams& p1, const VirusParams& p2,
                 const Graph& a, const Graph& b, double tol = 1e-10);

struct EquilibriumPoint {
    BiVirusState state;
    double residual = 0.0;
    StabilityVerdict stability = StabilityVerdict::Marginal;
    std::vector<std::uint64_t> seeds;  // which seeds landed here
};

struct SeedFailure {
    std::uint64_t seed_index = 0;
    std::string reason;
};

struct EquilibriumSet {
    std::vector<EquilibriumPoint> points;
    std::vector<SeedFailure> failures;
    double cluster_tolerance = 1e-6;
    std::uint64_t rng_seed = 0;
    std::string generator = "mt19937_64";
};

struct MultiStartOptions {
    std::uint64_t n_seeds = 20;
    std::uint64_t rng_seed = 0;
    double t_end_cap = 5000.0;
    double residual_target = 1e-8;  // integration stops here before Newton
    double newton_tol = 1e-10;
    double cluster_tolerance = 1e-6;
    double dt0 = 1e-2;
};

/// Draws n_seeds initial states uniformly from D with x,y > 0, integrates
/// each until the field residual is small, refines by Newton, then
/// deduplicates and classifies stability. Per-seed failures are collected
/// rather than fatal. Deterministic for a fixed rng_seed: the initial
/// states are drawn sequentially in seed order and the (possibly
/// concurrent) integrations are merged back in seed order.
EquilibriumSet multi_start_equilibria(const VirusParams& p1, const VirusParams& p2,
                                      const Graph& a, const Graph& b,
                                      const MultiStartOptions& opt);

/// Initial state for one seed: per node, (x_i, y_i) uniform on the
/// triangle {x,y > 0, x+y < 1} by rejection.
BiVirusState sample_initial_state(std::size_t n, std::uint64_t rng_seed,
                                  std::uint64_t seed_index);

} // namespace bivirus

#endif
