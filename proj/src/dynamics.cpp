#include "bivirus/dynamics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "bivirus/errors.hpp"

namespace bivirus {

namespace {

using kernels::Csr;
using kernels::Dense;
using kernels::Exec;

bool flat_in_d(std::span<const double> z, std::size_t n, double tol) {
    for (std::size_t i = 0; i < n; ++i) {
        const double x = z[i], y = z[n + i];
        if (x < -tol || y < -tol || x + y > 1.0 + tol) return false;
    }
    return true;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

double uniform01(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

} // namespace

bool in_state_space(const BiVirusState& s, double tol) {
    if (s.x.size() != s.y.size())
        throw DimensionMismatchError("x and y have different lengths");
    for (std::size_t i = 0; i < s.x.size(); ++i)
        if (s.x[i] < -tol || s.y[i] < -tol || s.x[i] + s.y[i] > 1.0 + tol) return false;
    return true;
}

std::pair<double, double> avg_projection(const BiVirusState& s) {
    if (s.x.size() != s.y.size())
        throw DimensionMismatchError("x and y have different lengths");
    const double n = static_cast<double>(s.x.size());
    const Exec exec = kernels::default_exec();
    return {kernels::sum(s.x, exec) / n, kernels::sum(s.y, exec) / n};
}

std::pair<std::vector<double>, std::vector<double>>
bivirus_field(const BiVirusState& s, const VirusParams& p1, const VirusParams& p2,
              const Graph& a, const Graph& b) {
    const std::size_t n = a.node_count();
    if (b.node_count() != n) throw DimensionMismatchError("graphs have different node counts");
    if (s.x.size() != n || s.y.size() != n)
        throw DimensionMismatchError("state length does not match node count");
    if (!in_state_space(s, 1e-9)) throw StateOutOfDError("state lies outside D");

    std::vector<double> dx(n), dy(n);
    kernels::bivirus_rhs(a.adjacency(), b.adjacency(), p1.beta, p1.delta, p2.beta, p2.delta,
                         s.x, s.y, dx, dy, kernels::default_exec());
    return {std::move(dx), std::move(dy)};
}

// ---------------------------------------------------------------------
// rate functions

RateFunction RateFunction::linear(double beta, const Graph& g) {
    if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
    RateFunction f;
    f.family_ = RateFamily::Linear;
    f.n_ = g.node_count();
    const Csr csr = g.adjacency();
    f.eval_ = [beta, csr](std::span<const double> v) {
        std::vector<double> out(csr.n);
        kernels::spmv(csr, v, out, kernels::default_exec());
        for (double& r : out) r *= beta;
        return out;
    };
    f.j0_ = Dense(f.n_);
    for (std::size_t i = 0; i < csr.n; ++i)
        for (std::size_t k = csr.row_ptr[i]; k < csr.row_ptr[i + 1]; ++k)
            f.j0_.at(i, csr.col_idx[k]) = beta * csr.values[k];
    return f;
}

RateFunction RateFunction::saturating(double beta, const Graph& g) {
    if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
    RateFunction f;
    f.family_ = RateFamily::Saturating;
    f.n_ = g.node_count();
    const Csr csr = g.adjacency();
    f.eval_ = [beta, csr](std::span<const double> v) {
        std::vector<double> out(csr.n);
        for (std::size_t i = 0; i < csr.n; ++i) {
            double acc = 0.0;
            for (std::size_t k = csr.row_ptr[i]; k < csr.row_ptr[i + 1]; ++k) {
                const double u = v[csr.col_idx[k]];
                acc += csr.values[k] * (u / (1.0 + u));
            }
            out[i] = beta * acc;
        }
        return out;
    };
    // d/du [u/(1+u)] = 1 at u = 0, so the Jacobian at zero is beta*A
    f.j0_ = Dense(f.n_);
    for (std::size_t i = 0; i < csr.n; ++i)
        for (std::size_t k = csr.row_ptr[i]; k < csr.row_ptr[i + 1]; ++k)
            f.j0_.at(i, csr.col_idx[k]) = beta * csr.values[k];
    return f;
}

RateFunction RateFunction::custom(std::function<std::vector<double>(std::span<const double>)> fn,
                                  const Graph& g) {
    RateFunction f;
    f.family_ = RateFamily::Custom;
    f.n_ = g.node_count();
    f.eval_ = std::move(fn);

    const std::vector<double> zero(f.n_, 0.0);
    const std::vector<double> f0 = f.eval_(zero);
    if (f0.size() != f.n_) throw DimensionMismatchError("rate function output length mismatch");
    for (double v : f0)
        if (std::fabs(v) > 1e-14)
            throw RateAssumptionViolatedError("f(0) is not the zero vector");

    // central differences, step 1e-6
    constexpr double h = 1e-6;
    f.j0_ = Dense(f.n_);
    std::vector<double> probe(f.n_, 0.0);
    for (std::size_t jcol = 0; jcol < f.n_; ++jcol) {
        probe[jcol] = h;
        const std::vector<double> fp = f.eval_(probe);
        probe[jcol] = -h;
        const std::vector<double> fm = f.eval_(probe);
        probe[jcol] = 0.0;
        for (std::size_t i = 0; i < f.n_; ++i) f.j0_.at(i, jcol) = (fp[i] - fm[i]) / (2.0 * h);
    }
    return f;
}

std::vector<double> RateFunction::operator()(std::span<const double> v) const {
    if (v.size() != n_) throw DimensionMismatchError("rate function input length mismatch");
    std::vector<double> out = eval_(v);
    if (out.size() != n_) throw DimensionMismatchError("rate function output length mismatch");
    for (std::size_t i = 0; i < out.size(); ++i)
        if (!(out[i] >= 0.0))
            throw RateAssumptionViolatedError("negative infection rate at component " +
                                              std::to_string(i));
    return out;
}

std::pair<std::vector<double>, std::vector<double>>
generic_field(const BiVirusState& s, const RateFunction& g_rate, const RateFunction& h_rate,
              std::span<const double> delta1, std::span<const double> delta2) {
    const std::size_t n = s.x.size();
    if (s.y.size() != n || g_rate.size() != n || h_rate.size() != n || delta1.size() != n ||
        delta2.size() != n)
        throw DimensionMismatchError("generic field input sizes disagree");
    if (!in_state_space(s, 1e-9)) throw StateOutOfDError("state lies outside D");

    const std::vector<double> gx = g_rate(s.x);
    const std::vector<double> hy = h_rate(s.y);
    std::vector<double> dx(n), dy(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double sfree = 1.0 - s.x[i] - s.y[i];
        dx[i] = sfree * gx[i] - delta1[i] * s.x[i];
        dy[i] = sfree * hy[i] - delta2[i] * s.y[i];
    }
    return {std::move(dx), std::move(dy)};
}

// ---------------------------------------------------------------------
// integrator

namespace {

// One classic RK4 step; k1 = rhs(z) is supplied by the caller so the
// step-doubling control can reuse it.
template <typename RhsFn>
void rk4_step(RhsFn&& rhs, std::span<const double> z, std::span<const double> k1, double h,
              std::span<double> out, std::vector<double>& tmp, std::vector<double>& k2,
              std::vector<double>& k3, std::vector<double>& k4) {
    const Exec exec = kernels::default_exec();
    kernels::axpy(z, 0.5 * h, k1, tmp, exec);
    rhs(tmp, k2);
    kernels::axpy(z, 0.5 * h, k2, tmp, exec);
    rhs(tmp, k3);
    kernels::axpy(z, h, k3, tmp, exec);
    rhs(tmp, k4);
    kernels::rk4_combine(z, k1, k2, k3, k4, h, out, exec);
}

BiVirusState unflatten(std::span<const double> z, std::size_t n) {
    return {std::vector<double>(z.begin(), z.begin() + n),
            std::vector<double>(z.begin() + n, z.end())};
}

template <typename RhsFn>
Trajectory core_integrate(std::vector<double> z, std::size_t n, RhsFn rhs,
                          const std::vector<double>& sample_times, const IntegrateOptions& opt) {
    if (!flat_in_d(z, n, opt.drift_tol))
        throw StateOutOfDError("initial state lies outside D");
    if (sample_times.empty()) throw std::invalid_argument("no sample times");

    const Exec exec = kernels::default_exec();
    const std::size_t m = 2 * n;
    std::vector<double> f(m), tmp(m), k2(m), k3(m), k4(m), fh(m);
    std::vector<double> big(m), half(m), small(m);

    Trajectory traj;
    traj.times.push_back(0.0);
    traj.states.push_back(unflatten(z, n));

    rhs(z, f);
    double res = kernels::max_abs(f, exec);

    double t = 0.0;
    double h = std::min(opt.dt0, opt.max_step);
    if (!(h > 0.0)) throw std::invalid_argument("dt0 must be positive");
    std::size_t si = 0;

    while (si < sample_times.size() && res >= opt.field_stop) {
        const double t_target = sample_times[si];
        const double remaining = t_target - t;
        const bool hits_target = (h >= remaining);
        const double h_try = hits_target ? remaining : h;

        // step doubling: one full step vs two half steps
        rk4_step(rhs, z, f, h_try, big, tmp, k2, k3, k4);
        rk4_step(rhs, z, f, 0.5 * h_try, half, tmp, k2, k3, k4);
        rhs(half, fh);
        rk4_step(rhs, half, fh, 0.5 * h_try, small, tmp, k2, k3, k4);

        const double err = kernels::max_abs_diff(big, small, exec) / 15.0;
        const double tol_step = opt.local_error_target * h_try;

        double factor;
        if (err == 0.0)
            factor = 5.0;
        else
            factor = std::clamp(0.9 * std::pow(tol_step / err, 0.2), 0.2, 5.0);

        if (err <= tol_step) {
            std::swap(z, small);
            t = hits_target ? t_target : t + h_try;
            if (!flat_in_d(z, n, opt.drift_tol))
                throw InvarianceViolatedError("trajectory drifted out of D at t=" +
                                              std::to_string(t) + "; integrator fault");
            rhs(z, f);
            res = kernels::max_abs(f, exec);
            if (hits_target) {
                traj.times.push_back(t_target);
                traj.states.push_back(unflatten(z, n));
                ++si;
            }
        }
        h = std::clamp(h_try * factor, 0.0, opt.max_step);
        if (h < 1e-14)
            throw NotConvergedError("integrator step size collapsed at t=" + std::to_string(t));
    }

    // early equilibrium exit: freeze the state through the remaining
    // sample times (the field norm is below field_stop, so the exact
    // solution moves less than that per unit time)
    if (si < sample_times.size()) {
        if (traj.times.back() < t && t < sample_times[si]) {
            traj.times.push_back(t);
            traj.states.push_back(unflatten(z, n));
        }
        for (; si < sample_times.size(); ++si) {
            traj.times.push_back(sample_times[si]);
            traj.states.push_back(unflatten(z, n));
        }
    }

    traj.terminal_residual = res;
    return traj;
}

std::vector<double> build_sample_times(double t_end, double sample_every) {
    if (!(t_end > 0.0)) throw std::invalid_argument("t_end must be positive");
    if (!(sample_every > 0.0)) throw std::invalid_argument("sample_every must be positive");
    std::vector<double> times;
    for (double t = sample_every; t < t_end; t += sample_every) times.push_back(t);
    if (times.empty() || times.back() < t_end) times.push_back(t_end);
    return times;
}

std::vector<double> flatten(const BiVirusState& s) {
    std::vector<double> z(s.x);
    z.insert(z.end(), s.y.begin(), s.y.end());
    return z;
}

} // namespace

Trajectory integrate(const BiVirusState& s0, const VirusParams& p1, const VirusParams& p2,
                     const Graph& a, const Graph& b, const IntegrateOptions& opt) {
    const std::size_t n = a.node_count();
    if (b.node_count() != n || s0.x.size() != n || s0.y.size() != n)
        throw DimensionMismatchError("state/graph sizes disagree");
    const Csr& ca = a.adjacency();
    const Csr& cb = b.adjacency();
    const Exec exec = kernels::default_exec();
    auto rhs = [&](std::span<const double> z, std::span<double> dz) {
        kernels::bivirus_rhs(ca, cb, p1.beta, p1.delta, p2.beta, p2.delta, z.first(n),
                             z.subspan(n), dz.first(n), dz.subspan(n), exec);
    };
    return core_integrate(flatten(s0), n, rhs, build_sample_times(opt.t_end, opt.sample_every),
                          opt);
}

Trajectory integrate_sampled(const BiVirusState& s0, const VirusParams& p1, const VirusParams& p2,
                             const Graph& a, const Graph& b,
                             const std::vector<double>& sample_times,
                             const IntegrateOptions& opt) {
    const std::size_t n = a.node_count();
    if (b.node_count() != n || s0.x.size() != n || s0.y.size() != n)
        throw DimensionMismatchError("state/graph sizes disagree");
    const Csr& ca = a.adjacency();
    const Csr& cb = b.adjacency();
    const Exec exec = kernels::default_exec();
    auto rhs = [&](std::span<const double> z, std::span<double> dz) {
        kernels::bivirus_rhs(ca, cb, p1.beta, p1.delta, p2.beta, p2.delta, z.first(n),
                             z.subspan(n), dz.first(n), dz.subspan(n), exec);
    };
    return core_integrate(flatten(s0), n, rhs, sample_times, opt);
}

Trajectory integrate_field(const BiVirusState& s0,
                           const std::function<void(const BiVirusState&, BiVirusState&)>& field,
                           const IntegrateOptions& opt) {
    const std::size_t n = s0.x.size();
    if (s0.y.size() != n) throw DimensionMismatchError("x and y have different lengths");
    BiVirusState in = BiVirusState::zero(n), out = BiVirusState::zero(n);
    auto rhs = [&](std::span<const double> z, std::span<double> dz) {
        std::copy(z.begin(), z.begin() + n, in.x.begin());
        std::copy(z.begin() + n, z.end(), in.y.begin());
        field(in, out);
        std::copy(out.x.begin(), out.x.end(), dz.begin());
        std::copy(out.y.begin(), out.y.end(), dz.begin() + n);
    };
    return core_integrate(flatten(s0), n, rhs, build_sample_times(opt.t_end, opt.sample_every),
                          opt);
}

// ---------------------------------------------------------------------
// generic thresholds

namespace {

std::vector<double> generic_single_virus_fixed_point(const RateFunction& rate,
                                                     std::span<const double> delta,
                                                     double t_hat) {
    const std::size_t n = rate.size();
    if (t_hat <= 0.0) return std::vector<double>(n, 0.0);

    BiVirusState s0 = BiVirusState::zero(n);
    std::fill(s0.x.begin(), s0.x.end(), 0.5);
    const std::vector<double> d(delta.begin(), delta.end());
    auto field = [&rate, d](const BiVirusState& s, BiVirusState& out) {
        const std::vector<double> fx = rate(s.x);
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            out.x[i] = (1.0 - s.x[i]) * fx[i] - d[i] * s.x[i];
            out.y[i] = 0.0;
        }
    };
    IntegrateOptions opt;
    opt.t_end = 10000.0;
    opt.sample_every = 10000.0;
    opt.field_stop = 1e-12;
    Trajectory traj = integrate_field(s0, field, opt);
    return traj.terminal().x;
}

} // namespace

GenericThresholds generic_thresholds(const RateFunction& g_rate, const RateFunction& h_rate,
                                     std::span<const double> delta1,
                                     std::span<const double> delta2, double tol) {
    const std::size_t n = g_rate.size();
    if (h_rate.size() != n || delta1.size() != n || delta2.size() != n)
        throw DimensionMismatchError("generic threshold input sizes disagree");
    for (std::size_t i = 0; i < n; ++i)
        if (!(delta1[i] > 0.0) || !(delta2[i] > 0.0))
            throw std::invalid_argument("recovery rates must be positive");

    // FD noise in a Custom Jacobian can leave hair-thin negative
    // off-diagonals; scrub them before the Metzler route.
    auto metzler_of = [&](const Dense& j0, std::span<const double> scale,
                          std::span<const double> delta) {
        Dense m(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t jc = 0; jc < n; ++jc) {
                double v = (scale.empty() ? 1.0 : scale[i]) * j0.at(i, jc);
                if (i != jc && v < 0.0 && v > -1e-12) v = 0.0;
                m.at(i, jc) = v;
            }
        for (std::size_t i = 0; i < n; ++i) m.at(i, i) -= delta[i];
        return m;
    };

    GenericThresholds out;
    out.t_hat_x = leading_eigen_metzler(metzler_of(g_rate.jacobian_at_zero(), {}, delta1), tol).value;
    out.t_hat_y = leading_eigen_metzler(metzler_of(h_rate.jacobian_at_zero(), {}, delta2), tol).value;

    out.x_star = generic_single_virus_fixed_point(g_rate, delta1, out.t_hat_x);
    out.y_star = generic_single_virus_fixed_point(h_rate, delta2, out.t_hat_y);

    std::vector<double> sx(n), sy(n);
    for (std::size_t i = 0; i < n; ++i) {
        sx[i] = 1.0 - out.x_star[i];
        sy[i] = 1.0 - out.y_star[i];
    }
    out.t_x_at_ystar = leading_eigen_metzler(metzler_of(g_rate.jacobian_at_zero(), sy, delta1), tol).value;
    out.t_y_at_xstar = leading_eigen_metzler(metzler_of(h_rate.jacobian_at_zero(), sx, delta2), tol).value;
    return out;
}

// ---------------------------------------------------------------------
// equilibrium discovery

namespace detail {
JacobianMatrix assemble_jacobian(const BiVirusState& s, const VirusParams& p1,
                                 const VirusParams& p2, const Graph& a, const Graph& b);
} // namespace detail

std::pair<BiVirusState, double>
find_equilibrium(const Trajectory& t, const VirusParams& p1, const VirusParams& p2,
                 const Graph& a, const Graph& b, double tol) {
    const std::size_t n = a.node_count();
    const Csr& ca = a.adjacency();
    const Csr& cb = b.adjacency();
    const Exec exec = kernels::default_exec();
    const std::size_t m = 2 * n;

    std::vector<double> z = flatten(t.terminal());
    std::vector<double> f(m);
    auto eval = [&](const std::vector<double>& zz, std::vector<double>& ff) {
        kernels::bivirus_rhs(ca, cb, p1.beta, p1.delta, p2.beta, p2.delta,
                             std::span<const double>(zz).first(n),
                             std::span<const double>(zz).subspan(n),
                             std::span<double>(ff).first(n), std::span<double>(ff).subspan(n),
                             exec);
    };
    eval(z, f);
    double res = kernels::max_abs(f, exec);
    if (res >= 1e-4)
        throw NewtonDivergedError("terminal residual " + std::to_string(res) +
                                  " is outside the Newton basin");

    using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    double best = res;
    for (int it = 0; it < 60 && res >= tol; ++it) {
        const JacobianMatrix jac =
            detail::assemble_jacobian(unflatten(z, n), p1, p2, a, b);
        Eigen::Map<const RowMat> jm(jac.full.values.data(), m, m);
        Eigen::Map<const Eigen::VectorXd> fv(f.data(), m);
        const Eigen::VectorXd dz = RowMat(jm).partialPivLu().solve(fv);
        for (std::size_t i = 0; i < m; ++i) z[i] -= dz[i];

        if (!flat_in_d(z, n, 0.1))
            throw LeftStateSpaceError("Newton iterate left the state space");
        eval(z, f);
        res = kernels::max_abs(f, exec);
        if (!std::isfinite(res) || res > 100.0 * best + 1.0)
            throw NewtonDivergedError("Newton residual blew up");
        best = std::min(best, res);
    }
    if (!(res < tol))
        throw NewtonDivergedError("Newton stalled at residual " + std::to_string(res));

    // snap hairline values so face equilibria come out exact
    for (double& v : z)
        if (std::fabs(v) <= 1e-13) v = 0.0;
    eval(z, f);
    res = kernels::max_abs(f, exec);
    if (!flat_in_d(z, n, 1e-9))
        throw LeftStateSpaceError("refined equilibrium lies outside D");
    return {unflatten(z, n), res};
}

BiVirusState sample_initial_state(std::size_t n, std::uint64_t rng_seed,
                                  std::uint64_t seed_index) {
    std::mt19937_64 eng(splitmix64(rng_seed ^ splitmix64(seed_index + 1)));
    BiVirusState s = BiVirusState::zero(n);
    for (std::size_t i = 0; i < n; ++i) {
        double u, v;
        do {
            u = uniform01(eng);
            v = uniform01(eng);
        } while (u + v > 1.0 || u == 0.0 || v == 0.0);
        s.x[i] = u;
        s.y[i] = v;
    }
    return s;
}

EquilibriumSet multi_start_equilibria(const VirusParams& p1, const VirusParams& p2,
                                      const Graph& a, const Graph& b,
                                      const MultiStartOptions& opt) {
    const std::size_t n = a.node_count();
    if (b.node_count() != n) throw DimensionMismatchError("graphs have different node counts");
    if (opt.n_seeds < 1) throw std::invalid_argument("n_seeds must be at least 1");

    const std::size_t k = static_cast<std::size_t>(opt.n_seeds);
    std::vector<BiVirusState> refined(k);
    std::vector<double> residuals(k, -1.0);
    std::vector<std::string> errors(k);

#pragma omp parallel for schedule(dynamic)
    for (long s = 0; s < static_cast<long>(k); ++s) {
        try {
            const BiVirusState s0 = sample_initial_state(n, opt.rng_seed, s);
            IntegrateOptions io;
            io.t_end = opt.t_end_cap;
            io.sample_every = opt.t_end_cap;
            io.dt0 = opt.dt0;
            io.field_stop = opt.residual_target;
            Trajectory traj = integrate(s0, p1, p2, a, b, io);
            if (traj.terminal_residual > 1e-4)
                throw NotConvergedError("field residual still " +
                                        std::to_string(traj.terminal_residual) +
                                        " at the time cap");
            auto [eq, res] = find_equilibrium(traj, p1, p2, a, b, opt.newton_tol);
            refined[s] = std::move(eq);
            residuals[s] = res;
        } catch (const std::exception& e) {
            errors[s] = e.what();
        }
    }

    EquilibriumSet set;
    set.cluster_tolerance = opt.cluster_tolerance;
    set.rng_seed = opt.rng_seed;
    set.generator = "mt19937_64/splitmix64";

    for (std::size_t s = 0; s < k; ++s) {
        if (!errors[s].empty()) {
            set.failures.push_back({s, errors[s]});
            continue;
        }
        bool merged = false;
        for (EquilibriumPoint& pt : set.points) {
            double dist = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                dist = std::max(dist, std::fabs(pt.state.x[i] - refined[s].x[i]));
                dist = std::max(dist, std::fabs(pt.state.y[i] - refined[s].y[i]));
            }
            if (dist <= opt.cluster_tolerance) {
                pt.seeds.push_back(s);
                pt.residual = std::min(pt.residual, residuals[s]);
                merged = true;
                break;
            }
        }
        if (!merged) {
            EquilibriumPoint pt;
            pt.state = refined[s];
            pt.residual = residuals[s];
            pt.seeds = {s};
            set.points.push_back(std::move(pt));
        }
    }

    for (EquilibriumPoint& pt : set.points) {
        try {
            pt.stability = stability_at(pt.state, p1, p2, a, b,
                                        std::max(1e-8, 10.0 * opt.newton_tol));
        } catch (const std::exception& e) {
            set.failures.push_back({pt.seeds.front(),
                                    std::string("stability classification failed: ") + e.what()});
        }
    }
    return set;
}

} // namespace bivirus
