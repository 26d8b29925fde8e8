#include "bivirus/regimes.hpp"

#include <cmath>
#include <stdexcept>

#include "bivirus/errors.hpp"
#include "bivirus/spectral.hpp"

namespace bivirus {

std::string to_string(Region r) {
    switch (r) {
        case Region::R1: return "R1";
        case Region::R2: return "R2";
        case Region::R3: return "R3";
        case Region::R4: return "R4";
        case Region::R5: return "R5";
        case Region::R6: return "R6";
    }
    return "?";
}

std::string to_string(Attractor a) {
    switch (a) {
        case Attractor::VirusFree: return "virus_free";
        case Attractor::Virus1Only: return "virus1_only";
        case Attractor::Virus2Only: return "virus2_only";
        case Attractor::Coexistence: return "coexistence";
    }
    return "?";
}

namespace {

bool survives(double product, double band) { return product > 1.0 + band; }
bool near_one(double product, double band) { return std::fabs(product - 1.0) <= band; }

} // namespace

RegimeReport classify(const VirusParams& p1, const VirusParams& p2, const Graph& a,
                      const Graph& b, const ClassifyOptions& opt) {
    if (a.node_count() != b.node_count())
        throw DimensionMismatchError("graphs have different node counts");

    RegimeReport rep;
    const double lam_a = pf_eigenpair(a.adjacency(), opt.eig_tol).value;
    const double lam_b = pf_eigenpair(b.adjacency(), opt.eig_tol).value;
    rep.t1_lam_a = p1.tau() * lam_a;
    rep.t2_lam_b = p2.tau() * lam_b;

    const SisFixedPoint fx = sis_fixed_point(p1, a, opt.fp_tol, opt.eig_tol);
    const SisFixedPoint fy = sis_fixed_point(p2, b, opt.fp_tol, opt.eig_tol);
    rep.x_star = fx.x_star;
    rep.y_star = fy.x_star;

    const std::size_t n = a.node_count();
    if (fy.regime == SisRegime::Endemic) {
        std::vector<double> sy(n);
        for (std::size_t i = 0; i < n; ++i) sy[i] = 1.0 - rep.y_star[i];
        rep.t1_lam_sya = p1.tau() * scaled_spectral(sy, a, opt.eig_tol);
    } else {
        rep.t1_lam_sya = rep.t1_lam_a;
    }
    if (fx.regime == SisRegime::Endemic) {
        std::vector<double> sx(n);
        for (std::size_t i = 0; i < n; ++i) sx[i] = 1.0 - rep.x_star[i];
        rep.t2_lam_sxb = p2.tau() * scaled_spectral(sx, b, opt.eig_tol);
    } else {
        rep.t2_lam_sxb = rep.t2_lam_b;
    }

    rep.boundary = near_one(rep.t1_lam_a, opt.boundary_band) ||
                   near_one(rep.t2_lam_b, opt.boundary_band) ||
                   near_one(rep.t1_lam_sya, opt.boundary_band) ||
                   near_one(rep.t2_lam_sxb, opt.boundary_band);

    const bool s1 = survives(rep.t1_lam_a, opt.boundary_band);
    const bool s2 = survives(rep.t2_lam_b, opt.boundary_band);
    if (!s1 && !s2) {
        rep.region = Region::R1;
        rep.predicted = Attractor::VirusFree;
        return rep;
    }
    if (s1 && !s2) {
        rep.region = Region::R2;
        rep.predicted = Attractor::Virus1Only;
        return rep;
    }
    if (!s1 && s2) {
        rep.region = Region::R3;
        rep.predicted = Attractor::Virus2Only;
        return rep;
    }

    // both base products exceed 1: x* and y* are positive and the
    // refined products decide
    const bool r1 = survives(rep.t1_lam_sya, opt.boundary_band);
    const bool r2 = survives(rep.t2_lam_sxb, opt.boundary_band);
    if (r1 && !r2) {
        rep.region = Region::R5;
        rep.predicted = Attractor::Virus1Only;
    } else if (!r1 && r2) {
        rep.region = Region::R4;
        rep.predicted = Attractor::Virus2Only;
    } else if (r1 && r2) {
        rep.region = Region::R6;
        rep.predicted = Attractor::Coexistence;
    } else {
        throw InternalInconsistencyError(
            "both refined threshold products <= 1 while both base products exceed 1 "
            "(t1*lam(SyA)=" + std::to_string(rep.t1_lam_sya) +
            ", t2*lam(SxB)=" + std::to_string(rep.t2_lam_sxb) +
            "); outside R1 this contradicts the threshold-curve geometry and marks a "
            "degenerate knife edge");
    }
    return rep;
}

ThresholdCurves threshold_curves(const Graph& a, const Graph& b, double tau_min, double tau_max,
                                 std::size_t steps, const ClassifyOptions& opt) {
    if (steps < 2) throw std::invalid_argument("steps must be at least 2");
    if (!(tau_min > 0.0) || !(tau_max > tau_min))
        throw std::invalid_argument("need 0 < tau_min < tau_max");

    const double lam_a = pf_eigenpair(a.adjacency(), opt.eig_tol).value;
    const double lam_b = pf_eigenpair(b.adjacency(), opt.eig_tol).value;
    const std::size_t n = a.node_count();

    ThresholdCurves out;
    out.tau2_grid.resize(steps);
    out.blue_curve.resize(steps);
    out.tau1_grid.resize(steps);
    out.red_curve.resize(steps);

    for (std::size_t k = 0; k < steps; ++k) {
        const double tau = tau_min + (tau_max - tau_min) * static_cast<double>(k) /
                                         static_cast<double>(steps - 1);
        out.tau2_grid[k] = tau;
        out.tau1_grid[k] = tau;

        // blue: tau1 threshold as a function of tau2
        {
            const SisFixedPoint fy = sis_fixed_point(VirusParams::from_tau(tau), b, opt.fp_tol,
                                                     opt.eig_tol);
            if (fy.regime == SisRegime::VirusFree) {
                out.blue_curve[k] = 1.0 / lam_a;  // below the corner
            } else {
                std::vector<double> sy(n);
                for (std::size_t i = 0; i < n; ++i) sy[i] = 1.0 - fy.x_star[i];
                out.blue_curve[k] = 1.0 / scaled_spectral(sy, a, opt.eig_tol);
            }
        }
        // red: tau2 threshold as a function of tau1
        {
            const SisFixedPoint fx = sis_fixed_point(VirusParams::from_tau(tau), a, opt.fp_tol,
                                                     opt.eig_tol);
            if (fx.regime == SisRegime::VirusFree) {
                out.red_curve[k] = 1.0 / lam_b;
            } else {
                std::vector<double> sx(n);
                for (std::size_t i = 0; i < n; ++i) sx[i] = 1.0 - fx.x_star[i];
                out.red_curve[k] = 1.0 / scaled_spectral(sx, b, opt.eig_tol);
            }
        }
    }
    return out;
}

Attractor classify_avg_projection(double avg_x, double avg_y, double tol) {
    const bool x_zero = avg_x < tol;
    const bool y_zero = avg_y < tol;
    if (x_zero && y_zero) return Attractor::VirusFree;
    if (!x_zero && y_zero) return Attractor::Virus1Only;
    if (x_zero && !y_zero) return Attractor::Virus2Only;
    return Attractor::Coexistence;
}

namespace {

std::uint64_t mix_cell_seed(std::uint64_t base, std::uint64_t cell) {
    std::uint64_t x = base + 0x9E3779B97F4A7C15ULL * (cell + 1);
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

} // namespace

std::vector<SweepCell> sweep(const Graph& a, const Graph& b,
                             const std::vector<double>& tau1_grid,
                             const std::vector<double>& tau2_grid, const SweepOptions& opt) {
    if (tau1_grid.empty() || tau2_grid.empty())
        throw std::invalid_argument("sweep grids must be nonempty");

    const std::size_t n1 = tau1_grid.size();
    const std::size_t n2 = tau2_grid.size();
    std::vector<SweepCell> cells(n1 * n2);

#pragma omp parallel for schedule(dynamic) collapse(2)
    for (long i = 0; i < static_cast<long>(n1); ++i) {
        for (long j = 0; j < static_cast<long>(n2); ++j) {
            const std::size_t flat = static_cast<std::size_t>(i) * n2 + j;
            SweepCell& cell = cells[flat];
            cell.tau1 = tau1_grid[i];
            cell.tau2 = tau2_grid[j];

            const VirusParams p1 = VirusParams::from_tau(cell.tau1);
            const VirusParams p2 = VirusParams::from_tau(cell.tau2);
            try {
                cell.report = classify(p1, p2, a, b, opt.classify_opt);
            } catch (const std::exception& e) {
                cell.error = e.what();
                continue;
            }

            if (!opt.verify) continue;
            try {
                MultiStartOptions ms;
                ms.n_seeds = opt.seeds_per_cell;
                ms.rng_seed = mix_cell_seed(opt.rng_seed, flat);
                ms.t_end_cap = opt.t_end_cap;
                const EquilibriumSet eqs = multi_start_equilibria(p1, p2, a, b, ms);
                if (!eqs.failures.empty()) {
                    cell.verified = VerifyStatus::Failed;
                    cell.verify_error = eqs.failures.front().reason;
                    continue;
                }
                bool all_match = true;
                for (const EquilibriumPoint& pt : eqs.points) {
                    const auto [ax, ay] = avg_projection(pt.state);
                    const Attractor got = classify_avg_projection(ax, ay, opt.avg_class_tol);
                    cell.observed = got;
                    if (got != cell.report->predicted) all_match = false;
                }
                cell.verified = all_match ? VerifyStatus::Match : VerifyStatus::Mismatch;
            } catch (const std::exception& e) {
                cell.verified = VerifyStatus::Failed;
                cell.verify_error = e.what();
            }
        }
    }
    return cells;
}

} // namespace bivirus
