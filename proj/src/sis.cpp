#include "bivirus/sis.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "bivirus/errors.hpp"
#include "bivirus/spectral.hpp"

namespace bivirus {

VirusParams::VirusParams(double beta_, double delta_) : beta(beta_), delta(delta_) {
    if (!(beta > 0.0)) throw std::invalid_argument("infection rate beta must be positive");
    if (!(delta > 0.0)) throw std::invalid_argument("recovery rate delta must be positive");
}

std::vector<double> sis_field(std::span<const double> x, const VirusParams& p, const Graph& g) {
    if (x.size() != g.node_count())
        throw DimensionMismatchError("state length " + std::to_string(x.size()) +
                                     " vs node count " + std::to_string(g.node_count()));
    std::vector<double> out(x.size());
    kernels::sis_rhs(g.adjacency(), p.beta, p.delta, x, out, kernels::default_exec());
    return out;
}

DichotomyVerdict sis_threshold(const VirusParams& p, const Graph& g, double eig_tol) {
    DichotomyVerdict v;
    v.threshold_product = p.tau() * pf_eigenpair(g.adjacency(), eig_tol).value;
    v.regime = (v.threshold_product <= 1.0) ? SisRegime::VirusFree : SisRegime::Endemic;
    return v;
}

SisFixedPoint sis_fixed_point(const VirusParams& p, const Graph& g, double tol, double eig_tol) {
    const std::size_t n = g.node_count();
    SisFixedPoint fp;

    const DichotomyVerdict verdict = sis_threshold(p, g, eig_tol);
    if (verdict.regime == SisRegime::VirusFree) {
        fp.x_star.assign(n, 0.0);
        fp.residual = 0.0;
        fp.regime = SisRegime::VirusFree;
        return fp;
    }

    // x <- tau*(Ax) / (1 + tau*(Ax)), the closed-form solution of the
    // per-node balance. From the all-ones vector the iterates decrease
    // monotonically onto the unique positive fixed point.
    const double tau = p.tau();
    const auto& csr = g.adjacency();
    const auto exec = kernels::default_exec();
    std::vector<double> x(n, 1.0), ax(n);
    constexpr std::size_t kCap = 1'000'000;

    for (std::size_t it = 0; it < kCap; ++it) {
        kernels::spmv(csr, x, ax, exec);
        double delta_max = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double t = tau * ax[i];
            const double next = t / (1.0 + t);
            delta_max = std::max(delta_max, std::fabs(next - x[i]));
            x[i] = next;
        }
        if (delta_max < tol) {
            fp.x_star = std::move(x);
            std::vector<double> f(n);
            kernels::sis_rhs(csr, p.beta, p.delta, fp.x_star, f, exec);
            fp.residual = kernels::max_abs(f, exec);
            fp.regime = SisRegime::Endemic;
            return fp;
        }
    }
    throw NotConvergedError("SIS fixed-point iteration hit the cap of " + std::to_string(kCap));
}

} // namespace bivirus
