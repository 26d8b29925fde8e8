#ifndef BIVIRUS_SIS_HPP
#define BIVIRUS_SIS_HPP

#include <span>
#include <vector>

#include "bivirus/graph.hpp"

namespace bivirus {

/// Infection/recovery rate pair; tau = beta/delta is the effective strength.
struct VirusParams {
    double beta;
    double delta;

    VirusParams(double beta_, double delta_);
    double tau() const { return beta / delta; }

    /// Convenience: unit recovery rate, beta = tau.
    static VirusParams from_tau(double tau) { return VirusParams(tau, 1.0); }
};

enum class SisRegime { VirusFree, Endemic };

struct DichotomyVerdict {
    double threshold_product = 0.0;  // tau * lambda(A)
    SisRegime regime = SisRegime::VirusFree;
};

struct SisFixedPoint {
    std::vector<double> x_star;
    double residual = 0.0;
    SisRegime regime = SisRegime::VirusFree;
};

/// Right-hand side of the single-virus mean-field ODE:
/// out_i = beta*(1-x_i)*(Ax)_i - delta*x_i.
std::vector<double> sis_field(std::span<const double> x, const VirusParams& p, const Graph& g);

/// tau*lambda(A) against 1; equality counts as VirusFree.
DichotomyVerdict sis_threshold(const VirusParams& p, const Graph& g, double eig_tol = 1e-10);

/// Globally attractive fixed point. Below (or at) threshold this is 0;
/// above it the unique positive point, found by iterating
/// x <- tau*(Ax) / (1 + tau*(Ax)) from the all-ones vector, which
/// decreases monotonically onto x*.
SisFixedPoint sis_fixed_point(const VirusParams& p, const Graph& g, double tol = 1e-12,
                              double eig_tol = 1e-10);

} // namespace bivirus

#endif
