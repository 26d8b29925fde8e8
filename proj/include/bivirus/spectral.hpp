#ifndef BIVIRUS_SPECTRAL_HPP
#define BIVIRUS_SPECTRAL_HPP

#include <span>
#include <vector>

#include "bivirus/graph.hpp"
#include "bivirus/kernels.hpp"

namespace bivirus {

struct VirusParams;     // sis.hpp
struct BiVirusState;    // dynamics.hpp

struct EigenPair {
    double value = 0.0;
    std::vector<double> vector;  // unit max-norm
    double residual = 0.0;       // ||M v - value*v||_inf
    std::size_t iterations = 0;
};

/// Perron-Frobenius eigenpair of a nonnegative irreducible matrix by
/// power iteration. A small diagonal shift makes the iteration matrix
/// primitive, so bipartite-like spectra (star, path, even cycles) cannot
/// stall it; the reported value and residual refer to the unshifted
/// matrix. Stops when successive Rayleigh quotients differ by less than
/// tol and the residual is below tol.
EigenPair pf_eigenpair(const kernels::Csr& m, double tol = 1e-10);
EigenPair pf_eigenpair(const kernels::Dense& m, double tol = 1e-10);

/// lambda(diag(s) * A). Every s_i must be positive to keep the scaled
/// matrix irreducible.
double scaled_spectral(std::span<const double> s, const Graph& g, double tol = 1e-10);

/// 2N x 2N Jacobian of the bi-virus field with the four N x N blocks
/// tracked explicitly:
///   [ beta1*Sxy*A - beta1*Dax - delta1*I        -beta1*Dax             ]
///   [       -beta2*Dby           beta2*Sxy*B - beta2*Dby - delta2*I    ]
/// with Sxy = diag(1-x-y), Dax = diag(Ax), Dby = diag(By).
struct JacobianMatrix {
    std::size_t n = 0;           // block size; full matrix is 2n x 2n
    kernels::Dense full;         // 2n x 2n, row-major

    double block(std::size_t bi, std::size_t bj, std::size_t i, std::size_t j) const {
        return full.at(bi * n + i, bj * n + j);
    }
};

JacobianMatrix jacobian_bivirus(const BiVirusState& state, const VirusParams& p1,
                                const VirusParams& p2, const Graph& a, const Graph& b);

/// Leading (largest real part) eigenvalue of a matrix whose sign pattern
/// fits the southeast Kamke form: off-diagonals of the diagonal blocks
/// >= 0, off-diagonal blocks <= 0. Conjugating by diag(I,-I) turns it
/// into a Metzler matrix; adding c = 1 + max row absolute sum makes that
/// nonnegative, and its PF eigenvalue minus c is the answer. The
/// eigenvector is mapped back, so at an unstable (0,y*) it comes out with
/// the first half positive and the second half negative.
EigenPair leading_eigen_shifted(const JacobianMatrix& j, double tol = 1e-10);

/// Leading eigenvalue of a Metzler matrix (nonnegative off-diagonals) by
/// the same shift construction, without the block conjugation. Used for
/// the generic-rate thresholds.
EigenPair leading_eigen_metzler(const kernels::Dense& m, double tol = 1e-10);

enum class StabilityVerdict { Stable, Unstable, Marginal };

/// Sign of the leading Jacobian eigenvalue at an equilibrium point.
/// |lambda| below the marginal band reports Marginal instead of picking
/// a side.
StabilityVerdict stability_at(const BiVirusState& eq, const VirusParams& p1,
                              const VirusParams& p2, const Graph& a, const Graph& b,
                              double eq_tol = 1e-8, double marginal_band = 1e-8);

} // namespace bivirus

#endif
