#include "bivirus/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bivirus/dynamics.hpp"
#include "bivirus/errors.hpp"
#include "bivirus/sis.hpp"

namespace bivirus {

namespace {

using kernels::Csr;
using kernels::Dense;
using kernels::Exec;

std::size_t iteration_cap(std::size_t n, double tol) {
    const double it = 100.0 * static_cast<double>(n) * std::log(1.0 / tol);
    return std::max<std::size_t>(1000, static_cast<std::size_t>(it));
}

// For irreducibility we need the sparsity pattern strongly connected:
// full reach from node 0 both forward and over the transpose.
bool pattern_strongly_connected(std::size_t n, const std::vector<std::vector<std::size_t>>& out_adj,
                                const std::vector<std::vector<std::size_t>>& in_adj) {
    if (n == 0) return false;
    for (int pass = 0; pass < 2; ++pass) {
        const auto& adj = (pass == 0) ? out_adj : in_adj;
        std::vector<char> seen(n, 0);
        std::vector<std::size_t> stack{0};
        seen[0] = 1;
        std::size_t visited = 1;
        while (!stack.empty()) {
            const std::size_t u = stack.back();
            stack.pop_back();
            for (std::size_t v : adj[u]) {
                if (!seen[v]) {
                    seen[v] = 1;
                    ++visited;
                    stack.push_back(v);
                }
            }
        }
        if (visited != n) return false;
    }
    return true;
}

// Power iteration on M + shift*I for a nonnegative M given through its
// matvec. Reports the eigenvalue of M itself. The caller picks the shift
// (>0 breaks the plus/minus eigenvalue tie of bipartite spectra).
template <typename MatVec>
EigenPair power_iteration(std::size_t n, MatVec&& matvec, double shift, double tol) {
    const Exec exec = kernels::default_exec();
    const std::size_t cap = iteration_cap(n, tol);

    // v stays at unit max-norm throughout, so the residual below is the
    // one reported for the returned eigenvector.
    std::vector<double> v(n, 1.0), w(n);
    double rq_prev = std::numeric_limits<double>::infinity();

    for (std::size_t it = 0; it < cap; ++it) {
        matvec(v, w);  // w = M v (+ shift v)
        if (shift != 0.0) kernels::axpy(w, shift, v, w, exec);

        const double vv = kernels::dot(v, v, exec);
        const double rq = kernels::dot(v, w, exec) / vv;  // shifted Rayleigh quotient

        double rmax = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            rmax = std::max(rmax, std::fabs(w[i] - rq * v[i]));

        if (std::fabs(rq - rq_prev) < tol && rmax < tol) {
            EigenPair out;
            out.value = rq - shift;
            out.vector = v;
            out.residual = rmax;
            out.iterations = it + 1;
            return out;
        }
        rq_prev = rq;

        const double wmax = kernels::max_abs(w, exec);
        if (wmax == 0.0)
            throw NotConvergedError("iterate annihilated; matrix has no positive eigenpair");
        for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / wmax;
    }
    throw NotConvergedError("power iteration hit the cap of " + std::to_string(cap) +
                            " iterations (tol=" + std::to_string(tol) + ")");
}

double max_abs_row_sum_csr(const Csr& m) {
    double best = 0.0;
    for (std::size_t i = 0; i < m.n; ++i) {
        double s = 0.0;
        for (std::size_t k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k) s += std::fabs(m.values[k]);
        best = std::max(best, s);
    }
    return best;
}

double max_abs_row_sum_dense(const Dense& m) {
    double best = 0.0;
    for (std::size_t i = 0; i < m.n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < m.n; ++j) s += std::fabs(m.at(i, j));
        best = std::max(best, s);
    }
    return best;
}

void require_positive_vector(EigenPair& p) {
    for (double c : p.vector)
        if (!(c > 0.0))
            throw NotConvergedError("PF vector has a non-positive entry; matrix may be reducible");
}

} // namespace

EigenPair pf_eigenpair(const Csr& m, double tol) {
    for (double v : m.values)
        if (v < 0.0) throw NotIrreducibleError("matrix has a negative entry");
    std::vector<std::vector<std::size_t>> out_adj(m.n), in_adj(m.n);
    for (std::size_t i = 0; i < m.n; ++i)
        for (std::size_t k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k)
            if (m.values[k] != 0.0) {
                out_adj[i].push_back(m.col_idx[k]);
                in_adj[m.col_idx[k]].push_back(i);
            }
    if (!pattern_strongly_connected(m.n, out_adj, in_adj))
        throw NotIrreducibleError("sparsity pattern is not strongly connected");

    const double shift = 0.05 * std::max(max_abs_row_sum_csr(m), 1e-30);
    const Exec exec = kernels::default_exec();
    EigenPair p = power_iteration(
        m.n, [&](const std::vector<double>& v, std::vector<double>& w) { kernels::spmv(m, v, w, exec); },
        shift, tol);
    require_positive_vector(p);
    return p;
}

EigenPair pf_eigenpair(const Dense& m, double tol) {
    for (double v : m.values)
        if (v < 0.0) throw NotIrreducibleError("matrix has a negative entry");
    std::vector<std::vector<std::size_t>> out_adj(m.n), in_adj(m.n);
    for (std::size_t i = 0; i < m.n; ++i)
        for (std::size_t j = 0; j < m.n; ++j)
            if (m.at(i, j) != 0.0) {
                out_adj[i].push_back(j);
                in_adj[j].push_back(i);
            }
    if (!pattern_strongly_connected(m.n, out_adj, in_adj))
        throw NotIrreducibleError("sparsity pattern is not strongly connected");

    const double shift = 0.05 * std::max(max_abs_row_sum_dense(m), 1e-30);
    const Exec exec = kernels::default_exec();
    EigenPair p = power_iteration(
        m.n,
        [&](const std::vector<double>& v, std::vector<double>& w) { kernels::dense_matvec(m, v, w, exec); },
        shift, tol);
    require_positive_vector(p);
    return p;
}

double scaled_spectral(std::span<const double> s, const Graph& g, double tol) {
    const Csr& a = g.adjacency();
    if (s.size() != a.n)
        throw DimensionMismatchError("scale vector length " + std::to_string(s.size()) +
                                     " does not match node count " + std::to_string(a.n));
    for (std::size_t i = 0; i < s.size(); ++i)
        if (!(s[i] > 0.0))
            throw ZeroScaleError("scale entry " + std::to_string(i) + " is not positive");

    Csr scaled = a;
    for (std::size_t i = 0; i < scaled.n; ++i)
        for (std::size_t k = scaled.row_ptr[i]; k < scaled.row_ptr[i + 1]; ++k)
            scaled.values[k] *= s[i];

    // pattern unchanged, still irreducible; skip the BFS by reusing the
    // checked path anyway (cheap at these sizes)
    return pf_eigenpair(scaled, tol).value;
}

namespace detail {

// Assembly without the D-membership gate, for Newton iterates that may
// wander slightly outside D.
JacobianMatrix assemble_jacobian(const BiVirusState& s, const VirusParams& p1,
                                 const VirusParams& p2, const Graph& a, const Graph& b) {
    const std::size_t n = s.size();
    const Csr& ca = a.adjacency();
    const Csr& cb = b.adjacency();

    std::vector<double> ax(n), by(n);
    kernels::spmv(ca, s.x, ax, kernels::default_exec());
    kernels::spmv(cb, s.y, by, kernels::default_exec());

    JacobianMatrix j;
    j.n = n;
    j.full = Dense(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        const double sxy = 1.0 - s.x[i] - s.y[i];
        // top-left: beta1*Sxy*A - beta1*diag(Ax) - delta1*I
        for (std::size_t k = ca.row_ptr[i]; k < ca.row_ptr[i + 1]; ++k)
            j.full.at(i, ca.col_idx[k]) += p1.beta * sxy * ca.values[k];
        j.full.at(i, i) -= p1.beta * ax[i] + p1.delta;
        // top-right: -beta1*diag(Ax)
        j.full.at(i, n + i) = -p1.beta * ax[i];
        // bottom-left: -beta2*diag(By)
        j.full.at(n + i, i) = -p2.beta * by[i];
        // bottom-right: beta2*Sxy*B - beta2*diag(By) - delta2*I
        for (std::size_t k = cb.row_ptr[i]; k < cb.row_ptr[i + 1]; ++k)
            j.full.at(n + i, n + cb.col_idx[k]) += p2.beta * sxy * cb.values[k];
        j.full.at(n + i, n + i) -= p2.beta * by[i] + p2.delta;
    }
    return j;
}

} // namespace detail

JacobianMatrix jacobian_bivirus(const BiVirusState& state, const VirusParams& p1,
                                const VirusParams& p2, const Graph& a, const Graph& b) {
    if (state.x.size() != state.y.size() || state.x.size() != a.node_count() ||
        a.node_count() != b.node_count())
        throw DimensionMismatchError("state/graph sizes disagree");
    if (!in_state_space(state, 1e-9))
        throw StateOutOfDError("Jacobian requested outside the state space D");
    return detail::assemble_jacobian(state, p1, p2, a, b);
}

EigenPair leading_eigen_shifted(const JacobianMatrix& j, double tol) {
    const std::size_t n = j.n;
    const std::size_t m = 2 * n;

    // Conjugate by diag(I, -I): negates the off-diagonal blocks, which the
    // Kamke sign structure makes nonnegative; eigenvalues are unchanged.
    Dense t(m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t k = 0; k < m; ++k) {
            const bool cross = (i < n) != (k < n);
            t.at(i, k) = cross ? -j.full.at(i, k) : j.full.at(i, k);
        }

    const double c = 1.0 + max_abs_row_sum_dense(t);
    for (std::size_t i = 0; i < m; ++i) t.at(i, i) += c;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t k = 0; k < m; ++k)
            if (t.at(i, k) < 0.0)
                throw ShiftInsufficientError(
                    "entry (" + std::to_string(i) + "," + std::to_string(k) +
                    ") stays negative after the shift; matrix violates the Kamke sign form");

    const Exec exec = kernels::default_exec();
    EigenPair p = power_iteration(
        m, [&](const std::vector<double>& v, std::vector<double>& w) { kernels::dense_matvec(t, v, w, exec); },
        0.0, tol);
    p.value -= c;
    // map the eigenvector back through the conjugation
    for (std::size_t i = n; i < m; ++i) p.vector[i] = -p.vector[i];
    return p;
}

EigenPair leading_eigen_metzler(const Dense& m, double tol) {
    const double c = 1.0 + max_abs_row_sum_dense(m);
    Dense t = m;
    for (std::size_t i = 0; i < t.n; ++i) t.at(i, i) += c;
    for (double v : t.values)
        if (v < 0.0)
            throw ShiftInsufficientError("matrix has a negative off-diagonal entry; not Metzler");
    const Exec exec = kernels::default_exec();
    EigenPair p = power_iteration(
        t.n, [&](const std::vector<double>& v, std::vector<double>& w) { kernels::dense_matvec(t, v, w, exec); },
        0.0, tol);
    p.value -= c;
    return p;
}

StabilityVerdict stability_at(const BiVirusState& eq, const VirusParams& p1,
                              const VirusParams& p2, const Graph& a, const Graph& b,
                              double eq_tol, double marginal_band) {
    const auto [gx, hy] = bivirus_field(eq, p1, p2, a, b);
    double r = 0.0;
    for (double v : gx) r = std::max(r, std::fabs(v));
    for (double v : hy) r = std::max(r, std::fabs(v));
    if (r >= eq_tol)
        throw NotAnEquilibriumError("field residual " + std::to_string(r) +
                                    " exceeds the equilibrium tolerance");

    const JacobianMatrix j = jacobian_bivirus(eq, p1, p2, a, b);
    const double lead = leading_eigen_shifted(j).value;
    if (std::fabs(lead) < marginal_band) return StabilityVerdict::Marginal;
    return lead < 0.0 ? StabilityVerdict::Stable : StabilityVerdict::Unstable;
}

} // namespace bivirus
