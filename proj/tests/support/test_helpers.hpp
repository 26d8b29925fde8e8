#ifndef BIVIRUS_TEST_HELPERS_HPP
#define BIVIRUS_TEST_HELPERS_HPP

// Shared fixtures and independent oracles for the test suites. The
// oracles deliberately avoid the library's own algorithms: the spectral
// oracle goes through a dense symmetric eigensolver, the Jacobian oracle
// through central finite differences of the field.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <tuple>
#include <vector>

#include "bivirus/dynamics.hpp"
#include "bivirus/graph.hpp"
#include "bivirus/sis.hpp"

namespace bivirus::testing {

/// lambda(diag(s) A) via the similar symmetric matrix
/// diag(sqrt(s)) A diag(sqrt(s)) and a full dense eigensolve.
inline double dense_scaled_spectral_oracle(const std::vector<double>& s, const Graph& g) {
    const std::size_t n = g.node_count();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    const auto& csr = g.adjacency();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = csr.row_ptr[i]; k < csr.row_ptr[i + 1]; ++k) {
            const std::size_t j = csr.col_idx[k];
            m(i, j) = std::sqrt(s[i]) * csr.values[k] * std::sqrt(s[j]);
        }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

/// Central finite differences of the bi-virus field, step h.
inline kernels::Dense fd_jacobian_oracle(const BiVirusState& state, const VirusParams& p1,
                                         const VirusParams& p2, const Graph& a, const Graph& b,
                                         double h = 1e-6) {
    const std::size_t n = state.size();
    const std::size_t m = 2 * n;
    kernels::Dense jac(m);

    auto eval_flat = [&](const std::vector<double>& z) {
        BiVirusState s;
        s.x.assign(z.begin(), z.begin() + n);
        s.y.assign(z.begin() + n, z.end());
        auto [dx, dy] = bivirus_field(s, p1, p2, a, b);
        dx.insert(dx.end(), dy.begin(), dy.end());
        return dx;
    };

    std::vector<double> z(state.x);
    z.insert(z.end(), state.y.begin(), state.y.end());
    for (std::size_t j = 0; j < m; ++j) {
        std::vector<double> zp = z, zm = z;
        zp[j] += h;
        zm[j] -= h;
        const std::vector<double> fp = eval_flat(zp);
        const std::vector<double> fm = eval_flat(zm);
        for (std::size_t i = 0; i < m; ++i) jac.at(i, j) = (fp[i] - fm[i]) / (2.0 * h);
    }
    return jac;
}

/// Connected random graph: a random tree plus extra random edges.
inline Graph random_connected_graph(std::size_t n, std::size_t extra_edges, std::uint64_t seed,
                                    bool weighted = false) {
    std::mt19937_64 eng(seed);
    std::uniform_real_distribution<double> wdist(0.5, 2.0);
    std::set<std::pair<std::size_t, std::size_t>> used;
    std::vector<std::tuple<std::size_t, std::size_t, double>> edges;
    auto add = [&](std::size_t u, std::size_t v) {
        if (u == v) return false;
        const auto key = std::minmax(u, v);
        if (!used.insert(key).second) return false;
        edges.emplace_back(u, v, weighted ? wdist(eng) : 1.0);
        return true;
    };
    for (std::size_t i = 1; i < n; ++i) {
        std::uniform_int_distribution<std::size_t> pick(0, i - 1);
        add(i, pick(eng));
    }
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t e = 0; e < extra_edges; ++e) add(pick(eng), pick(eng));
    return Graph::from_edges(n, edges);
}

/// Interior state of D with margin away from every face, uniform per node.
inline BiVirusState random_interior_state(std::size_t n, std::uint64_t seed,
                                          double margin = 0.05) {
    std::mt19937_64 eng(seed);
    std::uniform_real_distribution<double> u(margin, 1.0 - 2.0 * margin);
    BiVirusState s = BiVirusState::zero(n);
    for (std::size_t i = 0; i < n; ++i) {
        double x, y;
        do {
            x = u(eng);
            y = u(eng);
        } while (x + y > 1.0 - margin);
        s.x[i] = x;
        s.y[i] = y;
    }
    return s;
}

inline double max_abs_diff_vec(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
}

inline double state_distance(const BiVirusState& a, const BiVirusState& b) {
    return std::max(max_abs_diff_vec(a.x, b.x), max_abs_diff_vec(a.y, b.y));
}

} // namespace bivirus::testing

#endif
