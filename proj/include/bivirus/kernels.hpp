#ifndef BIVIRUS_KERNELS_HPP
#define BIVIRUS_KERNELS_HPP

#include <cstddef>
#include <span>
#include <vector>

// Data-parallel inner kernels shared by the spectral, SIS and bi-virus
// modules. Every kernel comes in two flavours selected by Exec: a plain
// serial loop (the reference) and an OpenMP one. Both are kept so tests
// can compare them and the benchmark tool can time them against each
// other. Reductions are blocked so the result is bit-identical for any
// thread count.

namespace bivirus::kernels {

enum class Exec { Seq, Par };

/// Execution policy used by the higher-level modules: Par when compiled
/// with OpenMP unless the environment variable BIVIRUS_SERIAL is set.
Exec default_exec();

/// Compressed sparse row matrix, the storage for adjacency matrices.
struct Csr {
    std::size_t n = 0;
    std::vector<std::size_t> row_ptr;  // size n+1
    std::vector<std::size_t> col_idx;  // size nnz
    std::vector<double> values;        // size nnz

    std::size_t nnz() const { return col_idx.size(); }
};

/// Dense row-major square matrix (used for the 2N x 2N Jacobian).
struct Dense {
    std::size_t n = 0;
    std::vector<double> values;  // n*n, row-major

    Dense() = default;
    explicit Dense(std::size_t n_) : n(n_), values(n_ * n_, 0.0) {}
    double& at(std::size_t i, std::size_t j) { return values[i * n + j]; }
    double at(std::size_t i, std::size_t j) const { return values[i * n + j]; }
};

// y = A x
void spmv(const Csr& a, std::span<const double> x, std::span<double> y, Exec exec);

// y = M x, M dense square
void dense_matvec(const Dense& m, std::span<const double> x, std::span<double> y, Exec exec);

// out_i = beta * (1 - x_i) * (A x)_i - delta * x_i
void sis_rhs(const Csr& a, double beta, double delta,
             std::span<const double> x, std::span<double> out, Exec exec);

// dx_i = beta1 * (1 - x_i - y_i) * (A x)_i - delta1 * x_i
// dy_i = beta2 * (1 - x_i - y_i) * (B y)_i - delta2 * y_i
void bivirus_rhs(const Csr& a, const Csr& b,
                 double beta1, double delta1, double beta2, double delta2,
                 std::span<const double> x, std::span<const double> y,
                 std::span<double> dx, std::span<double> dy, Exec exec);

// out = u + (h/6) * (k1 + 2 k2 + 2 k3 + k4)
void rk4_combine(std::span<const double> u,
                 std::span<const double> k1, std::span<const double> k2,
                 std::span<const double> k3, std::span<const double> k4,
                 double h, std::span<double> out, Exec exec);

// out = u + h * k
void axpy(std::span<const double> u, double h, std::span<const double> k,
          std::span<double> out, Exec exec);

double max_abs(std::span<const double> v, Exec exec);
double max_abs_diff(std::span<const double> a, std::span<const double> b, Exec exec);

// Blocked sums: partials are accumulated per fixed-size block and folded
// in block order, so the result does not depend on the thread count.
double sum(std::span<const double> v, Exec exec);
double dot(std::span<const double> a, std::span<const double> b, Exec exec);

} // namespace bivirus::kernels

#endif
