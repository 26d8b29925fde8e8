#include "bivirus/kernels.hpp"

#include <cassert>
#include <cmath>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace bivirus::kernels {

namespace {

// Rows below this count are not worth a parallel region.
constexpr std::size_t kParGrain = 512;
// Block length for deterministic sum reductions.
constexpr std::size_t kSumBlock = 4096;

inline long ssize_of(std::size_t n) { return static_cast<long>(n); }

} // namespace

Exec default_exec() {
#ifdef _OPENMP
    static const bool force_serial = std::getenv("BIVIRUS_SERIAL") != nullptr;
    return force_serial ? Exec::Seq : Exec::Par;
#else
    return Exec::Seq;
#endif
}

void spmv(const Csr& a, std::span<const double> x, std::span<double> y, Exec exec) {
    assert(x.size() == a.n && y.size() == a.n);
    const std::size_t n = a.n;
    if (exec == Exec::Par) {
#pragma omp parallel for schedule(static) if (n >= kParGrain)
        for (long i = 0; i < ssize_of(n); ++i) {
            double acc = 0.0;
            for (std::size_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
                acc += a.values[k] * x[a.col_idx[k]];
            y[i] = acc;
        }
        return;
    }
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
            acc += a.values[k] * x[a.col_idx[k]];
        y[i] = acc;
    }
}

void dense_matvec(const Dense& m, std::span<const double> x, std::span<double> y, Exec exec) {
    assert(x.size() == m.n && y.size() == m.n);
    const std::size_t n = m.n;
    if (exec == Exec::Par) {
#pragma omp parallel for schedule(static) if (n >= 128)
        for (long i = 0; i < ssize_of(n); ++i) {
            const double* row = &m.values[i * n];
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += row[j] * x[j];
            y[i] = acc;
        }
        return;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = &m.values[i * n];
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += row[j] * x[j];
        y[i] = acc;
    }
}

void sis_rhs(const Csr& a, double beta, double delta,
             std::span<const double> x, std::span<double> out, Exec exec) {
    assert(x.size() == a.n && out.size() == a.n);
    const std::size_t n = a.n;
    if (exec == Exec::Par) {
#pragma omp parallel for schedule(static) if (n >= kParGrain)
        for (long i = 0; i < ssize_of(n); ++i) {
            double ax = 0.0;
            for (std::size_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
                ax += a.values[k] * x[a.col_idx[k]];
            out[i] = beta * (1.0 - x[i]) * ax - delta * x[i];
        }
        return;
    }
    for (std::size_t i = 0; i < n; ++i) {
        double ax = 0.0;
        for (std::size_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
            ax += a.values[k] * x[a.col_idx[k]];
        out[i] = beta * (1.0 - x[i]) * ax - delta * x[i];
    }
}

void bivirus_rhs(const Csr& a, const Csr& b,
                 double beta1, double delta1, double beta2, double delta2,
                 std::span<const double> x, std::span<const double> y,
                 std::span<double> dx, std::span<double> dy, Exec exec) {
    assert(a.n == b.n);
    assert(x.size() == a.n && y.size() == a.n && dx.size() == a.n && dy.size() == a.n);
    const std::size_t n = a.n;
    if (exec == Exec::Par) {
#pragma omp parallel for schedule(static) if (n >= kParGrain)
        for (long i = 0; i < ssize_of(n); ++i) {
            double ax = 0.0;
            for (std::size_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
                ax += a.values[k] * x[a.col_idx[k]];
            double by = 0.0;
            for (std::size_t k = b.row_ptr[i]; k < b.row_ptr[i + 1]; ++k)
                by += b.values[k] * y[b.col_idx[k]];
            const double s = 1.0 - x[i] - y[i];
            dx[i] = beta1 * s * ax - delta1 * x[i];
            dy[i] = beta2 * s * by - delta2 * y[i];
        }
        return;
    }
    for (std::size_t i = 0; i < n; ++i) {
        double ax = 0.0;
        for (std::size_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
            ax += a.values[k] * x[a.col_idx[k]];
        double by = 0.0;
        for (std::size_t k = b.row_ptr[i]; k < b.row_ptr[i + 1]; ++k)
            by += b.values[k] * y[b.col_idx[k]];
        const double s = 1.0 - x[i] - y[i];
        dx[i] = beta1 * s * ax - delta1 * x[i];
        dy[i] = beta2 * s * by - delta2 * y[i];
    }
}

void rk4_combine(std::span<const double> u,
                 std::span<const double> k1, std::span<const double> k2,
                 std::span<const double> k3, std::span<const double> k4,
                 double h, std::span<double> out, Exec exec) {
    const std::size_t n = u.size();
    assert(k1.size() == n && k2.size() == n && k3.size() == n && k4.size() == n &&
           out.size() == n);
    const double w = h / 6.0;
    if (exec == Exec::Par) {
#pragma omp parallel for schedule(static) if (n >= kParGrain)
        for (long i = 0; i < ssize_of(n); ++i)
            out[i] = u[i] + w * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        return;
    }
    for (std::size_t i = 0; i < n; ++i)
        out[i] = u[i] + w * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

void axpy(std::span<const double> u, double h, std::span<const double> k,
          std::span<double> out, Exec exec) {
    const std::size_t n = u.size();
    assert(k.size() == n && out.size() == n);
    if (exec == Exec::Par) {
#pragma omp parallel for schedule(static) if (n >= kParGrain)
        for (long i = 0; i < ssize_of(n); ++i) out[i] = u[i] + h * k[i];
        return;
    }
    for (std::size_t i = 0; i < n; ++i) out[i] = u[i] + h * k[i];
}

double max_abs(std::span<const double> v, Exec exec) {
    const std::size_t n = v.size();
    double m = 0.0;
    if (exec == Exec::Par) {
#pragma omp parallel for schedule(static) reduction(max : m) if (n >= kParGrain)
        for (long i = 0; i < ssize_of(n); ++i) m = std::max(m, std::fabs(v[i]));
        return m;
    }
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(v[i]));
    return m;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b, Exec exec) {
    assert(a.size() == b.size());
    const std::size_t n = a.size();
    double m = 0.0;
    if (exec == Exec::Par) {
#pragma omp parallel for schedule(static) reduction(max : m) if (n >= kParGrain)
        for (long i = 0; i < ssize_of(n); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
        return m;
    }
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
}

namespace {

template <typename BlockSum>
double blocked_reduce(std::size_t n, Exec exec, BlockSum block_sum) {
    const std::size_t nblocks = (n + kSumBlock - 1) / kSumBlock;
    if (nblocks <= 1 || exec == Exec::Seq) return block_sum(0, n);
    std::vector<double> partial(nblocks);
#pragma omp parallel for schedule(static)
    for (long blk = 0; blk < ssize_of(nblocks); ++blk) {
        const std::size_t lo = blk * kSumBlock;
        const std::size_t hi = std::min(lo + kSumBlock, n);
        partial[blk] = block_sum(lo, hi);
    }
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

} // namespace

double sum(std::span<const double> v, Exec exec) {
    return blocked_reduce(v.size(), exec, [&](std::size_t lo, std::size_t hi) {
        double acc = 0.0;
        for (std::size_t i = lo; i < hi; ++i) acc += v[i];
        return acc;
    });
}

double dot(std::span<const double> a, std::span<const double> b, Exec exec) {
    assert(a.size() == b.size());
    return blocked_reduce(a.size(), exec, [&](std::size_t lo, std::size_t hi) {
        double acc = 0.0;
        for (std::size_t i = lo; i < hi; ++i) acc += a[i] * b[i];
        return acc;
    });
}

} // namespace bivirus::kernels
