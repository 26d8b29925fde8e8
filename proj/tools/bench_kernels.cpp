// Times the serial reference kernels against the OpenMP ones on a
// synthetic graph and prints a throughput table. The two variants are the
// same code paths the library dispatches between, so this doubles as a
// quick sanity check that they agree.

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include <CLI11.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "bivirus/kernels.hpp"

namespace {

using namespace bivirus::kernels;
using Clock = std::chrono::steady_clock;

// ring + random chords; connected, average degree ~ 2 + chords_per_node
Csr synthetic_graph(std::size_t n, std::size_t chords_per_node, std::uint64_t seed) {
    std::mt19937_64 eng(seed);
    std::vector<std::vector<std::size_t>> adj(n);
    auto link = [&](std::size_t u, std::size_t v) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    };
    for (std::size_t i = 0; i < n; ++i) link(i, (i + 1) % n);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < chords_per_node; ++c) {
            const std::size_t j = pick(eng);
            if (j != i) link(i, j);
        }

    Csr m;
    m.n = n;
    m.row_ptr.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) m.row_ptr[i + 1] = m.row_ptr[i] + adj[i].size();
    m.col_idx.reserve(m.row_ptr[n]);
    m.values.assign(m.row_ptr[n], 1.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j : adj[i]) m.col_idx.push_back(j);
    return m;
}

template <typename Fn>
double time_ms(std::size_t reps, Fn&& fn) {
    fn();  // warm up
    const auto t0 = Clock::now();
    for (std::size_t r = 0; r < reps; ++r) fn();
    const auto t1 = Clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / static_cast<double>(reps);
}

void report(const char* name, double seq_ms, double par_ms, double agree) {
    std::printf("%-14s %10.3f %10.3f %8.2fx   max|diff| %.3e\n", name, seq_ms, par_ms,
                seq_ms / par_ms, agree);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"serial vs OpenMP kernel benchmark"};
    std::size_t n = 200000, chords = 6, reps = 20;
    std::uint64_t seed = 42;
    app.add_option("--n", n, "node count");
    app.add_option("--chords", chords, "extra edges per node");
    app.add_option("--reps", reps, "repetitions per kernel");
    app.add_option("--seed", seed);
    CLI11_PARSE(app, argc, argv);

    const Csr a = synthetic_graph(n, chords, seed);
    const Csr b = synthetic_graph(n, chords, seed + 1);

    std::mt19937_64 eng(seed + 2);
    std::uniform_real_distribution<double> u(0.0, 0.5);
    std::vector<double> x(n), y(n), k1(n), k2(n), k3(n), k4(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = u(eng);
        y[i] = u(eng) * (1.0 - x[i]);
        k1[i] = u(eng);
        k2[i] = u(eng);
        k3[i] = u(eng);
        k4[i] = u(eng);
    }
    std::vector<double> out_s(n), out_p(n), dy_s(n), dy_p(n);

#ifdef _OPENMP
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP; Par falls back to Seq\n");
#endif
    std::printf("n=%zu  nnz=%zu  reps=%zu\n\n", a.n, a.nnz(), reps);
    std::printf("%-14s %10s %10s %9s\n", "kernel", "seq ms", "par ms", "speedup");

    {
        const double ts = time_ms(reps, [&] { spmv(a, x, out_s, Exec::Seq); });
        const double tp = time_ms(reps, [&] { spmv(a, x, out_p, Exec::Par); });
        report("spmv", ts, tp, max_abs_diff(out_s, out_p, Exec::Seq));
    }
    {
        const double ts =
            time_ms(reps, [&] { sis_rhs(a, 1.0, 1.0, x, out_s, Exec::Seq); });
        const double tp =
            time_ms(reps, [&] { sis_rhs(a, 1.0, 1.0, x, out_p, Exec::Par); });
        report("sis_rhs", ts, tp, max_abs_diff(out_s, out_p, Exec::Seq));
    }
    {
        const double ts = time_ms(reps, [&] {
            bivirus_rhs(a, b, 1.0, 1.0, 0.8, 1.0, x, y, out_s, dy_s, Exec::Seq);
        });
        const double tp = time_ms(reps, [&] {
            bivirus_rhs(a, b, 1.0, 1.0, 0.8, 1.0, x, y, out_p, dy_p, Exec::Par);
        });
        const double d = std::max(max_abs_diff(out_s, out_p, Exec::Seq),
                                  max_abs_diff(dy_s, dy_p, Exec::Seq));
        report("bivirus_rhs", ts, tp, d);
    }
    {
        const double ts =
            time_ms(reps, [&] { rk4_combine(x, k1, k2, k3, k4, 0.01, out_s, Exec::Seq); });
        const double tp =
            time_ms(reps, [&] { rk4_combine(x, k1, k2, k3, k4, 0.01, out_p, Exec::Par); });
        report("rk4_combine", ts, tp, max_abs_diff(out_s, out_p, Exec::Seq));
    }
    {
        double rs = 0.0, rp = 0.0;
        const double ts = time_ms(reps, [&] { rs = dot(x, y, Exec::Seq); });
        const double tp = time_ms(reps, [&] { rp = dot(x, y, Exec::Par); });
        report("dot", ts, tp, std::fabs(rs - rp));
    }
    {
        double rs = 0.0, rp = 0.0;
        const double ts = time_ms(reps, [&] { rs = max_abs(x, Exec::Seq); });
        const double tp = time_ms(reps, [&] { rp = max_abs(x, Exec::Par); });
        report("max_abs", ts, tp, std::fabs(rs - rp));
    }
    return 0;
}
