#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bivirus/dynamics.hpp"
#include "bivirus/errors.hpp"
#include "bivirus/sis.hpp"
#include "support/test_helpers.hpp"

using namespace bivirus;

TEST_CASE("field values on the triangle") {
    const Graph k3 = Graph::complete(3);
    const VirusParams p(1.0, 1.0);

    const std::vector<double> zero(3, 0.0);
    for (double v : sis_field(zero, p, k3)) CHECK(v == 0.0);

    // x = 0.5: the endemic fixed point of tau=1 on a 2-regular graph
    const std::vector<double> half(3, 0.5);
    for (double v : sis_field(half, p, k3)) CHECK(v == doctest::Approx(0.0).epsilon(1e-15));

    // x = 0.2: 0.8 * 0.4 - 0.2 = 0.12
    const std::vector<double> x(3, 0.2);
    for (double v : sis_field(x, p, k3)) CHECK(v == doctest::Approx(0.12));

    CHECK_THROWS_AS(sis_field(std::vector<double>(4, 0.1), p, k3), DimensionMismatchError);
}

TEST_CASE("threshold dichotomy with boundary classified virus-free") {
    const Graph k3 = Graph::complete(3);
    const DichotomyVerdict below = sis_threshold(VirusParams::from_tau(0.4), k3);
    CHECK(below.threshold_product == doctest::Approx(0.8));
    CHECK(below.regime == SisRegime::VirusFree);

    const DichotomyVerdict above = sis_threshold(VirusParams::from_tau(1.0), k3);
    CHECK(above.threshold_product == doctest::Approx(2.0));
    CHECK(above.regime == SisRegime::Endemic);

    // exactly at threshold: tau = 1/lambda = 0.5
    const DichotomyVerdict at = sis_threshold(VirusParams::from_tau(0.5), k3);
    CHECK(at.regime == SisRegime::VirusFree);
}

TEST_CASE("fixed point on regular graphs has the closed form") {
    const Graph k3 = Graph::complete(3);
    const SisFixedPoint fp = sis_fixed_point(VirusParams::from_tau(1.0), k3);
    CHECK(fp.regime == SisRegime::Endemic);
    for (double v : fp.x_star) CHECK(v == doctest::Approx(0.5).epsilon(1e-10));

    const SisFixedPoint zero = sis_fixed_point(VirusParams::from_tau(0.4), k3);
    CHECK(zero.regime == SisRegime::VirusFree);
    for (double v : zero.x_star) CHECK(v == 0.0);
    CHECK(zero.residual == 0.0);

    for (std::size_t n : {4, 10}) {
        for (double tau : {0.8, 1.5, 3.0}) {
            const Graph c = Graph::cycle(n);  // 2-regular
            if (tau * 2.0 <= 1.0) continue;
            const SisFixedPoint f = sis_fixed_point(VirusParams::from_tau(tau), c);
            const double want = 1.0 - 1.0 / (tau * 2.0);
            for (double v : f.x_star) CHECK(v == doctest::Approx(want).epsilon(1e-10));
        }
    }
}

TEST_CASE("star fixed point matches a long-horizon integration of the field") {
    const Graph s5 = Graph::star(5);
    const VirusParams p(1.0, 1.0);
    const SisFixedPoint fp = sis_fixed_point(p, s5);
    REQUIRE(fp.regime == SisRegime::Endemic);

    // independent route: integrate dx/dt = beta diag(1-x) A x - delta x
    // from x = 0.5 * ones until the field goes quiet
    BiVirusState s0 = BiVirusState::zero(5);
    std::fill(s0.x.begin(), s0.x.end(), 0.5);
    auto field = [&](const BiVirusState& s, BiVirusState& out) {
        const std::vector<double> f = sis_field(s.x, p, s5);
        out.x = f;
        std::fill(out.y.begin(), out.y.end(), 0.0);
    };
    IntegrateOptions opt;
    opt.t_end = 2000.0;
    opt.sample_every = 2000.0;
    opt.field_stop = 1e-13;
    const Trajectory traj = integrate_field(s0, field, opt);
    CHECK(testing::max_abs_diff_vec(traj.terminal().x, fp.x_star) < 1e-8);
}

TEST_CASE("iteration map is monotone and the residual bound holds") {
    const Graph g = testing::random_connected_graph(15, 20, 5);
    const double tol = 1e-12;
    const VirusParams p(0.9, 1.1);
    REQUIRE(sis_threshold(p, g).regime == SisRegime::Endemic);

    // phi(x) <= phi(y) when x <= y, and iterates from 1 decrease
    const auto& csr = g.adjacency();
    auto phi = [&](const std::vector<double>& x) {
        std::vector<double> ax(x.size()), out(x.size());
        kernels::spmv(csr, x, ax, kernels::Exec::Seq);
        for (std::size_t i = 0; i < x.size(); ++i)
            out[i] = p.tau() * ax[i] / (1.0 + p.tau() * ax[i]);
        return out;
    };
    std::vector<double> hi(g.node_count(), 1.0);
    std::vector<double> lo(g.node_count(), 0.3);
    for (int it = 0; it < 30; ++it) {
        const std::vector<double> hi_next = phi(hi);
        const std::vector<double> lo_next = phi(lo);
        for (std::size_t i = 0; i < hi.size(); ++i) {
            CHECK(lo_next[i] <= hi_next[i]);   // monotony of phi
            CHECK(hi_next[i] <= hi[i] + 1e-15); // nonincreasing from ones
        }
        hi = hi_next;
        lo = lo_next;
    }

    const SisFixedPoint fp = sis_fixed_point(p, g, tol);
    CHECK(fp.residual < 10.0 * tol);
    for (double v : fp.x_star) CHECK(v > 0.0);
}

TEST_CASE("fixed point depends only on tau") {
    const Graph g = testing::random_connected_graph(12, 14, 8);
    const SisFixedPoint base = sis_fixed_point(VirusParams(0.9, 1.0), g);
    for (double c : {0.5, 2.0, 7.3}) {
        const SisFixedPoint scaled = sis_fixed_point(VirusParams(0.9 * c, 1.0 * c), g);
        CHECK(testing::max_abs_diff_vec(base.x_star, scaled.x_star) < 1e-12);
    }
}
