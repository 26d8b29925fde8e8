#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bivirus/dynamics.hpp"
#include "bivirus/errors.hpp"
#include "bivirus/ordering.hpp"
#include "bivirus/sis.hpp"
#include "support/test_helpers.hpp"

using namespace bivirus;

TEST_CASE("bi-virus field values") {
    const Graph k3 = Graph::complete(3);
    const VirusParams p1(1.0, 1.0), p2(0.75, 1.0);

    SUBCASE("origin is a fixed point") {
        const auto [dx, dy] = bivirus_field(BiVirusState::zero(3), p1, p2, k3, k3);
        for (double v : dx) CHECK(v == 0.0);
        for (double v : dy) CHECK(v == 0.0);
    }

    SUBCASE("(x*, 0) is a fixed point of the coupled system") {
        BiVirusState s = BiVirusState::zero(3);
        s.x = sis_fixed_point(p1, k3).x_star;
        const auto [dx, dy] = bivirus_field(s, p1, p2, k3, k3);
        for (double v : dx) CHECK(std::fabs(v) < 1e-11);
        for (double v : dy) CHECK(v == 0.0);
    }

    SUBCASE("direct substitution") {
        BiVirusState s = BiVirusState::zero(3);
        s.x.assign(3, 0.3);
        s.y.assign(3, 0.1);
        const auto [dx, dy] = bivirus_field(s, p1, p2, k3, k3);
        // dx = 0.6*0.6 - 0.3 = 0.06; dy = 0.75*0.6*0.2 - 0.1 = -0.01
        for (double v : dx) CHECK(v == doctest::Approx(0.06).epsilon(1e-12));
        for (double v : dy) CHECK(v == doctest::Approx(-0.01).epsilon(1e-12));
    }

    SUBCASE("rejects states outside D") {
        BiVirusState s = BiVirusState::zero(3);
        s.x.assign(3, 0.6);
        s.y.assign(3, 0.5);
        CHECK_THROWS_AS(bivirus_field(s, p1, p2, k3, k3), StateOutOfDError);
    }
}

TEST_CASE("generic rates") {
    const Graph k3 = Graph::complete(3);
    const std::vector<double> d1(3, 1.0), d2(3, 1.0);

    SUBCASE("linear family reduces to the built-in field") {
        const RateFunction g = RateFunction::linear(1.0, k3);
        const RateFunction h = RateFunction::linear(0.75, k3);
        const VirusParams p1(1.0, 1.0), p2(0.75, 1.0);
        for (int rep = 0; rep < 20; ++rep) {
            const BiVirusState s = testing::random_interior_state(3, 900 + rep);
            const auto [gx, gy] = generic_field(s, g, h, d1, d2);
            const auto [bx, by] = bivirus_field(s, p1, p2, k3, k3);
            CHECK(testing::max_abs_diff_vec(gx, bx) < 1e-15);
            CHECK(testing::max_abs_diff_vec(gy, by) < 1e-15);
        }
    }

    SUBCASE("saturating family at the corners") {
        const RateFunction g = RateFunction::saturating(1.0, k3);
        // f(0) = 0
        const std::vector<double> zero(3, 0.0);
        for (double v : g(zero)) CHECK(v == 0.0);
        // x = 1: g_i = 2 * (1/2) = 1, field = (1-1)*1 - delta*1 = -delta
        BiVirusState s = BiVirusState::zero(3);
        s.x.assign(3, 1.0);
        const RateFunction h = RateFunction::saturating(1.0, k3);
        const auto [dx, dy] = generic_field(s, g, h, d1, d2);
        for (double v : dx) CHECK(v == doctest::Approx(-1.0));
        for (double v : dy) CHECK(v == 0.0);
    }

    SUBCASE("negative rates are detected") {
        const RateFunction bad = RateFunction::custom(
            [](std::span<const double> v) {
                std::vector<double> out(v.size());
                for (std::size_t i = 0; i < v.size(); ++i) out[i] = -v[i];
                return out;
            },
            k3);
        std::vector<double> x(3, 0.5);
        CHECK_THROWS_AS(bad(x), RateAssumptionViolatedError);
    }

    SUBCASE("nonzero f(0) is detected at construction") {
        CHECK_THROWS_AS(RateFunction::custom(
                            [](std::span<const double> v) {
                                return std::vector<double>(v.size(), 0.5);
                            },
                            k3),
                        RateAssumptionViolatedError);
    }
}

TEST_CASE("generic thresholds") {
    const std::vector<double> ones(5, 1.0);

    SUBCASE("linear family reproduces beta*lambda(A) - delta") {
        const Graph s5 = Graph::star(5);
        const RateFunction g = RateFunction::linear(1.0, s5);
        const RateFunction h = RateFunction::linear(0.4, s5);
        const GenericThresholds t = generic_thresholds(g, h, ones, ones);
        CHECK(t.t_hat_x == doctest::Approx(2.0 - 1.0).epsilon(1e-9));   // lambda(S5) = 2
        CHECK(t.t_hat_y == doctest::Approx(0.8 - 1.0).epsilon(1e-9));
        // virus 2 below threshold: y* = 0, so T_x(y*) = T_hat_x
        CHECK(t.t_x_at_ystar == doctest::Approx(t.t_hat_x).epsilon(1e-9));
        for (double v : t.y_star) CHECK(v == 0.0);
        for (double v : t.x_star) CHECK(v > 0.0);
    }

    SUBCASE("saturating family has the same Jacobian at zero") {
        const Graph s5 = Graph::star(5);
        const RateFunction lin = RateFunction::linear(1.0, s5);
        const RateFunction sat = RateFunction::saturating(1.0, s5);
        const GenericThresholds tl = generic_thresholds(lin, lin, ones, ones);
        const GenericThresholds ts = generic_thresholds(sat, sat, ones, ones);
        CHECK(ts.t_hat_x == doctest::Approx(tl.t_hat_x).epsilon(1e-9));
        CHECK(ts.t_hat_x == doctest::Approx(1.0).epsilon(1e-9));  // sqrt(4) - 1
    }

    SUBCASE("custom family with finite-difference Jacobian agrees with its analytic twin") {
        const Graph k3 = Graph::complete(3);
        const std::vector<double> one3(3, 1.0);
        const RateFunction analytic = RateFunction::saturating(0.9, k3);
        const kernels::Csr csr = k3.adjacency();
        const RateFunction custom = RateFunction::custom(
            [csr](std::span<const double> v) {
                std::vector<double> out(csr.n, 0.0);
                for (std::size_t i = 0; i < csr.n; ++i)
                    for (std::size_t k = csr.row_ptr[i]; k < csr.row_ptr[i + 1]; ++k) {
                        const double u = v[csr.col_idx[k]];
                        out[i] += 0.9 * csr.values[k] * (u / (1.0 + u));
                    }
                return out;
            },
            k3);
        const GenericThresholds ta = generic_thresholds(analytic, analytic, one3, one3);
        const GenericThresholds tc = generic_thresholds(custom, custom, one3, one3);
        CHECK(tc.t_hat_x == doctest::Approx(ta.t_hat_x).epsilon(1e-7));
        CHECK(tc.t_x_at_ystar == doctest::Approx(ta.t_x_at_ystar).epsilon(1e-6));
    }
}

TEST_CASE("integration basics") {
    const Graph k3 = Graph::complete(3);
    const VirusParams p1(1.0, 1.0), p2(0.75, 1.0);

    SUBCASE("origin stays put") {
        IntegrateOptions opt;
        opt.t_end = 10.0;
        opt.sample_every = 1.0;
        const Trajectory t = integrate(BiVirusState::zero(3), p1, p2, k3, k3, opt);
        CHECK(t.times.front() == 0.0);
        CHECK(t.terminal_residual == 0.0);
        for (const BiVirusState& s : t.states) {
            for (double v : s.x) CHECK(v == 0.0);
            for (double v : s.y) CHECK(v == 0.0);
        }
    }

    SUBCASE("winner-takes-all endpoint matches the closed form") {
        const BiVirusState s0 = testing::random_interior_state(3, 123);
        IntegrateOptions opt;
        opt.t_end = 200.0;
        opt.sample_every = 50.0;
        const Trajectory t = integrate(s0, p1, p2, k3, k3, opt);
        for (double v : t.terminal().x) CHECK(v == doctest::Approx(0.5).epsilon(1e-6));
        for (double v : t.terminal().y) CHECK(std::fabs(v) < 1e-6);
    }

    SUBCASE("halving dt0 barely moves the endpoint") {
        const BiVirusState s0 = testing::random_interior_state(3, 124);
        IntegrateOptions opt;
        opt.t_end = 50.0;
        opt.sample_every = 50.0;
        opt.field_stop = 0.0;  // no early exit; compare the full horizon
        const Trajectory t1 = integrate(s0, p1, p2, k3, k3, opt);
        opt.dt0 *= 0.5;
        const Trajectory t2 = integrate(s0, p1, p2, k3, k3, opt);
        CHECK(testing::state_distance(t1.terminal(), t2.terminal()) < 1e-8);
    }

    SUBCASE("initial state outside D is rejected") {
        BiVirusState s = BiVirusState::zero(3);
        s.x.assign(3, 0.7);
        s.y.assign(3, 0.7);
        IntegrateOptions opt;
        CHECK_THROWS_AS(integrate(s, p1, p2, k3, k3, opt), StateOutOfDError);
    }
}

TEST_CASE("D-invariance along random trajectories") {
    const Graph a = testing::random_connected_graph(10, 12, 61);
    const Graph b = testing::random_connected_graph(10, 8, 62);
    const VirusParams p1(1.4, 1.0), p2(1.1, 0.9);
    for (int rep = 0; rep < 100; ++rep) {
        const BiVirusState s0 = testing::random_interior_state(10, 7000 + rep, 0.005);
        IntegrateOptions opt;
        opt.t_end = 30.0;
        opt.sample_every = 1.0;
        const Trajectory t = integrate(s0, p1, p2, a, b, opt);
        for (const BiVirusState& s : t.states) CHECK(in_state_space(s, 1e-9));
    }
}

TEST_CASE("with y0 = 0 the bi-virus flow reduces to single SIS") {
    const Graph a = testing::random_connected_graph(8, 9, 71);
    const Graph b = testing::random_connected_graph(8, 6, 72);
    const VirusParams p1(1.2, 0.9), p2(0.8, 1.0);

    BiVirusState s0 = BiVirusState::zero(8);
    const BiVirusState interior = testing::random_interior_state(8, 73);
    s0.x = interior.x;

    IntegrateOptions opt;
    opt.t_end = 40.0;
    opt.sample_every = 2.0;
    const Trajectory bi = integrate(s0, p1, p2, a, b, opt);

    auto field = [&](const BiVirusState& s, BiVirusState& out) {
        out.x = sis_field(s.x, p1, a);
        std::fill(out.y.begin(), out.y.end(), 0.0);
    };
    const Trajectory single = integrate_field(s0, field, opt);

    REQUIRE(bi.times.size() == single.times.size());
    double worst = 0.0;
    for (std::size_t k = 0; k < bi.times.size(); ++k)
        worst = std::max(worst, testing::state_distance(bi.states[k], single.states[k]));
    CHECK(worst < 1e-9);
    for (const BiVirusState& s : bi.states)
        for (double v : s.y) CHECK(v == 0.0);  // H vanishes identically on that face
    (void)p2;
    (void)b;
}

TEST_CASE("Newton refinement") {
    const Graph k3 = Graph::complete(3);
    const VirusParams p1(1.0, 1.0), p2(0.75, 1.0);

    SUBCASE("endpoint near the origin lands exactly on it") {
        const VirusParams q1(0.4, 1.0), q2(0.3, 1.0);
        BiVirusState s0 = BiVirusState::zero(3);
        s0.x.assign(3, 0.3);
        s0.y.assign(3, 0.3);
        IntegrateOptions opt;
        opt.t_end = 300.0;
        opt.sample_every = 300.0;
        opt.field_stop = 1e-7;
        const Trajectory t = integrate(s0, q1, q2, k3, k3, opt);
        const auto [eq, res] = find_equilibrium(t, q1, q2, k3, k3, 1e-12);
        for (double v : eq.x) CHECK(v == 0.0);
        for (double v : eq.y) CHECK(v == 0.0);
        CHECK(res == 0.0);
    }

    SUBCASE("endpoint near (x*, 0) is refined to 1e-12") {
        const BiVirusState s0 = testing::random_interior_state(3, 321);
        IntegrateOptions opt;
        opt.t_end = 500.0;
        opt.sample_every = 500.0;
        opt.field_stop = 1e-6;
        const Trajectory t = integrate(s0, p1, p2, k3, k3, opt);
        const auto [eq, res] = find_equilibrium(t, p1, p2, k3, k3, 1e-12);
        CHECK(res < 1e-12);
        for (double v : eq.x) CHECK(v == doctest::Approx(0.5).epsilon(1e-12));
        for (double v : eq.y) CHECK(v == 0.0);
    }

    SUBCASE("an endpoint far from equilibrium is outside the basin") {
        BiVirusState s0 = BiVirusState::zero(3);
        s0.x.assign(3, 0.3);
        s0.y.assign(3, 0.3);
        IntegrateOptions opt;
        opt.t_end = 0.5;  // nowhere near converged
        opt.sample_every = 0.5;
        const Trajectory t = integrate(s0, p1, p2, k3, k3, opt);
        CHECK_THROWS_AS(find_equilibrium(t, p1, p2, k3, k3, 1e-12), NewtonDivergedError);
    }
}

TEST_CASE("multi-start equilibria") {
    const Graph k3 = Graph::complete(3);

    SUBCASE("winner-takes-all yields the single point ((0.5)1, 0)") {
        MultiStartOptions opt;
        opt.n_seeds = 20;
        opt.rng_seed = 5;
        const EquilibriumSet set =
            multi_start_equilibria(VirusParams(1.0, 1.0), VirusParams(0.75, 1.0), k3, k3, opt);
        CHECK(set.failures.empty());
        REQUIRE(set.points.size() == 1);
        const EquilibriumPoint& pt = set.points.front();
        CHECK(pt.seeds.size() == 20);
        CHECK(pt.residual < 1e-10);
        CHECK(pt.stability == StabilityVerdict::Stable);
        for (double v : pt.state.x) CHECK(v == doctest::Approx(0.5).epsilon(1e-10));
        for (double v : pt.state.y) CHECK(v == 0.0);
    }

    SUBCASE("below both thresholds only the origin remains") {
        MultiStartOptions opt;
        opt.n_seeds = 20;
        opt.rng_seed = 6;
        const EquilibriumSet set =
            multi_start_equilibria(VirusParams(0.4, 1.0), VirusParams(0.4, 1.0), k3, k3, opt);
        CHECK(set.failures.empty());
        REQUIRE(set.points.size() == 1);
        for (double v : set.points.front().state.x) CHECK(v == 0.0);
        for (double v : set.points.front().state.y) CHECK(v == 0.0);
    }

    SUBCASE("deterministic for a fixed seed") {
        MultiStartOptions opt;
        opt.n_seeds = 6;
        opt.rng_seed = 99;
        const auto s1 =
            multi_start_equilibria(VirusParams(1.0, 1.0), VirusParams(0.75, 1.0), k3, k3, opt);
        const auto s2 =
            multi_start_equilibria(VirusParams(1.0, 1.0), VirusParams(0.75, 1.0), k3, k3, opt);
        REQUIRE(s1.points.size() == s2.points.size());
        for (std::size_t i = 0; i < s1.points.size(); ++i) {
            CHECK(s1.points[i].state.x == s2.points[i].state.x);
            CHECK(s1.points[i].state.y == s2.points[i].state.y);
        }
    }
}

TEST_CASE("coexistence: star vs cycle") {
    // Virus 1 on the star, Virus 2 on the cycle; taus chosen so both
    // refined threshold products clear 1 (checked below, not assumed)
    const Graph a = Graph::star(10);
    const Graph b = Graph::cycle(10);
    const VirusParams p1 = VirusParams::from_tau(0.55);
    const VirusParams p2 = VirusParams::from_tau(0.75);

    const SisFixedPoint fx = sis_fixed_point(p1, a);
    const SisFixedPoint fy = sis_fixed_point(p2, b);
    REQUIRE(fx.regime == SisRegime::Endemic);
    REQUIRE(fy.regime == SisRegime::Endemic);
    std::vector<double> sy(10), sx(10);
    for (int i = 0; i < 10; ++i) {
        sy[i] = 1.0 - fy.x_star[i];
        sx[i] = 1.0 - fx.x_star[i];
    }
    REQUIRE(p1.tau() * scaled_spectral(sy, a) > 1.02);
    REQUIRE(p2.tau() * scaled_spectral(sx, b) > 1.02);

    MultiStartOptions opt;
    opt.n_seeds = 12;
    opt.rng_seed = 17;
    const EquilibriumSet set = multi_start_equilibria(p1, p2, a, b, opt);
    CHECK(set.failures.empty());
    REQUIRE(!set.points.empty());
    for (const EquilibriumPoint& pt : set.points) {
        CHECK(pt.residual < 1e-8);
        for (std::size_t i = 0; i < 10; ++i) {
            CHECK(pt.state.x[i] > 1e-3);
            CHECK(pt.state.y[i] > 1e-3);
            // southeast sandwich (0, y*) <=_K (x_e, y_e) <=_K (x*, 0)
            CHECK(pt.state.x[i] <= fx.x_star[i] + 1e-8);
            CHECK(pt.state.y[i] <= fy.x_star[i] + 1e-8);
        }
        // independent residual check through the public field
        const auto [dx, dy] = bivirus_field(pt.state, p1, p2, a, b);
        for (double v : dx) CHECK(std::fabs(v) < 1e-8);
        for (double v : dy) CHECK(std::fabs(v) < 1e-8);
    }
}

TEST_CASE("limit sets depend on the rates only through tau") {
    const Graph a = Graph::star(10);
    const Graph b = Graph::cycle(10);
    MultiStartOptions opt;
    opt.n_seeds = 5;
    opt.rng_seed = 23;
    const EquilibriumSet base =
        multi_start_equilibria(VirusParams(0.55, 1.0), VirusParams(0.75, 1.0), a, b, opt);
    const EquilibriumSet scaled =
        multi_start_equilibria(VirusParams(0.55 * 3.0, 3.0), VirusParams(0.75 * 3.0, 3.0), a, b,
                               opt);
    REQUIRE(base.points.size() == scaled.points.size());
    for (std::size_t i = 0; i < base.points.size(); ++i)
        CHECK(testing::state_distance(base.points[i].state, scaled.points[i].state) < 1e-8);
}

TEST_CASE("avg projection") {
    BiVirusState s = BiVirusState::zero(3);
    CHECK(avg_projection(s) == std::pair<double, double>{0.0, 0.0});

    s.x.assign(3, 0.5);
    const auto [ax, ay] = avg_projection(s);
    CHECK(ax == doctest::Approx(0.5));
    CHECK(ay == 0.0);

    BiVirusState t = BiVirusState::zero(3);
    t.x = {1.0, 0.0, 0.0};
    t.y = {0.0, 1.0, 0.0};
    const auto [bx, by] = avg_projection(t);
    CHECK(bx == doctest::Approx(1.0 / 3.0));
    CHECK(by == doctest::Approx(1.0 / 3.0));
}
