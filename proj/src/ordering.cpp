#include "bivirus/ordering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "bivirus/errors.hpp"

namespace bivirus {

namespace {

constexpr double kStrictMargin = 1e-12;

bool interior(const BiVirusState& s) {
    for (std::size_t i = 0; i < s.x.size(); ++i)
        if (!(s.x[i] > 0.0 && s.y[i] > 0.0 && s.x[i] + s.y[i] < 1.0)) return false;
    return true;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

double uniform01(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

} // namespace

bool leq_holds(OrderingRelation r) {
    return r == OrderingRelation::Equal || r == OrderingRelation::Leq ||
           r == OrderingRelation::Lt || r == OrderingRelation::Ll;
}

bool lt_holds(OrderingRelation r) {
    return r == OrderingRelation::Lt || r == OrderingRelation::Ll;
}

bool ll_holds(OrderingRelation r) { return r == OrderingRelation::Ll; }

OrderingRelation se_compare(const BiVirusState& s1, const BiVirusState& s2) {
    const std::size_t n = s1.x.size();
    if (s1.y.size() != n || s2.x.size() != n || s2.y.size() != n)
        throw DimensionMismatchError("states have different lengths");

    bool equal = true, leq = true, strict = true;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = s2.x[i] - s1.x[i];   // wants >= 0
        const double dy = s1.y[i] - s2.y[i];   // wants >= 0
        if (dx != 0.0 || dy != 0.0) equal = false;
        if (dx < 0.0 || dy < 0.0) leq = false;
        if (dx <= kStrictMargin || dy <= kStrictMargin) strict = false;
    }
    if (equal) return OrderingRelation::Equal;
    if (!leq) return OrderingRelation::Incomparable;
    return strict ? OrderingRelation::Ll : OrderingRelation::Lt;
}

bool kamke_check(const JacobianMatrix& j) {
    const std::size_t n = j.n;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            if (i != k && (j.block(0, 0, i, k) < 0.0 || j.block(1, 1, i, k) < 0.0)) return false;
            if (j.block(0, 1, i, k) > 0.0 || j.block(1, 0, i, k) > 0.0) return false;
        }
    return true;
}

TrialResult monotonicity_trial(const BiVirusState& s1, const BiVirusState& s2,
                               const VirusParams& p1, const VirusParams& p2, const Graph& a,
                               const Graph& b, const std::vector<double>& sample_times,
                               const IntegrateOptions& opt) {
    const OrderingRelation initial = se_compare(s1, s2);
    if (!leq_holds(initial))
        throw std::invalid_argument("initial states are not ordered s1 <=_K s2");
    if (sample_times.empty()) throw std::invalid_argument("no sample times");
    if (!std::is_sorted(sample_times.begin(), sample_times.end()) ||
        sample_times.front() <= 0.0)
        throw std::invalid_argument("sample times must be positive and ascending");

    const Trajectory ta = integrate_sampled(s1, p1, p2, a, b, sample_times, opt);
    const Trajectory tb = integrate_sampled(s2, p1, p2, a, b, sample_times, opt);

    // both trajectories contain exactly t=0 plus every requested sample,
    // except for an extra early-exit instant; index by time
    auto state_at = [](const Trajectory& t, double when) -> const BiVirusState& {
        for (std::size_t i = 0; i < t.times.size(); ++i)
            if (t.times[i] == when) return t.states[i];
        throw std::logic_error("sample time missing from trajectory");
    };

    TrialResult result;
    result.initial = initial;
    result.times = sample_times;
    result.min_strict_margin = std::numeric_limits<double>::infinity();
    result.max_leq_violation = -std::numeric_limits<double>::infinity();

    const bool expect_strict =
        lt_holds(initial) && interior(s1) && interior(s2);

    bool pass = true;
    for (double when : sample_times) {
        const BiVirusState& ua = state_at(ta, when);
        const BiVirusState& ub = state_at(tb, when);
        const OrderingRelation rel = se_compare(ua, ub);
        result.relations.push_back(rel);

        double margin = std::numeric_limits<double>::infinity();
        double violation = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < ua.x.size(); ++i) {
            const double dx = ub.x[i] - ua.x[i];
            const double dy = ua.y[i] - ub.y[i];
            margin = std::min({margin, dx, dy});
            violation = std::max({violation, -dx, -dy});
        }
        result.min_strict_margin = std::min(result.min_strict_margin, margin);
        result.max_leq_violation = std::max(result.max_leq_violation, violation);

        if (!leq_holds(rel)) pass = false;
        if (expect_strict && !ll_holds(rel)) pass = false;
    }
    result.pass = pass;
    return result;
}

std::pair<BiVirusState, BiVirusState>
sample_ordered_interior_pair(std::size_t n, std::uint64_t rng_seed, std::uint64_t pair_index) {
    std::mt19937_64 eng(splitmix64(rng_seed ^ splitmix64(pair_index + 0x5D417)));
    BiVirusState lo = BiVirusState::zero(n), hi = BiVirusState::zero(n);
    for (std::size_t i = 0; i < n; ++i) {
        // interior base point with room to move: x,y in [0.05, ~0.45]
        const double x = 0.05 + 0.4 * uniform01(eng);
        const double y = 0.05 + 0.4 * uniform01(eng);
        // hi moves southeast of lo by a strictly positive amount
        const double up = 0.01 + 0.04 * uniform01(eng);
        const double down = 0.01 + 0.04 * uniform01(eng);
        lo.x[i] = x;
        lo.y[i] = y;
        hi.x[i] = x + up;
        hi.y[i] = std::max(y - down, 0.005);
    }
    return {std::move(lo), std::move(hi)};
}

} // namespace bivirus
