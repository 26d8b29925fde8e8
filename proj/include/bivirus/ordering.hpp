#ifndef BIVIRUS_ORDERING_HPP
#define BIVIRUS_ORDERING_HPP

#include <cstdint>
#include <vector>

#include "bivirus/dynamics.hpp"
#include "bivirus/spectral.hpp"

namespace bivirus {

/// Relation of two states under the southeast cone-ordering generated by
/// K = R^N_+ x R^N_-: (x,y) <=_K (x',y') iff x <= x' and y >= y'
/// componentwise. Strength chain: Ll => Lt => Leq; Equal => Leq.
enum class OrderingRelation { Equal, Leq, Lt, Ll, Incomparable };

bool leq_holds(OrderingRelation r);
bool lt_holds(OrderingRelation r);
bool ll_holds(OrderingRelation r);

/// Strongest relation that holds for (s1, s2). Strict componentwise
/// inequalities only count with margin > 1e-12, to keep rounding noise
/// from faking the strict relation.
OrderingRelation se_compare(const BiVirusState& s1, const BiVirusState& s2);

/// Sign check of the southeast Kamke condition on a 2N x 2N Jacobian:
/// off-diagonal entries of the diagonal blocks >= 0, every entry of the
/// off-diagonal blocks <= 0. Diagonal entries are unconstrained.
bool kamke_check(const JacobianMatrix& j);

struct TrialResult {
    bool pass = false;
    OrderingRelation initial;
    std::vector<double> times;
    std::vector<OrderingRelation> relations;   // one per sample time
    double min_strict_margin = 0.0;            // over t > 0 samples, strict pairs only
    double max_leq_violation = 0.0;            // how far any component broke <=_K
};

/// Integrates both states with identical settings and compares them at
/// the given sample times. Passes when <=_K is preserved at every sample,
/// and additionally <<_K holds at every t > 0 sample whenever the initial
/// relation was strict (Lt or Ll) with both states interior to D.
TrialResult monotonicity_trial(const BiVirusState& s1, const BiVirusState& s2,
                               const VirusParams& p1, const VirusParams& p2, const Graph& a,
                               const Graph& b, const std::vector<double>& sample_times,
                               const IntegrateOptions& opt = {});

/// Deterministic generator of an ordered interior pair s_lo <<_K s_hi,
/// used by the monotone-test command and the property suites.
std::pair<BiVirusState, BiVirusState>
sample_ordered_interior_pair(std::size_t n, std::uint64_t rng_seed, std::uint64_t pair_index);

} // namespace bivirus

#endif
