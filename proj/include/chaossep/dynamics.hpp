#ifndef CHAOSSEP_DYNAMICS_HPP
#define CHAOSSEP_DYNAMICS_HPP

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "chaossep/pl_function.hpp"

namespace chaossep {

/// A candidate periodic cycle in trajectory order: points[i+1] = f(points[i]).
struct Orbit {
    std::vector<double> points;
    int period = 0;
    double closure_residual = 0.0;  // |f(points[p-1]) - points[0]|
};

/// n = 2^two_power * odd_part with odd_part odd.
struct SharkovskyKey {
    std::uint64_t odd_part = 1;
    int two_power = 0;

    static SharkovskyKey of(std::uint64_t n);
    std::uint64_t value() const;
};

enum class SharkOrder { LeftGreater, RightGreater, Equal };

/// Total Sharkovsky ordering: 3 > 5 > 7 > ... > 2*3 > 2*5 > ... > 8 > 4 > 2 > 1.
/// LeftGreater means a comes before b (a forces b).
SharkOrder sharkovsky_compare(std::uint64_t a, std::uint64_t b);

/// All periods n' <= limit forced by period n (including n itself), ascending.
std::vector<std::uint64_t> sharkovsky_implied(std::uint64_t n, std::uint64_t limit);

struct PeriodScan {
    std::map<int, std::vector<Orbit>> orbits;
    /// Periods realized by an interval of periodic points (e.g. the identity)
    /// rather than isolated cycles.
    std::set<int> continuum_periods;

    bool has_period(int n) const {
        auto it = orbits.find(n);
        return (it != orbits.end() && !it->second.empty()) ||
               continuum_periods.count(n) > 0;
    }
};

/// Enumerate periodic orbits of minimal period n for every n <= max_period,
/// via fixed points of the exact composition f^n.
PeriodScan detect_periods(const PLFunction& f, int max_period,
                          std::size_t piece_budget = kDefaultPieceBudget);

struct PrimePeriodResult {
    SharkovskyKey key;
    int searched_up_to;  // true prime period may exceed the search budget
};

/// Sharkovsky-greatest period found by a scan up to max_period.
PrimePeriodResult prime_period_up_to(const PLFunction& f, int max_period,
                                     std::size_t piece_budget = kDefaultPieceBudget);

/// Cycle points labeled by spatial rank so that
/// x_p < x_{p-2} < ... < x_3 < x_1 < x_2 < x_4 < ... < x_{p-1}.
struct LabeledCycle {
    int p = 0;
    std::vector<double> x;  // x[k-1] holds the point labeled x_k

    double point(int label) const { return x.at(static_cast<std::size_t>(label - 1)); }
};

/// Requires an odd period > 1; labels by spatial rank.
LabeledCycle stefan_label(const Orbit& orbit);

struct SignPatternResult {
    bool ok = false;
    std::string violated;  // first violated clause when !ok

    explicit operator bool() const { return ok; }
};

/// Checks the hard-family orbit shape for f = rho|x| - 1 started at z0 = 0:
/// z1 = -1, z2 = rho - 1 > 0, z_t <= 0 for 3 <= t <= p-1, and the chains
/// z3 < z5 < ... < z_p = 0 and z2 > z4 > ... > z_{p-1} > -1.
SignPatternResult orbit_sign_pattern_check(const std::vector<double>& orbit_from_zero,
                                           double rho);

}  // namespace chaossep

#endif
