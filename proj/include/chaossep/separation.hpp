#ifndef CHAOSSEP_SEPARATION_HPP
#define CHAOSSEP_SEPARATION_HPP

#include <optional>
#include <string>
#include <vector>

#include "chaossep/bigint.hpp"
#include "chaossep/pl_function.hpp"

namespace chaossep {

/// The tight family rho_p |x| - 1 on [-1, 1]; validates that the orbit of 0
/// closes at step p within 1e-7.
PLFunction hard_family(int p);

/// rho |x| - 1 on [-1, 1] for an arbitrary slope (must stay a self-map).
PLFunction slope_family(double rho);

/// 2|x| - 1 on [-1, 1].
PLFunction tent_map();

/// (2u)^l, exactly.
BigUInt capacity(int u, int l);

struct SeparationConfig {
    double rho = 0.0;  // oscillation growth rate
    double L = 0.0;    // Lipschitz constant (the theorem wants L = rho)
    int t = 1;         // compositions
    int u = 1;         // units per layer
    int l = 1;         // layers
    double x = 0.0;    // crossing levels, x < y
    double y = 0.0;
    double domain_lo = -1.0;
    double domain_hi = 1.0;
};

struct SeparationReport {
    BigUInt capacity;
    bool condition_met = false;   // (2u)^l <= rho^t / 8
    double floor_headline = 0.0;  // (y-x)^2 / 32 when the theorem applies
    double floor_refined = 0.0;   // N (y-x)^2 / (16 L^t) * (1 - 2 capacity / N)
    long long crossings_used = 0;
    bool crossings_measured = false;
    std::string warning;
};

/// Evaluates the L1 separation bound. When a measured crossing count is
/// supplied it replaces the idealized ceil(rho^t) in the refined floor.
SeparationReport theory_bound(const SeparationConfig& cfg,
                              std::optional<long long> crossings = std::nullopt);

/// One interval of the alternating partition used by the per-interval
/// integral bound, with its exact integral of |h - (x+y)/2|.
struct PartitionInterval {
    double lo = 0.0;
    double hi = 0.0;
    char level = 'x';  // which level the interval's image touches
    double integral = 0.0;
    double ratio = 0.0;  // integral / ((y-x)^2 / (8 L^t))
};

struct IntervalIntegralReport {
    std::vector<PartitionInterval> intervals;
    double bound = 0.0;      // (y-x)^2 / (8 L^t)
    double min_ratio = 0.0;  // 0 when no qualifying interval exists

    bool all_satisfied(double slack = 1e-9) const {
        return !intervals.empty() && min_ratio >= 1.0 - slack;
    }
};

/// Builds the maximal alternating collection of threshold-pieces of h whose
/// image touches x or y, and integrates |h - (x+y)/2| exactly over each.
IntervalIntegralReport interval_integral_check(const PLFunction& h, double x,
                                               double y, double L_t);

/// Smallest t with (2u)^l <= rho^t / 8, i.e.
/// ceil(((l+3) ln 2 + l ln u) / ln rho).
int min_compositions(int l, int u, double rho);

}  // namespace chaossep

#endif
