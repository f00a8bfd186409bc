#ifndef CHAOSSEP_PL_FUNCTION_HPP
#define CHAOSSEP_PL_FUNCTION_HPP

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace chaossep {

struct Knot {
    double x;
    double y;
};

/// Number of knots an exact composition may allocate before callers must fall
/// back to pointwise iteration. Override with CHAOS_SEP_PIECE_BUDGET.
inline constexpr std::size_t kDefaultPieceBudget = 5'000'000;

std::size_t piece_budget_from_env();

/// Raised when an exact composition would exceed the knot budget. Carries the
/// first composition step that failed (0 when not applicable).
class BudgetError : public std::runtime_error {
public:
    BudgetError(const std::string& what, int failing_step)
        : std::runtime_error(what), failing_step_(failing_step) {}
    int failing_step() const { return failing_step_; }

private:
    int failing_step_;
};

/// Continuous piecewise-linear function on a closed interval, represented by
/// its breakpoints. Knots are strictly increasing in x; the first and last
/// knots define the domain. Values between knots interpolate linearly.
/// Immutable after construction.
class PLFunction {
public:
    explicit PLFunction(std::vector<Knot> knots);

    double domain_lo() const { return knots_.front().x; }
    double domain_hi() const { return knots_.back().x; }
    const std::vector<Knot>& knots() const { return knots_; }
    std::size_t piece_count() const { return knots_.size() - 1; }

    /// Exact at knots; linear interpolation inside segments.
    /// Throws std::domain_error outside [domain_lo, domain_hi].
    double eval(double x) const;

    double min_value() const;
    double max_value() const;

    /// Exact range of f over [lo, hi] (a sub-interval of the domain).
    std::pair<double, double> image(double lo, double hi) const;

    bool is_self_map(double eps = 1e-9) const;
    void require_self_map(double eps = 1e-9) const;

private:
    std::vector<Knot> knots_;
};

/// Convenience builders.
PLFunction make_pl(std::initializer_list<Knot> knots);
PLFunction identity_pl(double lo, double hi);

/// Exact PL representation of outer(inner(x)). Breakpoints are inner's knots
/// plus every preimage under inner of an outer breakpoint. Requires
/// range(inner) inside domain(outer) up to 1e-9 (overshoot is clamped).
PLFunction compose(const PLFunction& outer, const PLFunction& inner,
                   std::size_t piece_budget = kDefaultPieceBudget);

/// Exact PL form of f composed with itself t times (t >= 1).
PLFunction self_compose(const PLFunction& f, int t,
                        std::size_t piece_budget = kDefaultPieceBudget);

/// Pointwise t-fold iteration (t >= 0); the fallback when exact composition
/// exceeds the budget. Iterates are clamped into the domain up to 1e-9.
double iterate_eval(const PLFunction& f, int t, double x);

/// Maximum absolute slope over all segments.
double lipschitz(const PLFunction& f);

/// Number of oscillations of f across the levels x < y: one less than the
/// length of the longest alternating x,y,x,... subsequence of level hits in
/// domain order. Touching a level counts as a hit; a hit is recognized up to
/// level_tol so that exact-arithmetic tangencies survive double rounding.
int count_crossings(const PLFunction& f, double x, double y,
                    double level_tol = 1e-9);

/// Exact integral of |f - g| over the common domain.
double l1_distance(const PLFunction& f, const PLFunction& g);

/// Fraction of points where the threshold indicators of f and g disagree.
double classification_distance(const PLFunction& f, const PLFunction& g,
                               double threshold, std::span<const double> points);

struct FixedPointSet {
    std::vector<double> points;  // isolated solutions of f(x) = x
    /// Segments where f(x) = x identically; their endpoints are reported
    /// here instead of being enumerated as isolated roots.
    std::vector<std::pair<double, double>> continuum_segments;
    bool has_continuum() const { return !continuum_segments.empty(); }
};

/// All solutions of f(x) = x, one per segment where f(x) - x changes sign,
/// deduplicated within 1e-7. Identically-zero segments are flagged.
FixedPointSet fixed_points(const PLFunction& f);

}  // namespace chaossep

#endif
