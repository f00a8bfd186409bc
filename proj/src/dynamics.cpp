#include "chaossep/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace chaossep {

namespace {

constexpr double kMinimalityTol = 1e-6;   // reject if a divisor period matches this closely
constexpr double kClosureTol = 1e-7;      // orbit must close this tightly
constexpr double kGroupingTol = 1e-6;     // merge fixed points into traversed trajectories

std::vector<int> proper_divisors(int n) {
    std::vector<int> out;
    for (int k = 1; k < n; ++k)
        if (n % k == 0) out.push_back(k);
    return out;
}

}  // namespace

SharkovskyKey SharkovskyKey::of(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("SharkovskyKey: n must be positive");
    SharkovskyKey key;
    key.two_power = 0;
    while (n % 2 == 0) {
        n /= 2;
        ++key.two_power;
    }
    key.odd_part = n;
    return key;
}

std::uint64_t SharkovskyKey::value() const {
    return odd_part << two_power;
}

SharkOrder sharkovsky_compare(std::uint64_t a, std::uint64_t b) {
    if (a == 0 || b == 0)
        throw std::invalid_argument("sharkovsky_compare: inputs must be positive");
    if (a == b) return SharkOrder::Equal;
    const SharkovskyKey ka = SharkovskyKey::of(a);
    const SharkovskyKey kb = SharkovskyKey::of(b);
    const bool pow2_a = ka.odd_part == 1;
    const bool pow2_b = kb.odd_part == 1;
    if (pow2_a && pow2_b)  // tail of the ordering: ... > 8 > 4 > 2 > 1
        return ka.two_power > kb.two_power ? SharkOrder::LeftGreater
                                           : SharkOrder::RightGreater;
    if (pow2_a) return SharkOrder::RightGreater;
    if (pow2_b) return SharkOrder::LeftGreater;
    if (ka.two_power != kb.two_power)
        return ka.two_power < kb.two_power ? SharkOrder::LeftGreater
                                           : SharkOrder::RightGreater;
    return ka.odd_part < kb.odd_part ? SharkOrder::LeftGreater
                                     : SharkOrder::RightGreater;
}

std::vector<std::uint64_t> sharkovsky_implied(std::uint64_t n, std::uint64_t limit) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t m = 1; m <= limit; ++m) {
        if (m == n || sharkovsky_compare(n, m) == SharkOrder::LeftGreater)
            out.push_back(m);
    }
    return out;
}

PeriodScan detect_periods(const PLFunction& f, int max_period,
                          std::size_t piece_budget) {
    if (max_period < 1)
        throw std::invalid_argument("detect_periods: max_period must be >= 1");
    f.require_self_map();

    PeriodScan scan;
    PLFunction fn = f;
    for (int n = 1; n <= max_period; ++n) {
        if (n > 1) {
            try {
                fn = compose(f, fn, piece_budget);
            } catch (const BudgetError&) {
                throw BudgetError("detect_periods: piece budget exceeded at period " +
                                      std::to_string(n),
                                  n);
            }
        }
        const FixedPointSet fps = fixed_points(fn);
        const std::vector<int> divisors = proper_divisors(n);

        for (const auto& seg : fps.continuum_segments) {
            // A continuum of f^n belongs to period n only if some probe point
            // is not already fixed by a proper-divisor iterate.
            const double probes[3] = {seg.first + (seg.second - seg.first) / 3.0,
                                      0.5 * (seg.first + seg.second),
                                      seg.first + 2.0 * (seg.second - seg.first) / 3.0};
            for (double probe : probes) {
                bool divisor_fixed = false;
                for (int k : divisors) {
                    if (std::abs(iterate_eval(f, k, probe) - probe) <= kMinimalityTol) {
                        divisor_fixed = true;
                        break;
                    }
                }
                if (!divisor_fixed) {
                    scan.continuum_periods.insert(n);
                    break;
                }
            }
        }

        std::vector<double> consumed;
        auto is_consumed = [&consumed](double v) {
            for (double c : consumed)
                if (std::abs(c - v) <= kGroupingTol) return true;
            return false;
        };

        for (double x0 : fps.points) {
            if (is_consumed(x0)) continue;
            bool minimal = true;
            for (int k : divisors) {
                if (std::abs(iterate_eval(f, k, x0) - x0) <= kMinimalityTol) {
                    minimal = false;
                    break;
                }
            }
            if (!minimal) continue;

            Orbit orbit;
            orbit.period = n;
            orbit.points.reserve(static_cast<std::size_t>(n));
            double z = x0;
            for (int i = 0; i < n; ++i) {
                orbit.points.push_back(z);
                consumed.push_back(z);
                z = iterate_eval(f, 1, z);
            }
            orbit.closure_residual = std::abs(z - x0);
            if (orbit.closure_residual > kClosureTol) continue;

            bool distinct = true;
            for (std::size_t i = 0; i < orbit.points.size() && distinct; ++i)
                for (std::size_t j = i + 1; j < orbit.points.size(); ++j)
                    if (std::abs(orbit.points[i] - orbit.points[j]) <= kGroupingTol) {
                        distinct = false;
                        break;
                    }
            if (!distinct) continue;

            // Canonical rotation: start the cycle at its smallest point.
            const auto mn = std::min_element(orbit.points.begin(), orbit.points.end());
            std::rotate(orbit.points.begin(), mn, orbit.points.end());
            scan.orbits[n].push_back(std::move(orbit));
        }
    }
    return scan;
}

PrimePeriodResult prime_period_up_to(const PLFunction& f, int max_period,
                                     std::size_t piece_budget) {
    const PeriodScan scan = detect_periods(f, max_period, piece_budget);
    std::uint64_t best = 0;
    auto consider = [&best](int n) {
        const auto un = static_cast<std::uint64_t>(n);
        if (best == 0 || sharkovsky_compare(un, best) == SharkOrder::LeftGreater)
            best = un;
    };
    for (const auto& [n, orbits] : scan.orbits)
        if (!orbits.empty()) consider(n);
    for (int n : scan.continuum_periods) consider(n);
    if (best == 0)
        throw std::runtime_error("prime_period_up_to: no periods found (not a self-map?)");
    return {SharkovskyKey::of(best), max_period};
}

LabeledCycle stefan_label(const Orbit& orbit) {
    const int p = orbit.period;
    if (p <= 1 || p % 2 == 0)
        throw std::invalid_argument("stefan_label: period must be odd and > 1");
    if (static_cast<int>(orbit.points.size()) != p)
        throw std::invalid_argument("stefan_label: orbit size does not match period");

    std::vector<double> sorted = orbit.points;
    std::sort(sorted.begin(), sorted.end());

    // Sorted position (1-indexed) of x_1 is (p+1)/2; odd labels descend to the
    // left of it, even labels ascend to the right.
    LabeledCycle cycle;
    cycle.p = p;
    cycle.x.assign(static_cast<std::size_t>(p), 0.0);
    const int mid = (p + 1) / 2;
    for (int j = 0; 2 * j + 1 <= p; ++j)
        cycle.x[static_cast<std::size_t>(2 * j)] = sorted[static_cast<std::size_t>(mid - j - 1)];
    for (int j = 1; 2 * j <= p - 1; ++j)
        cycle.x[static_cast<std::size_t>(2 * j - 1)] = sorted[static_cast<std::size_t>(mid + j - 1)];
    return cycle;
}

SignPatternResult orbit_sign_pattern_check(const std::vector<double>& orbit_from_zero,
                                           double rho) {
    const int p = static_cast<int>(orbit_from_zero.size());
    if (p < 3) return {false, "orbit has fewer than 3 points"};
    if (std::abs(orbit_from_zero[0]) > 1e-12) return {false, "z0 != 0"};

    // z_0 .. z_p with z_p = f(z_{p-1}).
    std::vector<double> z = orbit_from_zero;
    z.push_back(rho * std::abs(z.back()) - 1.0);

    if (std::abs(z[1] + 1.0) > 1e-9) return {false, "z1 != -1"};
    if (!(z[2] > 0.0) || std::abs(z[2] - (rho - 1.0)) > 1e-9)
        return {false, "z2 != rho - 1 > 0"};
    for (int t = 3; t <= p - 1; ++t) {
        if (z[static_cast<std::size_t>(t)] > 1e-9)
            return {false, "z" + std::to_string(t) + " > 0"};
    }
    if (std::abs(z[static_cast<std::size_t>(p)]) > kClosureTol)
        return {false, "z_p != 0 (orbit does not close)"};

    for (int t = 3; t + 2 <= p; t += 2) {
        if (!(z[static_cast<std::size_t>(t)] < z[static_cast<std::size_t>(t + 2)]))
            return {false, "odd chain violated at z" + std::to_string(t)};
    }
    for (int t = 2; t + 2 <= p - 1; t += 2) {
        if (!(z[static_cast<std::size_t>(t)] > z[static_cast<std::size_t>(t + 2)]))
            return {false, "even chain violated at z" + std::to_string(t)};
    }
    if (p >= 5 && !(z[static_cast<std::size_t>(p - 1)] > -1.0))
        return {false, "z_{p-1} <= -1"};
    return {true, {}};
}

}  // namespace chaossep
