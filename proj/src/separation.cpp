#include "chaossep/separation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "chaossep/rates.hpp"

namespace chaossep {

namespace {

constexpr double kLevelTol = 1e-9;

double integral_abs_minus(const PLFunction& h, double lo, double hi, double c) {
    // Exact integral of |h - c| over [lo, hi]: trapezoids split at sign
    // changes of h - c.
    std::vector<double> xs{lo};
    const auto& ks = h.knots();
    auto it = std::upper_bound(ks.begin(), ks.end(), lo,
                               [](double v, const Knot& k) { return v < k.x; });
    for (; it != ks.end() && it->x < hi; ++it) xs.push_back(it->x);
    xs.push_back(hi);

    double total = 0.0;
    double d0 = h.eval(xs[0]) - c;
    for (std::size_t i = 1; i < xs.size(); ++i) {
        const double w = xs[i] - xs[i - 1];
        const double d1 = h.eval(xs[i]) - c;
        if ((d0 >= 0.0 && d1 >= 0.0) || (d0 <= 0.0 && d1 <= 0.0)) {
            total += 0.5 * w * (std::abs(d0) + std::abs(d1));
        } else {
            const double s = w * d0 / (d0 - d1);
            total += 0.5 * (std::abs(d0) * s + std::abs(d1) * (w - s));
        }
        d0 = d1;
    }
    return total;
}

}  // namespace

PLFunction slope_family(double rho) {
    if (!(rho > 0.0) || rho > 2.0)
        throw std::invalid_argument("slope_family: slope must lie in (0, 2]");
    return make_pl({{-1.0, rho - 1.0}, {0.0, -1.0}, {1.0, rho - 1.0}});
}

PLFunction tent_map() { return slope_family(2.0); }

PLFunction hard_family(int p) {
    const double r = rho(p).rho;
    PLFunction f = slope_family(r);
    f.require_self_map();
    const double residual = std::abs(iterate_eval(f, p, 0.0));
    if (residual > 1e-7)
        throw std::runtime_error(
            "hard_family: orbit of 0 fails to close at step " + std::to_string(p) +
            " (residual " + std::to_string(residual) + "); root inaccuracy");
    return f;
}

BigUInt capacity(int u, int l) {
    if (u < 1 || l < 1)
        throw std::invalid_argument("capacity: u and l must be >= 1");
    BigUInt c(1);
    for (int i = 0; i < l; ++i) c.mul_small(2ull * static_cast<unsigned long long>(u));
    return c;
}

SeparationReport theory_bound(const SeparationConfig& cfg,
                              std::optional<long long> crossings) {
    if (!(cfg.x < cfg.y)) throw std::invalid_argument("theory_bound: requires x < y");
    if (cfg.t < 1 || cfg.u < 1 || cfg.l < 1)
        throw std::invalid_argument("theory_bound: t, u, l must be >= 1");
    if (!(cfg.rho > 1.0)) throw std::invalid_argument("theory_bound: rho must exceed 1");
    if (cfg.L < cfg.rho - 1e-9)
        throw std::invalid_argument("theory_bound: L < rho contradicts the Lipschitz lower bound");

    SeparationReport report;
    report.capacity = capacity(cfg.u, cfg.l);

    const long double rho_t = std::pow(static_cast<long double>(cfg.rho), cfg.t);
    report.condition_met = report.capacity.fits_below(rho_t / 8.0L);

    const double gap = cfg.y - cfg.x;
    const bool matched = std::abs(cfg.L - cfg.rho) <= 1e-9;
    if (report.condition_met && matched) {
        report.floor_headline = gap * gap / 32.0;
    } else {
        report.floor_headline = 0.0;
        if (cfg.L > cfg.rho + 1e-9)
            report.warning =
                "L > rho: the factor (rho/L)^t shrinks with t; no meaningful L1 guarantee";
    }

    long double n;
    if (crossings) {
        if (*crossings < 1)
            throw std::invalid_argument("theory_bound: crossings must be >= 1");
        n = static_cast<long double>(*crossings);
        report.crossings_used = *crossings;
        report.crossings_measured = true;
    } else {
        n = std::ceil(rho_t);
        constexpr long long kMaxLL = std::numeric_limits<long long>::max();
        report.crossings_used =
            n < static_cast<long double>(kMaxLL) ? static_cast<long long>(n) : kMaxLL;
        report.crossings_measured = false;
    }

    const long double L_t = std::pow(static_cast<long double>(cfg.L), cfg.t);
    const long double cap = report.capacity.to_double();
    report.floor_refined = static_cast<double>(
        std::max(0.0L, n * gap * gap / (16.0L * L_t) * (1.0L - 2.0L * cap / n)));
    return report;
}

IntervalIntegralReport interval_integral_check(const PLFunction& h, double x,
                                               double y, double L_t) {
    if (!(x < y)) throw std::invalid_argument("interval_integral_check: requires x < y");
    if (!(L_t > 0.0))
        throw std::invalid_argument("interval_integral_check: L_t must be positive");

    const double mid = 0.5 * (x + y);
    IntervalIntegralReport report;
    report.bound = (y - x) * (y - x) / (8.0 * L_t);

    // Split the domain where h crosses the midlevel; on each piece the
    // thresholded h is constant.
    std::vector<double> cuts{h.domain_lo()};
    const auto& ks = h.knots();
    for (std::size_t i = 0; i + 1 < ks.size(); ++i) {
        const double d0 = ks[i].y - mid;
        const double d1 = ks[i + 1].y - mid;
        if ((d0 > 0.0 && d1 < 0.0) || (d0 < 0.0 && d1 > 0.0))
            cuts.push_back(ks[i].x + (ks[i + 1].x - ks[i].x) * d0 / (d0 - d1));
        else if (d1 == 0.0 && i + 2 < ks.size()) {
            const double d2 = ks[i + 2].y - mid;
            if ((d0 > 0.0 && d2 < 0.0) || (d0 < 0.0 && d2 > 0.0))
                cuts.push_back(ks[i + 1].x);
        }
    }
    cuts.push_back(h.domain_hi());
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    // Qualifying pieces: the image touches y on a high piece, x on a low one.
    struct Piece {
        double lo, hi;
        char level;
    };
    std::vector<Piece> qualifying;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double lo = cuts[i], hi = cuts[i + 1];
        if (!(hi > lo)) continue;
        const auto [vmin, vmax] = h.image(lo, hi);
        const bool high = 0.5 * (vmin + vmax) >= mid;
        const bool touches_y = vmin <= y + kLevelTol && vmax >= y - kLevelTol;
        const bool touches_x = vmin <= x + kLevelTol && vmax >= x - kLevelTol;
        if (high && touches_y)
            qualifying.push_back({lo, hi, 'y'});
        else if (!high && touches_x)
            qualifying.push_back({lo, hi, 'x'});
    }

    // Maximal alternating sub-collection: greedily keep the first piece of
    // each run of equal levels.
    char last = 0;
    for (const Piece& piece : qualifying) {
        if (piece.level == last) continue;
        last = piece.level;
        PartitionInterval iv;
        iv.lo = piece.lo;
        iv.hi = piece.hi;
        iv.level = piece.level;
        iv.integral = integral_abs_minus(h, piece.lo, piece.hi, mid);
        iv.ratio = iv.integral / report.bound;
        report.intervals.push_back(iv);
    }

    if (!report.intervals.empty()) {
        report.min_ratio = report.intervals.front().ratio;
        for (const PartitionInterval& iv : report.intervals)
            report.min_ratio = std::min(report.min_ratio, iv.ratio);
    }
    return report;
}

int min_compositions(int l, int u, double rho) {
    if (!(rho > 1.0)) throw std::invalid_argument("min_compositions: rho must exceed 1");
    if (l < 1 || u < 1)
        throw std::invalid_argument("min_compositions: l and u must be >= 1");
    const double value =
        ((l + 3) * std::log(2.0) + l * std::log(static_cast<double>(u))) / std::log(rho);
    // Guard against ties landing one ulp above an integer.
    return static_cast<int>(std::ceil(value - 1e-9));
}

}  // namespace chaossep
