#include "chaossep/pl_function.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

namespace chaossep {

namespace {

constexpr double kDomainEps = 1e-9;

double knot_merge_tol(double x) { return 1e-13 * std::max(1.0, std::abs(x)); }

}  // namespace

std::size_t piece_budget_from_env() {
    if (const char* env = std::getenv("CHAOS_SEP_PIECE_BUDGET")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end != env && v > 1) return static_cast<std::size_t>(v);
    }
    return kDefaultPieceBudget;
}

PLFunction::PLFunction(std::vector<Knot> knots) : knots_(std::move(knots)) {
    if (knots_.size() < 2)
        throw std::invalid_argument("PLFunction: need at least 2 knots");
    for (std::size_t i = 1; i < knots_.size(); ++i) {
        if (!(knots_[i - 1].x < knots_[i].x))
            throw std::invalid_argument("PLFunction: knot x values must be strictly increasing");
    }
    for (const Knot& k : knots_) {
        if (!std::isfinite(k.x) || !std::isfinite(k.y))
            throw std::invalid_argument("PLFunction: knots must be finite");
    }
}

double PLFunction::eval(double x) const {
    if (x < domain_lo() || x > domain_hi())
        throw std::domain_error("PLFunction::eval: x outside domain");
    // upper_bound: first knot with kx > x, so x lies in [knots[i-1], knots[i]]
    auto it = std::upper_bound(knots_.begin(), knots_.end(), x,
                               [](double v, const Knot& k) { return v < k.x; });
    std::size_t i = static_cast<std::size_t>(it - knots_.begin());
    if (i == knots_.size()) --i;  // x == domain_hi
    const Knot& k1 = knots_[i];
    const Knot& k0 = knots_[i - 1];
    if (x == k0.x) return k0.y;
    if (x == k1.x) return k1.y;
    const double t = (x - k0.x) / (k1.x - k0.x);
    return k0.y + t * (k1.y - k0.y);
}

double PLFunction::min_value() const {
    double m = knots_.front().y;
    for (const Knot& k : knots_) m = std::min(m, k.y);
    return m;
}

double PLFunction::max_value() const {
    double m = knots_.front().y;
    for (const Knot& k : knots_) m = std::max(m, k.y);
    return m;
}

std::pair<double, double> PLFunction::image(double lo, double hi) const {
    if (lo > hi) std::swap(lo, hi);
    double mn = eval(lo), mx = mn;
    const double vhi = eval(hi);
    mn = std::min(mn, vhi);
    mx = std::max(mx, vhi);
    auto it = std::upper_bound(knots_.begin(), knots_.end(), lo,
                               [](double v, const Knot& k) { return v < k.x; });
    for (; it != knots_.end() && it->x < hi; ++it) {
        mn = std::min(mn, it->y);
        mx = std::max(mx, it->y);
    }
    return {mn, mx};
}

bool PLFunction::is_self_map(double eps) const {
    return min_value() >= domain_lo() - eps && max_value() <= domain_hi() + eps;
}

void PLFunction::require_self_map(double eps) const {
    if (!is_self_map(eps))
        throw std::domain_error("PLFunction: not a self-map of its domain");
}

PLFunction make_pl(std::initializer_list<Knot> knots) {
    return PLFunction(std::vector<Knot>(knots));
}

PLFunction identity_pl(double lo, double hi) {
    return make_pl({{lo, lo}, {hi, hi}});
}

PLFunction compose(const PLFunction& outer, const PLFunction& inner,
                   std::size_t piece_budget) {
    const double olo = outer.domain_lo(), ohi = outer.domain_hi();
    if (inner.min_value() < olo - kDomainEps || inner.max_value() > ohi + kDomainEps)
        throw std::domain_error("compose: range of inner escapes domain of outer");

    const auto& ik = inner.knots();
    const auto& ok = outer.knots();

    std::vector<double> xs;
    xs.reserve(ik.size());
    for (const Knot& k : ik) xs.push_back(k.x);

    // Preimages under inner of outer breakpoints. Only values strictly inside
    // a segment's value range create new breakpoints; endpoint touches are
    // already inner knots.
    for (std::size_t i = 0; i + 1 < ik.size(); ++i) {
        const double x0 = ik[i].x, x1 = ik[i + 1].x;
        const double y0 = ik[i].y, y1 = ik[i + 1].y;
        if (y0 == y1) continue;  // flat: no strict-interior values
        const double lo = std::min(y0, y1), hi = std::max(y0, y1);
        auto first = std::upper_bound(ok.begin(), ok.end(), lo,
                                      [](double v, const Knot& k) { return v < k.x; });
        for (auto it = first; it != ok.end() && it->x < hi; ++it) {
            const double u = it->x;
            if (u <= lo || u >= hi) continue;
            xs.push_back(x0 + (u - y0) * (x1 - x0) / (y1 - y0));
        }
        if (xs.size() > piece_budget)
            throw BudgetError("compose: piece budget exceeded", 0);
    }

    std::sort(xs.begin(), xs.end());
    std::vector<double> merged;
    merged.reserve(xs.size());
    for (double x : xs) {
        if (merged.empty() || x - merged.back() > knot_merge_tol(x)) merged.push_back(x);
    }
    // domain endpoints must survive merging exactly
    merged.front() = inner.domain_lo();
    merged.back() = inner.domain_hi();

    if (merged.size() > piece_budget)
        throw BudgetError("compose: piece budget exceeded", 0);

    std::vector<Knot> out;
    out.reserve(merged.size());
    for (double x : merged) {
        double v = inner.eval(x);
        v = std::clamp(v, olo, ohi);  // absorb <=1e-9 overshoot checked above
        out.push_back({x, outer.eval(v)});
    }
    return PLFunction(std::move(out));
}

PLFunction self_compose(const PLFunction& f, int t, std::size_t piece_budget) {
    if (t < 1) throw std::invalid_argument("self_compose: t must be >= 1");
    f.require_self_map();
    PLFunction acc = f;
    for (int step = 2; step <= t; ++step) {
        try {
            acc = compose(f, acc, piece_budget);
        } catch (const BudgetError&) {
            throw BudgetError("self_compose: piece budget exceeded at t = " +
                                  std::to_string(step),
                              step);
        }
    }
    return acc;
}

double iterate_eval(const PLFunction& f, int t, double x) {
    if (t < 0) throw std::invalid_argument("iterate_eval: t must be >= 0");
    if (x < f.domain_lo() || x > f.domain_hi())
        throw std::domain_error("iterate_eval: x outside domain");
    const double lo = f.domain_lo(), hi = f.domain_hi();
    for (int k = 0; k < t; ++k) {
        x = f.eval(x);
        if (x < lo) {
            if (x < lo - kDomainEps)
                throw std::domain_error("iterate_eval: iterate escaped domain at step " +
                                        std::to_string(k + 1));
            x = lo;
        } else if (x > hi) {
            if (x > hi + kDomainEps)
                throw std::domain_error("iterate_eval: iterate escaped domain at step " +
                                        std::to_string(k + 1));
            x = hi;
        }
    }
    return x;
}

double lipschitz(const PLFunction& f) {
    double best = 0.0;
    const auto& ks = f.knots();
    for (std::size_t i = 0; i + 1 < ks.size(); ++i) {
        best = std::max(best, std::abs((ks[i + 1].y - ks[i].y) / (ks[i + 1].x - ks[i].x)));
    }
    return best;
}

int count_crossings(const PLFunction& f, double x, double y, double level_tol) {
    if (!(x < y)) throw std::invalid_argument("count_crossings: requires x < y");

    // Collect level hits in domain order; each hit records which level it
    // touches. The crossing count is the number of level alternations in the
    // sorted hit sequence (one less than the longest alternating subsequence).
    struct Hit {
        double pos;
        int level;  // 0 -> x, 1 -> y
    };
    std::vector<Hit> hits;
    const auto& ks = f.knots();
    const double levels[2] = {x, y};
    for (std::size_t i = 0; i + 1 < ks.size(); ++i) {
        const double x0 = ks[i].x, x1 = ks[i + 1].x;
        const double y0 = ks[i].y, y1 = ks[i + 1].y;
        for (int lv = 0; lv < 2; ++lv) {
            const double c = levels[lv];
            if (y0 == y1) {
                if (std::abs(y0 - c) <= level_tol)
                    hits.push_back({0.5 * (x0 + x1), lv});
                continue;
            }
            const double lo = std::min(y0, y1), hi = std::max(y0, y1);
            if (c < lo - level_tol || c > hi + level_tol) continue;
            const double cc = std::clamp(c, lo, hi);
            hits.push_back({x0 + (cc - y0) * (x1 - x0) / (y1 - y0), lv});
        }
    }
    std::sort(hits.begin(), hits.end(),
              [](const Hit& a, const Hit& b) { return a.pos < b.pos; });
    int transitions = 0;
    for (std::size_t i = 1; i < hits.size(); ++i) {
        if (hits[i].level != hits[i - 1].level) ++transitions;
    }
    return transitions;
}

namespace {

/// Exact integral of |d| over [0, w] where d interpolates d0 -> d1 linearly.
double abs_trapezoid(double w, double d0, double d1) {
    if (w <= 0.0) return 0.0;
    if ((d0 >= 0.0 && d1 >= 0.0) || (d0 <= 0.0 && d1 <= 0.0))
        return 0.5 * w * (std::abs(d0) + std::abs(d1));
    const double s = w * d0 / (d0 - d1);  // sign change position
    return 0.5 * (std::abs(d0) * s + std::abs(d1) * (w - s));
}

std::vector<double> merged_grid(const PLFunction& f, const PLFunction& g) {
    std::vector<double> xs;
    xs.reserve(f.knots().size() + g.knots().size());
    for (const Knot& k : f.knots()) xs.push_back(k.x);
    for (const Knot& k : g.knots()) xs.push_back(k.x);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end(),
                         [](double a, double b) { return b - a <= knot_merge_tol(b); }),
             xs.end());
    return xs;
}

}  // namespace

double l1_distance(const PLFunction& f, const PLFunction& g) {
    if (std::abs(f.domain_lo() - g.domain_lo()) > 1e-12 ||
        std::abs(f.domain_hi() - g.domain_hi()) > 1e-12)
        throw std::domain_error("l1_distance: domain mismatch");
    const std::vector<double> xs = merged_grid(f, g);
    double total = 0.0;
    double d_prev = f.eval(xs[0]) - g.eval(xs[0]);
    for (std::size_t i = 1; i < xs.size(); ++i) {
        const double d = f.eval(xs[i]) - g.eval(xs[i]);
        total += abs_trapezoid(xs[i] - xs[i - 1], d_prev, d);
        d_prev = d;
    }
    return total;
}

double classification_distance(const PLFunction& f, const PLFunction& g,
                               double threshold, std::span<const double> points) {
    if (points.empty())
        throw std::invalid_argument("classification_distance: empty point set");
    std::size_t mismatches = 0;
    for (double p : points) {
        const bool fa = f.eval(p) >= threshold;
        const bool ga = g.eval(p) >= threshold;
        if (fa != ga) ++mismatches;
    }
    return static_cast<double>(mismatches) / static_cast<double>(points.size());
}

FixedPointSet fixed_points(const PLFunction& f) {
    constexpr double kFlatTol = 1e-12;
    // Knot-value noise after deep compositions stays below ~1e-13; genuine
    // near-misses of the diagonal in the tested maps are >= 1e-3 away. A knot
    // this close to the diagonal is a tangential root (the residual of an
    // exact tangency after rounding) and must not be lost to a sign test.
    constexpr double kTangentTol = 1e-11;
    constexpr double kDedupe = 1e-7;
    FixedPointSet out;
    const auto& ks = f.knots();
    for (std::size_t i = 0; i + 1 < ks.size(); ++i) {
        const double g0 = ks[i].y - ks[i].x;
        const double g1 = ks[i + 1].y - ks[i + 1].x;
        if (std::abs(g0) <= kFlatTol && std::abs(g1) <= kFlatTol) {
            out.continuum_segments.emplace_back(ks[i].x, ks[i + 1].x);
            continue;
        }
        if (std::abs(g0) <= kTangentTol) out.points.push_back(ks[i].x);
        if (std::abs(g1) <= kTangentTol) out.points.push_back(ks[i + 1].x);
        if ((g0 > 0.0 && g1 < 0.0) || (g0 < 0.0 && g1 > 0.0))
            out.points.push_back(ks[i].x + (ks[i + 1].x - ks[i].x) * g0 / (g0 - g1));
    }
    std::sort(out.points.begin(), out.points.end());
    out.points.erase(std::unique(out.points.begin(), out.points.end(),
                                 [](double a, double b) { return b - a <= kDedupe; }),
                     out.points.end());
    return out;
}

}  // namespace chaossep
