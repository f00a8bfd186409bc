#include "chaossep/covering.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace chaossep {

namespace {

constexpr double kCoverTol = 1e-9;

void require_odd_cycle_period(int p) {
    if (p < 3 || p % 2 == 0)
        throw std::invalid_argument("covering graph requires an odd period >= 3");
}

std::vector<std::string> interval_labels(int p) {
    std::vector<std::string> labels;
    for (int j = 0; j <= (p - 3) / 2; ++j) labels.push_back("I" + std::to_string(j));
    for (int j = 1; j <= (p - 1) / 2; ++j) labels.push_back("J" + std::to_string(j));
    return labels;
}

/// Required edge list (from, to) of the theoretical pattern.
std::vector<std::pair<int, int>> theoretical_edges(int p) {
    const int half = (p - 1) / 2;
    std::vector<std::pair<int, int>> edges;
    edges.emplace_back(0, 0);                       // I_0 -> I_0
    for (int j = 0; j <= (p - 3) / 2; ++j)          // I_j -> J_{j+1}
        edges.emplace_back(j, half + j);
    for (int j = 1; j <= (p - 3) / 2; ++j)          // J_j -> I_j
        edges.emplace_back(half + j - 1, j);
    for (int j = 0; j <= (p - 3) / 2; ++j)          // J_{(p-1)/2} -> every I
        edges.emplace_back(p - 2, j);
    return edges;
}

std::vector<std::vector<double>> to_double_matrix(const CoveringGraph& g) {
    std::vector<std::vector<double>> A(g.size(), std::vector<double>(g.size(), 0.0));
    for (std::size_t j = 0; j < g.size(); ++j)
        for (std::size_t i = 0; i < g.size(); ++i)
            A[j][i] = static_cast<double>(g.adjacency[j][i]);
    return A;
}

bool power_iteration(const std::vector<std::vector<double>>& A, double tol,
                     double& out) {
    const std::size_t n = A.size();
    std::vector<double> v(n, 1.0 / static_cast<double>(n));
    std::vector<double> w(n, 0.0);
    double prev_rq = 0.0;
    for (int iter = 0; iter < 100000; ++iter) {
        double vw = 0.0, vv = 0.0, norm = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += A[j][i] * v[i];
            w[j] = s;
            vw += v[j] * s;
            vv += v[j] * v[j];
            norm += std::abs(s);
        }
        if (norm == 0.0) {
            out = 0.0;  // nilpotent
            return true;
        }
        const double rq = vw / vv;
        if (iter > 0 && std::abs(rq - prev_rq) <= tol) {
            out = rq;
            return true;
        }
        prev_rq = rq;
        for (std::size_t j = 0; j < n; ++j) v[j] = w[j] / norm;
    }
    return false;
}

}  // namespace

CoveringGraph build_theoretical_graph(int p) {
    require_odd_cycle_period(p);
    CoveringGraph g;
    g.p = p;
    g.symbolic = true;
    for (const std::string& label : interval_labels(p))
        g.intervals.push_back({label, 0.0, 0.0});
    g.adjacency.assign(g.size(), std::vector<int>(g.size(), 0));
    for (const auto& [from, to] : theoretical_edges(p))
        g.adjacency[static_cast<std::size_t>(to)][static_cast<std::size_t>(from)] = 1;
    return g;
}

CoveringGraph build_empirical_graph(const PLFunction& f, const LabeledCycle& cycle) {
    const int p = cycle.p;
    require_odd_cycle_period(p);

    CoveringGraph g;
    g.p = p;
    g.symbolic = false;
    // I_0 = [x_1, x_2]; I_j = [x_{2j}, x_{2j+2}]; J_j = [x_{2j+1}, x_{2j-1}].
    g.intervals.push_back({"I0", cycle.point(1), cycle.point(2)});
    for (int j = 1; j <= (p - 3) / 2; ++j)
        g.intervals.push_back({"I" + std::to_string(j), cycle.point(2 * j),
                               cycle.point(2 * j + 2)});
    for (int j = 1; j <= (p - 1) / 2; ++j)
        g.intervals.push_back({"J" + std::to_string(j), cycle.point(2 * j + 1),
                               cycle.point(2 * j - 1)});

    for (const LabeledInterval& iv : g.intervals) {
        if (!(iv.lo < iv.hi))
            throw std::invalid_argument("build_empirical_graph: degenerate interval " +
                                        iv.label);
    }

    g.adjacency.assign(g.size(), std::vector<int>(g.size(), 0));
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto [lo, hi] = f.image(g.intervals[i].lo, g.intervals[i].hi);
        for (std::size_t j = 0; j < g.size(); ++j) {
            const bool covered = g.intervals[j].lo >= lo - kCoverTol &&
                                 g.intervals[j].hi <= hi + kCoverTol;
            if (covered) g.adjacency[j][i] = 1;
        }
    }
    return g;
}

double spectral_radius(const std::vector<std::vector<double>>& A, double tol) {
    if (A.empty()) throw std::invalid_argument("spectral_radius: empty matrix");
    for (const auto& row : A) {
        if (row.size() != A.size())
            throw std::invalid_argument("spectral_radius: matrix must be square");
        for (double v : row)
            if (v < 0.0)
                throw std::invalid_argument("spectral_radius: matrix must be nonnegative");
    }
    double out = 0.0;
    if (power_iteration(A, tol, out)) return out;

    // Rotational spectrum (e.g. a pure cycle): shift to A + I, which is
    // primitive whenever A is irreducible, and undo the shift.
    std::vector<std::vector<double>> shifted = A;
    for (std::size_t i = 0; i < A.size(); ++i) shifted[i][i] += 1.0;
    if (power_iteration(shifted, tol, out)) return out - 1.0;
    throw std::runtime_error("spectral_radius: power iteration failed to converge");
}

double spectral_radius(const CoveringGraph& graph, double tol) {
    return spectral_radius(to_double_matrix(graph), tol);
}

OscillationTrace oscillation_lower_bound(const CoveringGraph& graph, int t) {
    if (t < 0) throw std::invalid_argument("oscillation_lower_bound: t must be >= 0");
    OscillationTrace trace;
    for (const LabeledInterval& iv : graph.intervals) trace.labels.push_back(iv.label);
    const std::size_t n = graph.size();
    trace.delta.reserve(static_cast<std::size_t>(t) + 1);
    trace.delta.emplace_back(n, BigUInt(1));
    for (int s = 1; s <= t; ++s) {
        const auto& prev = trace.delta.back();
        std::vector<BigUInt> next(n, BigUInt(0));
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < n; ++i)
                if (graph.adjacency[j][i]) next[j] += prev[i];
        trace.delta.push_back(std::move(next));
    }
    return trace;
}

CoveringReport verify_covering(const PLFunction& f, const CoveringGraph& graph) {
    (void)f;  // the graph already encodes the realized relations of f
    const int p = graph.p;
    require_odd_cycle_period(p);
    const int half = (p - 1) / 2;
    const int n = p - 1;

    CoveringReport report;
    const auto required = theoretical_edges(p);

    auto present = [&graph](int from, int to) {
        return graph.adjacency[static_cast<std::size_t>(to)][static_cast<std::size_t>(from)] != 0;
    };
    auto name = [&graph](int idx) { return graph.intervals[static_cast<std::size_t>(idx)].label; };

    report.theoretical_ok = true;
    for (const auto& [from, to] : required) {
        if (!present(from, to)) {
            report.theoretical_ok = false;
            report.missing_theoretical.push_back(name(from) + "->" + name(to));
        }
    }

    // Mirror orientation: rotate node indices by half, which swaps the roles
    // I_j <-> J_{j+1}.
    auto mirror = [half, n](int idx) { return (idx + half) % n; };
    report.mirrored_ok = true;
    for (const auto& [from, to] : required) {
        if (!present(mirror(from), mirror(to))) {
            report.mirrored_ok = false;
            report.missing_mirrored.push_back(name(mirror(from)) + "->" + name(mirror(to)));
        }
    }

    report.empirical_radius = spectral_radius(graph);
    return report;
}

BestCycleResult select_best_cycle(const PLFunction& f, int p,
                                  std::size_t piece_budget) {
    require_odd_cycle_period(p);
    const PeriodScan scan = detect_periods(f, p, piece_budget);
    auto it = scan.orbits.find(p);
    if (it == scan.orbits.end() || it->second.empty())
        throw std::runtime_error("select_best_cycle: no period-" + std::to_string(p) +
                                 " cycle found");

    const auto satisfied = [](const CoveringReport& r, std::size_t total) {
        const std::size_t missing =
            std::min(r.missing_theoretical.size(), r.missing_mirrored.size());
        return total - missing;
    };

    BestCycleResult best;
    bool have = false;
    const std::size_t total = theoretical_edges(p).size();
    for (const Orbit& orbit : it->second) {
        BestCycleResult cand;
        cand.orbit = orbit;
        cand.cycle = stefan_label(orbit);
        cand.graph = build_empirical_graph(f, cand.cycle);
        cand.report = verify_covering(f, cand.graph);
        if (!have || satisfied(cand.report, total) > satisfied(best.report, total)) {
            best = cand;
            have = true;
        }
        if (best.report.any_orientation_ok()) break;
    }
    return best;
}

}  // namespace chaossep
