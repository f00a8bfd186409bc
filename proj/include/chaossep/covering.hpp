#ifndef CHAOSSEP_COVERING_HPP
#define CHAOSSEP_COVERING_HPP

#include <string>
#include <vector>

#include "chaossep/bigint.hpp"
#include "chaossep/dynamics.hpp"
#include "chaossep/pl_function.hpp"

namespace chaossep {

struct LabeledInterval {
    std::string label;
    double lo = 0.0;
    double hi = 0.0;
};

/// Covering graph over the Stefan intervals of an odd cycle. Node order is
/// I_0 .. I_{(p-3)/2}, J_1 .. J_{(p-1)/2}; adjacency[j][i] = 1 iff interval i
/// covers interval j under f (J subset of f(I)).
struct CoveringGraph {
    int p = 0;
    bool symbolic = false;  // true when intervals carry labels only
    std::vector<LabeledInterval> intervals;
    std::vector<std::vector<int>> adjacency;

    std::size_t size() const { return intervals.size(); }
    int index_of_I(int j) const { return j; }
    int index_of_J(int j) const { return (p - 1) / 2 + (j - 1); }
};

/// The (p-1)x(p-1) covering pattern guaranteed for an odd-period cycle:
/// I_0 -> I_0 and J_1; I_j -> J_{j+1}; J_j -> I_j; J_{(p-1)/2} -> every I.
CoveringGraph build_theoretical_graph(int p);

/// Edges realized by f on the labeled cycle's intervals: U -> V iff V lies in
/// the exact image f(U), up to 1e-9.
CoveringGraph build_empirical_graph(const PLFunction& f, const LabeledCycle& cycle);

/// Dominant eigenvalue of a nonnegative square matrix by power iteration with
/// 1-norm normalization; Rayleigh quotients converge to tol. A rotational
/// spectrum that stalls the iteration is handled by shifting to A + I and
/// subtracting 1 from the result.
double spectral_radius(const std::vector<std::vector<double>>& A, double tol);

double spectral_radius(const CoveringGraph& graph, double tol = 1e-10);

/// delta^0 = all ones, delta^{t+1} = A * delta^t, in exact integer arithmetic.
/// delta[t][i] lower-bounds the crossings of f^t over interval i.
struct OscillationTrace {
    std::vector<std::string> labels;
    std::vector<std::vector<BigUInt>> delta;
};

OscillationTrace oscillation_lower_bound(const CoveringGraph& graph, int t);

/// Comparison of an empirical covering graph against the theoretical pattern.
/// The realized graph may be the mirror image (I and J roles swapped by the
/// half rotation of the node order) with the same spectral radius, so both
/// orientations are checked.
struct CoveringReport {
    bool theoretical_ok = false;
    bool mirrored_ok = false;
    std::vector<std::string> missing_theoretical;
    std::vector<std::string> missing_mirrored;
    double empirical_radius = 0.0;

    bool any_orientation_ok() const { return theoretical_ok || mirrored_ok; }
};

CoveringReport verify_covering(const PLFunction& f, const CoveringGraph& graph);

/// Scans every period-p cycle of f and returns the one whose empirical graph
/// satisfies the most required covering edges (ties: first found).
struct BestCycleResult {
    Orbit orbit;
    LabeledCycle cycle;
    CoveringGraph graph;
    CoveringReport report;
};

BestCycleResult select_best_cycle(const PLFunction& f, int p,
                                  std::size_t piece_budget = kDefaultPieceBudget);

}  // namespace chaossep

#endif
