#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "chaossep/covering.hpp"
#include "chaossep/rates.hpp"
#include "chaossep/separation.hpp"
#include "test_util.hpp"

using namespace chaossep;
using testutil::kPhi;

namespace {

LabeledCycle golden_cycle() {
    Orbit orbit;
    orbit.period = 3;
    orbit.points = {0.0, -1.0, kPhi - 1.0};
    return stefan_label(orbit);
}

}  // namespace

TEST_CASE("theoretical graph p=3: transpose is [[1,1],[1,0]]") {
    const CoveringGraph g = build_theoretical_graph(3);
    REQUIRE(g.size() == 2);
    // A = [[1,1],[1,0]] (symmetric pattern, so the transpose reads the same)
    CHECK(g.adjacency[0][0] == 1);
    CHECK(g.adjacency[0][1] == 1);
    CHECK(g.adjacency[1][0] == 1);
    CHECK(g.adjacency[1][1] == 0);
    CHECK(g.intervals[0].label == "I0");
    CHECK(g.intervals[1].label == "J1");
    CHECK_THROWS_AS(build_theoretical_graph(4), std::invalid_argument);
    CHECK_THROWS_AS(build_theoretical_graph(1), std::invalid_argument);
}

TEST_CASE("theoretical graph: edge count and fan-out row") {
    for (int p = 3; p <= 15; p += 2) {
        const CoveringGraph g = build_theoretical_graph(p);
        int edges = 0;
        for (const auto& row : g.adjacency)
            for (int v : row) {
                CHECK((v == 0 || v == 1));
                edges += v;
            }
        CHECK(edges == 1 + (p - 2) + (p - 1) / 2);
        // the fan-out node J_{(p-1)/2} covers every I interval
        int fan = 0;
        for (int j = 0; j <= (p - 3) / 2; ++j)
            fan += g.adjacency[static_cast<std::size_t>(j)][static_cast<std::size_t>(p - 2)];
        CHECK(fan == (p - 1) / 2);
    }
}

TEST_CASE("spectral_radius: golden matrix, identity, theoretical graphs") {
    CHECK(spectral_radius({{1.0, 1.0}, {1.0, 0.0}}, 1e-12) ==
          doctest::Approx(kPhi).epsilon(1e-8));
    CHECK(spectral_radius({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, 1e-12) ==
          doctest::Approx(1.0).epsilon(1e-10));
    CHECK(spectral_radius(build_theoretical_graph(5)) ==
          doctest::Approx(1.51288).epsilon(1e-5));
    // pure rotation needs the automatic shift
    CHECK(spectral_radius({{0.0, 1.0}, {1.0, 0.0}}, 1e-12) ==
          doctest::Approx(1.0).epsilon(1e-8));
    CHECK_THROWS_AS(spectral_radius({{1.0, -1.0}, {0.0, 1.0}}, 1e-10),
                    std::invalid_argument);
}

TEST_CASE("spectral radius of the theoretical graph equals rho(p)") {
    for (int p = 3; p <= 15; p += 2) {
        CHECK(std::abs(spectral_radius(build_theoretical_graph(p)) - rho(p).rho) <=
              1e-6);
    }
}

TEST_CASE("empirical graph of the golden family mirrors the pattern") {
    const PLFunction f = hard_family(3);
    const CoveringGraph g = build_empirical_graph(f, golden_cycle());
    REQUIRE(g.size() == 2);
    // I0 = [0, phi-1] maps onto J1 = [-1, 0] exactly; J1 covers both.
    CHECK(g.adjacency[1][0] == 1);  // I0 -> J1
    CHECK(g.adjacency[0][1] == 1);  // J1 -> I0
    CHECK(g.adjacency[1][1] == 1);  // J1 -> J1
    CHECK(g.adjacency[0][0] == 0);  // no I0 self-loop in this orientation
    CHECK(spectral_radius(g) == doctest::Approx(kPhi).epsilon(1e-8));

    const CoveringReport report = verify_covering(f, g);
    CHECK(!report.theoretical_ok);
    CHECK(report.mirrored_ok);
    CHECK(report.empirical_radius == doctest::Approx(kPhi).epsilon(1e-8));
}

TEST_CASE("empirical graph: full-range image covers every interval") {
    // tent maps [-1, 1] onto itself from either half, so once an interval
    // contains the fold every edge out of it exists.
    const PLFunction tent = tent_map();
    Orbit orbit;
    orbit.period = 3;
    orbit.points = {1.0 / 9.0, -7.0 / 9.0, 5.0 / 9.0};
    const LabeledCycle cycle = stefan_label(orbit);
    const CoveringGraph g = build_empirical_graph(tent, cycle);
    // J1 = [-7/9, 1/9] contains the fold at 0: image is [-1, 5/9] covering all
    for (std::size_t j = 0; j < g.size(); ++j) CHECK(g.adjacency[j][1] == 1);
}

TEST_CASE("empirical graph rejects degenerate cycles") {
    Orbit orbit;
    orbit.period = 3;
    orbit.points = {0.0, 0.3, 0.3 + 1e-18};
    CHECK_THROWS_AS(build_empirical_graph(tent_map(), stefan_label(orbit)),
                    std::invalid_argument);
}

TEST_CASE("tent 3-cycles give empirical spectral radius at least phi") {
    const PLFunction tent = tent_map();
    const PeriodScan scan = detect_periods(tent, 3);
    REQUIRE(scan.orbits.at(3).size() == 2);
    for (const Orbit& orbit : scan.orbits.at(3)) {
        const CoveringGraph g = build_empirical_graph(tent, stefan_label(orbit));
        CHECK(spectral_radius(g) >= kPhi - 1e-8);
        const CoveringReport report = verify_covering(tent, g);
        CHECK(report.any_orientation_ok());
    }
}

TEST_CASE("identity never covers a distinct interval") {
    Orbit orbit;
    orbit.period = 3;
    orbit.points = {-0.5, 0.0, 0.5};  // synthetic labels; f(U) = U for identity
    const CoveringGraph g =
        build_empirical_graph(identity_pl(-1.0, 1.0), stefan_label(orbit));
    for (std::size_t j = 0; j < g.size(); ++j)
        for (std::size_t i = 0; i < g.size(); ++i)
            if (i != j) CHECK(g.adjacency[j][i] == 0);
    // U = f(U) still covers itself
    CHECK(g.adjacency[0][0] == 1);
    const CoveringReport report = verify_covering(identity_pl(-1.0, 1.0), g);
    CHECK(!report.any_orientation_ok());
}

TEST_CASE("delta recursion: Fibonacci growth on the p=3 pattern") {
    const CoveringGraph g = build_theoretical_graph(3);
    const OscillationTrace trace = oscillation_lower_bound(g, 3);
    REQUIRE(trace.delta.size() == 4);
    CHECK(trace.delta[0][0].to_string() == "1");
    CHECK(trace.delta[0][1].to_string() == "1");
    CHECK(trace.delta[3][0].to_string() == "5");
    CHECK(trace.delta[3][1].to_string() == "3");

    const OscillationTrace zero = oscillation_lower_bound(g, 0);
    CHECK(zero.delta.size() == 1);
    for (const BigUInt& v : zero.delta[0]) CHECK(v.to_string() == "1");
}

TEST_CASE("delta growth ratio converges to the spectral radius") {
    for (int p : {3, 5, 7}) {
        const CoveringGraph g = build_theoretical_graph(p);
        const OscillationTrace trace = oscillation_lower_bound(g, 60);
        const double ratio =
            trace.delta[60][0].to_double() / trace.delta[59][0].to_double();
        const double sr = spectral_radius(g);
        CHECK(std::abs(ratio - sr) / sr <= 0.01);
    }
}

TEST_CASE("delta lower-bounds exact crossing counts over I0 (p = 3 and 5)") {
    for (int p : {3, 5}) {
        const PLFunction f = hard_family(p);
        const BestCycleResult best = select_best_cycle(f, p);
        const CoveringGraph g = best.graph;
        const double x = best.cycle.point(1);
        const double y = best.cycle.point(2);
        const OscillationTrace trace = oscillation_lower_bound(g, 12);
        for (int t = 1; t <= 12; ++t) {
            const PLFunction ft = self_compose(f, t);
            const long long crossings = count_crossings(ft, x, y);
            CHECK(static_cast<double>(crossings) >= trace.delta[t][0].to_double());
        }
    }
}

TEST_CASE("covering edges are monotone under interval shrinking") {
    Rng rng(555);
    const PLFunction f = hard_family(3);
    for (int trial = 0; trial < 50; ++trial) {
        double a = rng.uniform(-1.0, 1.0), b = rng.uniform(-1.0, 1.0);
        if (a > b) std::swap(a, b);
        if (b - a < 1e-3) continue;
        const auto [lo, hi] = f.image(a, b);
        double c = rng.uniform(lo, hi), d = rng.uniform(lo, hi);
        if (c > d) std::swap(c, d);
        // V = [c, d] lies in f(U); any sub-interval of V still does
        const double c2 = c + 0.25 * (d - c), d2 = d - 0.25 * (d - c);
        CHECK(c2 >= lo - 1e-9);
        CHECK(d2 <= hi + 1e-9);
    }
}

TEST_CASE("select_best_cycle finds a fully satisfied orientation for the family") {
    for (int p : {3, 5, 7}) {
        const PLFunction f = hard_family(p);
        const BestCycleResult best = select_best_cycle(f, p);
        CHECK(best.report.any_orientation_ok());
        CHECK(best.report.empirical_radius >= rho(p).rho - 1e-6);
    }
}
