#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "chaossep/covering.hpp"
#include "chaossep/dynamics.hpp"
#include "chaossep/rates.hpp"
#include "chaossep/separation.hpp"
#include "test_util.hpp"

using namespace chaossep;
using testutil::kPhi;

TEST_CASE("hard_family: knots, orbit closure, distinctness") {
    const PLFunction f3 = hard_family(3);
    REQUIRE(f3.knots().size() == 3);
    CHECK(f3.knots()[0].y == doctest::Approx(0.618034).epsilon(1e-6));
    CHECK(f3.knots()[1].y == -1.0);
    CHECK(f3.knots()[2].y == doctest::Approx(0.618034).epsilon(1e-6));

    // p=3 orbit of 0: (0, -1, phi-1), f(phi-1) = phi^2 - phi - 1 = 0
    CHECK(std::abs(iterate_eval(f3, 3, 0.0)) <= 1e-12);

    const PLFunction f5 = hard_family(5);
    const double expected5[5] = {0.0, -1.0, 0.51288, -0.22407, -0.66101};
    double z = 0.0;
    for (int i = 0; i < 5; ++i) {
        CHECK(z == doctest::Approx(expected5[i]).epsilon(1e-4));
        z = f5.eval(z);
    }
    CHECK(std::abs(z) <= 1e-7);

    for (int p : {3, 5, 7, 9}) {
        const PLFunction f = hard_family(p);
        std::vector<double> orbit;
        double w = 0.0;
        for (int i = 0; i < p; ++i) {
            orbit.push_back(w);
            w = f.eval(w);
        }
        CHECK(std::abs(w) <= 1e-7);  // closes at step p
        double min_gap = 2.0;
        for (std::size_t i = 0; i < orbit.size(); ++i)
            for (std::size_t j = i + 1; j < orbit.size(); ++j)
                min_gap = std::min(min_gap, std::abs(orbit[i] - orbit[j]));
        CHECK(min_gap >= 1e-3);  // no earlier closure
        CHECK(orbit_sign_pattern_check(orbit, rho(p).rho).ok);
    }
}

TEST_CASE("tent_map basics") {
    const PLFunction tent = tent_map();
    CHECK(lipschitz(tent) == 2.0);
    CHECK(detect_periods(tent, 3).has_period(3));
    for (int t = 1; t <= 12; ++t)
        CHECK(count_crossings(self_compose(tent, t), -1.0, 1.0) == (1 << t));
}

TEST_CASE("capacity: exact powers with big-integer growth") {
    CHECK(capacity(20, 5).to_string() == "102400000");
    CHECK(capacity(1, 1).to_string() == "2");
    CHECK(capacity(20, 4).to_string() == "2560000");
    // (2*20)^25 = 40^25 needs 41 digits; stays exact
    CHECK(capacity(20, 25).to_string() == "11258999068426240000000000000000000000000");
    CHECK_THROWS_AS(capacity(0, 1), std::invalid_argument);
}

TEST_CASE("theory_bound: the paper's experimental configuration") {
    SeparationConfig cfg;
    cfg.rho = kPhi;
    cfg.L = kPhi;
    cfg.t = 40;
    cfg.u = 20;
    cfg.l = 4;
    cfg.x = 0.0;
    cfg.y = kPhi - 1.0;

    const SeparationReport r4 = theory_bound(cfg);
    CHECK(r4.condition_met);
    const double expected_floor = (kPhi - 1.0) * (kPhi - 1.0) / 32.0;
    CHECK(r4.floor_headline == doctest::Approx(expected_floor).epsilon(1e-12));
    CHECK(r4.floor_headline == doctest::Approx(0.011936).epsilon(1e-4));

    cfg.l = 5;
    const SeparationReport r5 = theory_bound(cfg);
    CHECK(!r5.condition_met);
    CHECK(r5.floor_headline == 0.0);

    cfg.l = 4;
    cfg.L = 2.0;  // larger Lipschitz: no meaningful guarantee
    const SeparationReport rbig = theory_bound(cfg);
    CHECK(rbig.floor_headline == 0.0);
    CHECK(rbig.warning.find("shrink") != std::string::npos);

    cfg.L = kPhi;
    cfg.y = cfg.x;  // degenerate levels
    CHECK_THROWS_AS(theory_bound(cfg), std::invalid_argument);
}

TEST_CASE("theory_bound: refined floor uses measured crossings") {
    SeparationConfig cfg;
    cfg.rho = kPhi;
    cfg.L = kPhi;
    cfg.t = 14;
    cfg.u = 4;
    cfg.l = 2;
    cfg.x = 0.0;
    cfg.y = kPhi - 1.0;

    const PLFunction f14 = self_compose(hard_family(3), 14);
    const long long crossings = count_crossings(f14, cfg.x, cfg.y);
    CHECK(crossings >= 610);  // delta recursion reaches F_15 = 610 by t = 14

    const SeparationReport r = theory_bound(cfg, crossings);
    CHECK(r.condition_met);  // 64 <= phi^14 / 8 ~ 105.6
    CHECK(r.crossings_measured);
    CHECK(r.crossings_used == crossings);
    const double gap = cfg.y - cfg.x;
    const double expected = static_cast<double>(crossings) * gap * gap /
                            (16.0 * std::pow(kPhi, 14)) *
                            (1.0 - 2.0 * 64.0 / static_cast<double>(crossings));
    CHECK(r.floor_refined == doctest::Approx(expected).epsilon(1e-12));
    CHECK(r.floor_refined > 0.0);
}

TEST_CASE("interval_integral_check: tent compositions are exactly tight") {
    const PLFunction tent = tent_map();
    for (int t = 1; t <= 10; ++t) {
        const PLFunction ht = self_compose(tent, t);
        const IntervalIntegralReport report =
            interval_integral_check(ht, -1.0, 1.0, std::pow(2.0, t));
        REQUIRE(!report.intervals.empty());
        CHECK(report.min_ratio >= 1.0 - 1e-12);
        // the end pieces achieve the bound exactly (dyadic arithmetic)
        CHECK(report.min_ratio == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("interval_integral_check: golden family satisfies the bound") {
    const PLFunction f = hard_family(3);
    for (int t = 1; t <= 12; ++t) {
        const PLFunction ht = self_compose(f, t);
        const IntervalIntegralReport report =
            interval_integral_check(ht, 0.0, kPhi - 1.0, std::pow(kPhi, t));
        REQUIRE(!report.intervals.empty());
        CHECK(report.min_ratio >= 1.0 - 1e-9);
    }
}

TEST_CASE("interval_integral_check: understating the Lipschitz power flags failure") {
    const PLFunction h = self_compose(tent_map(), 6);
    const IntervalIntegralReport honest =
        interval_integral_check(h, -1.0, 1.0, std::pow(2.0, 6));
    const IntervalIntegralReport cheated =
        interval_integral_check(h, -1.0, 1.0, std::pow(2.0, 6) / 2.0);
    CHECK(honest.all_satisfied());
    CHECK(cheated.min_ratio < 1.0);
    CHECK(!cheated.all_satisfied());
}

TEST_CASE("interval_integral_check: no qualifying intervals yields an empty report") {
    // constant function far away from both levels
    const PLFunction flat = make_pl({{-1.0, 0.1}, {1.0, 0.1}});
    const IntervalIntegralReport report = interval_integral_check(flat, 0.4, 0.9, 2.0);
    CHECK(report.intervals.empty());
    CHECK(report.min_ratio == 0.0);
}

TEST_CASE("min_compositions: frozen values") {
    CHECK(min_compositions(4, 20, kPhi) == 35);
    CHECK(min_compositions(5, 20, kPhi) == 43);  // exceeds the t = 40 used upstream
    CHECK(min_compositions(1, 1, 2.0) == 4);
    CHECK_THROWS_AS(min_compositions(1, 1, 1.0), std::invalid_argument);
}

TEST_CASE("regime trichotomy: matched, above, and below sqrt 2") {
    // L = rho = phi: separation regime with period 3
    CHECK(detect_periods(hard_family(3), 3).has_period(3));

    // tent: L = 2 equals the tent's own oscillation growth rate
    const PLFunction tent = tent_map();
    CHECK(detect_periods(tent, 3).has_period(3));
    const int c10 = count_crossings(self_compose(tent, 10), -1.0, 1.0);
    const int c11 = count_crossings(self_compose(tent, 11), -1.0, 1.0);
    CHECK(static_cast<double>(c11) / c10 == doctest::Approx(2.0));

    // L = 1.2 < sqrt 2: no odd period up to 9, crossing growth flattens
    const PLFunction slow = slope_family(1.2);
    const PeriodScan scan = detect_periods(slow, 9);
    for (int p : {3, 5, 7, 9}) CHECK(!scan.has_period(p));

    const double lo = -0.91, hi = 0.09;  // around the period-2 cycle
    std::vector<int> counts;
    for (int t = 1; t <= 20; ++t)
        counts.push_back(count_crossings(self_compose(slow, t), lo, hi));
    for (int t = 15; t < 20; ++t) {
        const double ratio =
            static_cast<double>(counts[static_cast<std::size_t>(t)]) /
            static_cast<double>(counts[static_cast<std::size_t>(t - 1)]);
        CHECK(ratio <= 1.15);
    }
    // versus the exponential regimes at the same depth
    CHECK(counts[19] <= 4 * 20);
}
