#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "chaossep/serialize.hpp"
#include "test_util.hpp"

using namespace chaossep;

TEST_CASE("fmt_double: shortest representation round-trips bitwise") {
    Rng rng(808);
    for (int i = 0; i < 2000; ++i) {
        double v;
        switch (i % 4) {
            case 0: v = rng.uniform(-1.0, 1.0); break;
            case 1: v = rng.uniform(-1e18, 1e18); break;
            case 2: v = rng.uniform(-1e-18, 1e-18); break;
            default: v = static_cast<double>(static_cast<int>(rng.below(1000))); break;
        }
        const std::string s = fmt_double(v);
        CHECK(parse_double(s) == v);
    }
    CHECK(fmt_double(0.1) == "0.1");
    CHECK(fmt_double(1.0) == "1");
    CHECK_THROWS_AS(parse_double("12,3"), std::invalid_argument);
    CHECK_THROWS_AS(parse_double(""), std::invalid_argument);
}

TEST_CASE("PLFunction CSV round-trip is knot-exact") {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const PLFunction f = testutil::random_pl(rng);
        std::istringstream in(pl_to_csv(f));
        const PLFunction g = pl_from_csv(in);
        REQUIRE(g.knots().size() == f.knots().size());
        for (std::size_t i = 0; i < f.knots().size(); ++i) {
            CHECK(g.knots()[i].x == f.knots()[i].x);
            CHECK(g.knots()[i].y == f.knots()[i].y);
        }
    }
    std::istringstream bad("a,b\n1,2\n");
    CHECK_THROWS_AS(pl_from_csv(bad), std::invalid_argument);
}

TEST_CASE("PLFunction JSON round-trip is knot-exact") {
    Rng rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        const PLFunction f = testutil::random_pl(rng);
        const PLFunction g = pl_from_json(pl_to_json(f));
        REQUIRE(g.knots().size() == f.knots().size());
        for (std::size_t i = 0; i < f.knots().size(); ++i) {
            CHECK(g.knots()[i].x == f.knots()[i].x);
            CHECK(g.knots()[i].y == f.knots()[i].y);
        }
        CHECK(g.domain_lo() == f.domain_lo());
        CHECK(g.domain_hi() == f.domain_hi());
    }
    CHECK_THROWS_AS(pl_from_json("{\"domain\":[0,1],\"knots\":[[0,0]]}"),
                    std::invalid_argument);
}

TEST_CASE("orbit JSON and period-scan CSV shapes") {
    Orbit orbit;
    orbit.period = 3;
    orbit.points = {0.0, -1.0, 0.5};
    orbit.closure_residual = 1e-9;
    const std::string j = orbit_to_json(orbit);
    CHECK(j.find("\"period\":3") != std::string::npos);
    CHECK(j.find("\"residual\"") != std::string::npos);

    PeriodScan scan;
    scan.orbits[3].push_back(orbit);
    const std::string csv = period_scan_to_csv(scan);
    CHECK(csv.rfind("period,orbit_index,point_index,value\n", 0) == 0);
    CHECK(csv.find("3,0,0,0\n") != std::string::npos);
    CHECK(csv.find("3,0,1,-1\n") != std::string::npos);
}

TEST_CASE("covering graph JSON and trace CSV") {
    const CoveringGraph g = build_theoretical_graph(5);
    const std::string j = graph_to_json(g);
    CHECK(j.find("\"p\":5") != std::string::npos);
    CHECK(j.find("\"I0\"") != std::string::npos);
    CHECK(j.find("\"J2\"") != std::string::npos);
    CHECK(j.find("\"adjacency\"") != std::string::npos);

    const OscillationTrace trace = oscillation_lower_bound(g, 2);
    const std::string csv = trace_to_csv(trace);
    CHECK(csv.rfind("t,label,delta\n", 0) == 0);
    CHECK(csv.find("0,I0,1\n") != std::string::npos);
    CHECK(csv.find("2,") != std::string::npos);
}

TEST_CASE("separation report serialization") {
    SeparationConfig cfg;
    cfg.rho = cfg.L = testutil::kPhi;
    cfg.t = 40;
    cfg.u = 20;
    cfg.l = 4;
    cfg.x = 0.0;
    cfg.y = testutil::kPhi - 1.0;
    const SeparationReport report = theory_bound(cfg);
    CHECK(separation_report_csv_header() ==
          "rho,L,t,u,l,x,y,capacity,condition,floor_headline,floor_refined");
    const std::string row = separation_report_to_csv_row(cfg, report);
    CHECK(row.find("2560000") != std::string::npos);
    CHECK(row.find(",1,") != std::string::npos);  // condition met
    const std::string j = separation_report_to_json(cfg, report);
    CHECK(j.find("\"condition_met\": true") != std::string::npos);
    CHECK(j.find("\"capacity\": \"2560000\"") != std::string::npos);
}

TEST_CASE("model checkpoint JSON round-trips parameters exactly") {
    const MlpModel m = mlp_init(3, 4, 99);
    const MlpModel n = model_from_json(model_to_json(m));
    CHECK(n.depth == m.depth);
    CHECK(n.width == m.width);
    CHECK(n.seed == m.seed);
    for (std::size_t k = 0; k < m.weights.size(); ++k) {
        CHECK(n.weights[k] == m.weights[k]);
        CHECK(n.biases[k] == m.biases[k]);
    }
    for (double x : {-1.0, -0.25, 0.6})
        CHECK(mlp_forward(n, x) == mlp_forward(m, x));
}

TEST_CASE("experiment rows and loss curves") {
    ExperimentRun run;
    run.task = "easy";
    run.depth = 2;
    run.width = 20;
    run.seed = 7;
    run.epochs = 1500;
    run.floor_headline = 0.0;
    run.result.final_mse = 0.125;
    run.result.l1 = 0.5;
    const std::string csv = experiment_rows_to_csv({run});
    CHECK(csv.rfind("task,depth,width,seed,epochs,mse,l1,floor\n", 0) == 0);
    CHECK(csv.find("easy,2,20,7,1500,0.125,0.5,0\n") != std::string::npos);

    const std::string losses = loss_curve_to_csv({1.0, 0.5});
    CHECK(losses == "epoch,loss\n1,1\n2,0.5\n");
}

TEST_CASE("manifest JSON carries the run description") {
    RunManifest m;
    m.command = "train";
    m.args = {"--task", "easy"};
    m.seeds = {1, 2, 3};
    m.outputs = {"results.csv"};
    m.wall_time_s = 1.25;
    const std::string j = manifest_to_json(m);
    CHECK(j.find("\"command\": \"train\"") != std::string::npos);
    CHECK(j.find("\"version\": \"0.1.0\"") != std::string::npos);
    CHECK(j.find("results.csv") != std::string::npos);
}
