// chaossep: interval-map dynamics and depth-width separation toolkit.
//
// Subcommands: rho, periods, bound, train, report. Exit codes: 0 success,
// 1 internal failure, 2 usage/input error.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "chaossep/covering.hpp"
#include "chaossep/dynamics.hpp"
#include "chaossep/mlp.hpp"
#include "chaossep/pl_function.hpp"
#include "chaossep/rates.hpp"
#include "chaossep/separation.hpp"
#include "chaossep/serialize.hpp"

namespace fs = std::filesystem;
using namespace chaossep;

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Function spec mini-language: `tent`, `family:p`, `slope:rho`, `file:path`.
PLFunction parse_function_spec(const std::string& spec) {
    if (spec == "tent") return tent_map();
    if (spec.rfind("family:", 0) == 0) {
        const int p = std::stoi(spec.substr(7));
        return hard_family(p);
    }
    if (spec.rfind("slope:", 0) == 0) {
        const double rho_v = parse_double(spec.substr(6));
        return slope_family(rho_v);
    }
    if (spec.rfind("file:", 0) == 0) {
        const std::string path = spec.substr(5);
        try {
            PLFunction f = pl_from_file(path);
            f.require_self_map();
            return f;
        } catch (const std::exception& e) {
            throw UsageError("cannot load function from '" + path + "': " + e.what());
        }
    }
    throw UsageError("unknown function spec '" + spec +
                     "' (expected tent, family:p, slope:rho, or file:path)");
}

std::vector<int> parse_depths(const std::string& text) {
    std::vector<int> depths;
    const auto dots = text.find("..");
    if (dots != std::string::npos) {
        const int lo = std::stoi(text.substr(0, dots));
        const int hi = std::stoi(text.substr(dots + 2));
        if (lo < 1 || hi < lo) throw UsageError("bad depth range '" + text + "'");
        for (int d = lo; d <= hi; ++d) depths.push_back(d);
        return depths;
    }
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto comma = text.find(',', pos);
        const std::string tok =
            text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        depths.push_back(std::stoi(tok));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (depths.empty()) throw UsageError("empty depth list");
    return depths;
}

std::vector<std::uint64_t> seed_list(int count) {
    std::vector<std::uint64_t> seeds;
    for (int i = 1; i <= count; ++i) seeds.push_back(static_cast<std::uint64_t>(i));
    return seeds;
}

struct OutputSink {
    fs::path dir;
    RunManifest manifest;
    std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();

    explicit OutputSink(const std::string& out_dir, std::string command,
                        std::vector<std::string> args) {
        dir = out_dir;
        fs::create_directories(dir);
        manifest.command = std::move(command);
        manifest.args = std::move(args);
    }

    void write(const std::string& name, const std::string& content) {
        write_text_file((dir / name).string(), content);
        manifest.outputs.push_back(name);
    }

    void finish() {
        manifest.wall_time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
                .count();
        write_text_file((dir / "manifest.json").string(), manifest_to_json(manifest));
    }
};

std::string rho_table_csv(int p_max) {
    std::string csv = "p,rho_new,rho_legacy,gap\n";
    for (int p = 3; p <= p_max; p += 2) {
        const double rn = rho(p).rho;
        const double rl = rho_legacy(p).rho;
        csv += std::to_string(p) + "," + fmt_double(rn) + "," + fmt_double(rl) + "," +
               fmt_double(rn - rl) + "\n";
    }
    return csv;
}

// ---------------------------------------------------------------------------
// rho
// ---------------------------------------------------------------------------

int cmd_rho(std::optional<int> period, bool legacy, std::optional<int> table,
            const std::string& out_dir, const std::vector<std::string>& raw_args) {
    if (period.has_value() == table.has_value())
        throw UsageError("pass exactly one of --period or --table");

    std::optional<OutputSink> sink;
    if (!out_dir.empty()) sink.emplace(out_dir, "rho", raw_args);

    if (period) {
        const GrowthRate r = legacy ? rho_legacy(*period) : rho(*period);
        std::cout << fmt_double(r.rho) << "\n";
        if (sink) {
            sink->write("rho.csv", "p,rho,polynomial,residual\n" + std::to_string(r.p) +
                                       "," + fmt_double(r.rho) + "," +
                                       (legacy ? "legacy" : "new") + "," +
                                       fmt_double(r.residual) + "\n");
        }
    } else {
        if (*table < 3) throw UsageError("--table needs p_max >= 3");
        const std::string csv = rho_table_csv(*table);
        std::cout << csv;
        if (sink) sink->write("rho_table.csv", csv);
    }
    if (sink) sink->finish();
    return 0;
}

// ---------------------------------------------------------------------------
// periods
// ---------------------------------------------------------------------------

int cmd_periods(const std::string& spec, int max_period, const std::string& out_dir,
                const std::vector<std::string>& raw_args) {
    if (max_period < 1) throw UsageError("--max must be >= 1");
    const PLFunction f = parse_function_spec(spec);
    const PeriodScan scan = detect_periods(f, max_period, piece_budget_from_env());

    bool consistent = true;
    for (const auto& [n, orbits] : scan.orbits) {
        if (orbits.empty()) continue;
        for (std::uint64_t implied :
             sharkovsky_implied(static_cast<std::uint64_t>(n),
                                static_cast<std::uint64_t>(max_period)))
            if (!scan.has_period(static_cast<int>(implied))) consistent = false;
    }
    const PrimePeriodResult prime = prime_period_up_to(f, max_period,
                                                       piece_budget_from_env());

    const std::string csv = period_scan_to_csv(scan);
    std::cout << csv;
    std::cout << "# prime_period=" << prime.key.value() << " (up to search budget "
              << prime.searched_up_to << ")\n";
    std::cout << "# sharkovsky_consistent=" << (consistent ? "true" : "false") << "\n";
    if (!scan.continuum_periods.empty()) {
        std::cout << "# continuum_periods=";
        bool first = true;
        for (int n : scan.continuum_periods) {
            if (!first) std::cout << ",";
            std::cout << n;
            first = false;
        }
        std::cout << "\n";
    }

    if (!out_dir.empty()) {
        OutputSink sink(out_dir, "periods", raw_args);
        sink.write("periods.csv", csv);
        std::string orbits_json = "[";
        bool first = true;
        for (const auto& [n, orbits] : scan.orbits)
            for (const Orbit& orbit : orbits) {
                if (!first) orbits_json += ",";
                orbits_json += orbit_to_json(orbit);
                first = false;
            }
        orbits_json += "]";
        sink.write("orbits.json", orbits_json);
        sink.finish();
    }
    return 0;
}

// ---------------------------------------------------------------------------
// bound
// ---------------------------------------------------------------------------

int cmd_bound(int p, int t, int width, int depth, bool exact_crossings,
              const std::string& out_dir, const std::vector<std::string>& raw_args) {
    const GrowthRate rate = rho(p);
    const PLFunction f = hard_family(p);

    Orbit orbit;
    orbit.period = p;
    double z = 0.0;
    for (int i = 0; i < p; ++i) {
        orbit.points.push_back(z);
        z = f.eval(z);
    }
    orbit.closure_residual = std::abs(z);
    const LabeledCycle cycle = stefan_label(orbit);

    SeparationConfig cfg;
    cfg.rho = rate.rho;
    cfg.L = lipschitz(f);
    cfg.t = t;
    cfg.u = width;
    cfg.l = depth;
    cfg.x = cycle.point(1);  // I0 endpoints
    cfg.y = cycle.point(2);

    std::optional<long long> crossings;
    if (exact_crossings) {
        try {
            const PLFunction ft = self_compose(f, t, piece_budget_from_env());
            crossings = count_crossings(ft, cfg.x, cfg.y);
        } catch (const BudgetError& e) {
            throw UsageError(std::string(e.what()) +
                             " (omit --exact-crossings for this t)");
        }
    }

    const SeparationReport report = theory_bound(cfg, crossings);
    const std::string json = separation_report_to_json(cfg, report);
    std::cout << json << "\n";

    if (!out_dir.empty()) {
        OutputSink sink(out_dir, "bound", raw_args);
        sink.write("bound.json", json + "\n");
        sink.write("bound.csv", separation_report_csv_header() + "\n" +
                                    separation_report_to_csv_row(cfg, report) + "\n");
        sink.finish();
    }
    return 0;
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

std::string run_name(const ExperimentRun& run) {
    return run.task + "_d" + std::to_string(run.depth) + "_s" +
           std::to_string(run.seed);
}

std::string plot_csv(const std::vector<ExperimentRun>& runs) {
    // depth, median over seeds of the L1 error, theoretical floor
    std::string csv = "depth,median_l1,floor\n";
    std::vector<int> depths;
    for (const auto& run : runs)
        if (std::find(depths.begin(), depths.end(), run.depth) == depths.end())
            depths.push_back(run.depth);
    std::sort(depths.begin(), depths.end());
    for (int depth : depths) {
        std::vector<double> l1s;
        double floor_v = 0.0;
        for (const auto& run : runs)
            if (run.depth == depth) {
                l1s.push_back(run.result.l1);
                floor_v = run.floor_headline;
            }
        std::sort(l1s.begin(), l1s.end());
        const double median = l1s[l1s.size() / 2];
        csv += std::to_string(depth) + "," + fmt_double(median) + "," +
               fmt_double(floor_v) + "\n";
    }
    return csv;
}

void emit_experiment(OutputSink& sink, const std::string& task_name,
                     const std::vector<ExperimentRun>& runs) {
    sink.write("results_" + task_name + ".csv", experiment_rows_to_csv(runs));
    sink.write("plot_" + task_name + ".csv", plot_csv(runs));
    for (const ExperimentRun& run : runs) {
        sink.write("loss_" + run_name(run) + ".csv",
                   loss_curve_to_csv(run.result.loss_curve));
        sink.write("model_" + run_name(run) + ".json", model_to_json(run.model));
    }
}

int cmd_train(const std::string& task_name, const std::string& depths_text,
              int width, int epochs, int seeds, int samples, double lr,
              const std::string& out_dir, const std::vector<std::string>& raw_args) {
    if (task_name != "hard" && task_name != "easy")
        throw UsageError("--task must be hard or easy");
    const TaskKind task = task_name == "hard" ? TaskKind::Hard : TaskKind::Easy;
    const std::vector<int> depths = parse_depths(depths_text);

    TrainConfig cfg;
    cfg.epochs = epochs;
    cfg.sample_count = samples;
    cfg.learning_rate = lr;

    OutputSink sink(out_dir, "train", raw_args);
    sink.manifest.seeds = seed_list(seeds);
    const auto runs = run_experiment(task, depths, width, cfg, sink.manifest.seeds);
    emit_experiment(sink, task_name, runs);
    sink.finish();

    std::cout << experiment_rows_to_csv(runs);
    return 0;
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

std::string spectra_check_csv() {
    std::string csv = "p,rho,spectral_radius,abs_diff\n";
    for (int p = 3; p <= 15; p += 2) {
        const double r = rho(p).rho;
        const double sr = spectral_radius(build_theoretical_graph(p));
        csv += std::to_string(p) + "," + fmt_double(r) + "," + fmt_double(sr) + "," +
               fmt_double(std::abs(r - sr)) + "\n";
    }
    return csv;
}

std::string family_validation_csv() {
    std::string csv = "p,closure_residual,min_orbit_gap,sign_pattern_ok\n";
    for (int p : {3, 5, 7, 9}) {
        const PLFunction f = hard_family(p);
        std::vector<double> orbit;
        double z = 0.0;
        for (int i = 0; i < p; ++i) {
            orbit.push_back(z);
            z = f.eval(z);
        }
        double min_gap = 2.0;
        for (std::size_t i = 0; i < orbit.size(); ++i)
            for (std::size_t j = i + 1; j < orbit.size(); ++j)
                min_gap = std::min(min_gap, std::abs(orbit[i] - orbit[j]));
        const bool ok = orbit_sign_pattern_check(orbit, rho(p).rho).ok;
        csv += std::to_string(p) + "," + fmt_double(std::abs(z)) + "," +
               fmt_double(min_gap) + "," + (ok ? "1" : "0") + "\n";
    }
    return csv;
}

std::string sizing_csv() {
    // Two readings of the experiment sizing: the smallest t the formula
    // admits per depth, and whether the t = 40 actually used satisfies the
    // capacity condition there.
    const double phi = rho(3).rho;
    std::string csv = "depth,width,t_min_formula,t_used,condition_met_at_t_used\n";
    for (int depth = 1; depth <= 5; ++depth) {
        const int t_min = min_compositions(depth, 20, phi);
        SeparationConfig cfg;
        cfg.rho = phi;
        cfg.L = phi;
        cfg.t = 40;
        cfg.u = 20;
        cfg.l = depth;
        cfg.x = 0.0;
        cfg.y = phi - 1.0;
        const bool met = theory_bound(cfg).condition_met;
        csv += std::to_string(depth) + ",20," + std::to_string(t_min) + ",40," +
               (met ? "1" : "0") + "\n";
    }
    return csv;
}

std::string trichotomy_csv() {
    std::string csv = "map,lipschitz,odd_period_leq_9,crossing_ratio_t20\n";
    struct Row {
        const char* name;
        PLFunction f;
        double x, y;
    };
    const double phi = rho(3).rho;
    std::vector<Row> rows;
    rows.push_back({"family3", hard_family(3), 0.0, phi - 1.0});
    rows.push_back({"tent", tent_map(), -1.0, 1.0});
    rows.push_back({"slope1.2", slope_family(1.2), -0.91, 0.09});
    for (const Row& row : rows) {
        const PeriodScan scan = detect_periods(row.f, 9, piece_budget_from_env());
        bool odd = false;
        for (int p : {3, 5, 7, 9})
            if (scan.has_period(p)) odd = true;
        const int c19 = count_crossings(self_compose(row.f, 19), row.x, row.y);
        const int c20 = count_crossings(self_compose(row.f, 20), row.x, row.y);
        const double ratio =
            c19 > 0 ? static_cast<double>(c20) / static_cast<double>(c19) : 0.0;
        csv += std::string(row.name) + "," + fmt_double(lipschitz(row.f)) + "," +
               (odd ? "1" : "0") + "," + fmt_double(ratio) + "\n";
    }
    return csv;
}

int cmd_report(const std::string& out_dir, bool quick,
               const std::string& function_spec, int epochs, int seeds, int samples,
               const std::vector<std::string>& raw_args) {
    // Validate external inputs before creating anything: no partial bundles.
    std::optional<PLFunction> user_fn;
    if (!function_spec.empty()) user_fn = parse_function_spec(function_spec);

    const fs::path final_dir = out_dir;
    const fs::path staging = out_dir + ".partial";
    if (fs::exists(final_dir) && !fs::is_empty(final_dir))
        throw UsageError("output directory exists and is not empty: " + out_dir);
    fs::remove_all(staging);

    {
        OutputSink sink(staging.string(), "report", raw_args);
        sink.manifest.seeds = seed_list(seeds);

        sink.write("rho_table.csv", rho_table_csv(15));
        sink.write("spectra_check.csv", spectra_check_csv());
        sink.write("family_validation.csv", family_validation_csv());
        sink.write("trichotomy.csv", trichotomy_csv());
        sink.write("sizing.csv", sizing_csv());

        if (user_fn) {
            const PeriodScan scan =
                detect_periods(*user_fn, 9, piece_budget_from_env());
            sink.write("user_function_periods.csv", period_scan_to_csv(scan));
        }

        TrainConfig cfg;
        cfg.epochs = epochs;
        cfg.sample_count = samples;

        const auto easy_runs = run_experiment(TaskKind::Easy, {1, 2, 3, 4, 5}, 20,
                                              cfg, sink.manifest.seeds);
        emit_experiment(sink, "easy", easy_runs);
        if (!quick) {
            const auto hard_runs = run_experiment(TaskKind::Hard, {1, 2, 3, 4, 5},
                                                  20, cfg, sink.manifest.seeds);
            emit_experiment(sink, "hard", hard_runs);
        }
        sink.finish();
    }

    fs::remove_all(final_dir);
    fs::rename(staging, final_dir);
    std::cout << "report bundle written to " << final_dir.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"interval-map dynamics and depth-width separation toolkit"};
    app.require_subcommand(1);

    std::vector<std::string> raw_args;
    for (int i = 1; i < argc; ++i) raw_args.emplace_back(argv[i]);

    // rho
    auto* rho_cmd = app.add_subcommand(
        "rho", "growth-rate roots: single period or comparison table");
    std::optional<int> rho_period;
    std::optional<int> rho_table;
    bool rho_legacy_flag = false;
    std::string rho_out;
    rho_cmd->add_option("--period", rho_period, "odd period p");
    rho_cmd->add_flag("--legacy", rho_legacy_flag, "use the earlier polynomial");
    rho_cmd->add_option("--table", rho_table, "emit p,rho_new,rho_legacy,gap up to p_max");
    rho_cmd->add_option("--out", rho_out, "output directory");

    // periods
    auto* periods_cmd =
        app.add_subcommand("periods", "periodic-orbit scan of an interval map");
    std::string periods_fn;
    int periods_max = 7;
    std::string periods_out;
    periods_cmd->add_option("--function", periods_fn,
                            "tent | family:p | slope:rho | file:path")->required();
    periods_cmd->add_option("--max", periods_max, "largest period to scan")->required();
    periods_cmd->add_option("--out", periods_out, "output directory");

    // bound
    auto* bound_cmd =
        app.add_subcommand("bound", "L1 separation bound for the hard family");
    int bound_p = 3, bound_t = 40, bound_width = 20, bound_depth = 4;
    bool bound_exact = false;
    std::string bound_out;
    bound_cmd->add_option("--p", bound_p, "odd period of the hard family")->required();
    bound_cmd->add_option("--t", bound_t, "number of compositions")->required();
    bound_cmd->add_option("--width", bound_width, "units per layer")->required();
    bound_cmd->add_option("--depth", bound_depth, "number of layers")->required();
    bound_cmd->add_flag("--exact-crossings", bound_exact,
                        "measure crossings from the exact composition");
    bound_cmd->add_option("--out", bound_out, "output directory");

    // train
    auto* train_cmd = app.add_subcommand("train", "regression experiments");
    std::string train_task = "easy", train_depths = "1..5", train_out;
    int train_width = 20, train_epochs = 1500, train_seeds = 3, train_samples = 4096;
    double train_lr = 1e-3;
    train_cmd->add_option("--task", train_task, "hard | easy")->required();
    train_cmd->add_option("--depths", train_depths, "e.g. 1..5 or 1,3,5");
    train_cmd->add_option("--width", train_width, "units per hidden layer");
    train_cmd->add_option("--epochs", train_epochs, "training epochs");
    train_cmd->add_option("--seeds", train_seeds, "number of seeds (1..k)");
    train_cmd->add_option("--samples", train_samples, "training grid size");
    train_cmd->add_option("--lr", train_lr, "Adam learning rate");
    train_cmd->add_option("--out", train_out, "output directory")->required();

    // report
    auto* report_cmd =
        app.add_subcommand("report", "full reproduction bundle (CSV + manifest)");
    std::string report_out, report_fn;
    bool report_quick = false;
    int report_epochs = 1500, report_seeds = 3, report_samples = 4096;
    report_cmd->add_option("--out", report_out, "output directory")->required();
    report_cmd->add_flag("--quick", report_quick, "skip the t=40 training runs");
    report_cmd->add_option("--function", report_fn,
                           "also scan a user map (tent|family:p|slope:rho|file:path)");
    report_cmd->add_option("--epochs", report_epochs, "training epochs");
    report_cmd->add_option("--seeds", report_seeds, "number of seeds");
    report_cmd->add_option("--samples", report_samples, "training grid size");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (rho_cmd->parsed())
            return cmd_rho(rho_period, rho_legacy_flag, rho_table, rho_out, raw_args);
        if (periods_cmd->parsed())
            return cmd_periods(periods_fn, periods_max, periods_out, raw_args);
        if (bound_cmd->parsed())
            return cmd_bound(bound_p, bound_t, bound_width, bound_depth, bound_exact,
                             bound_out, raw_args);
        if (train_cmd->parsed())
            return cmd_train(train_task, train_depths, train_width, train_epochs,
                             train_seeds, train_samples, train_lr, train_out,
                             raw_args);
        if (report_cmd->parsed())
            return cmd_report(report_out, report_quick, report_fn, report_epochs,
                              report_seeds, report_samples, raw_args);
        std::cerr << "no subcommand\n";
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::out_of_range& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}
