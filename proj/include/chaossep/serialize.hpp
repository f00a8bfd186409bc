#ifndef CHAOSSEP_SERIALIZE_HPP
#define CHAOSSEP_SERIALIZE_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "chaossep/covering.hpp"
#include "chaossep/dynamics.hpp"
#include "chaossep/mlp.hpp"
#include "chaossep/pl_function.hpp"
#include "chaossep/separation.hpp"

namespace chaossep {

inline constexpr const char* kToolVersion = "0.1.0";

/// Shortest decimal string that parses back to exactly the same double.
std::string fmt_double(double v);

/// Strict double parser (whole string must be consumed).
double parse_double(const std::string& text);

// --- PLFunction -------------------------------------------------------------

std::string pl_to_csv(const PLFunction& f);
PLFunction pl_from_csv(std::istream& in);

std::string pl_to_json(const PLFunction& f);
PLFunction pl_from_json(const std::string& text);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

/// Loads a PLFunction from a .csv or .json file (decided by extension).
PLFunction pl_from_file(const std::string& path);

// --- dynamics ---------------------------------------------------------------

std::string orbit_to_json(const Orbit& orbit);
std::string period_scan_to_csv(const PeriodScan& scan);

// --- covering ---------------------------------------------------------------

std::string graph_to_json(const CoveringGraph& graph);
std::string trace_to_csv(const OscillationTrace& trace);

// --- separation -------------------------------------------------------------

std::string separation_report_to_json(const SeparationConfig& cfg,
                                      const SeparationReport& report);
std::string separation_report_csv_header();
std::string separation_report_to_csv_row(const SeparationConfig& cfg,
                                         const SeparationReport& report);

// --- mlp --------------------------------------------------------------------

std::string experiment_rows_to_csv(const std::vector<ExperimentRun>& runs);
std::string loss_curve_to_csv(const std::vector<double>& losses);
std::string model_to_json(const MlpModel& m);
MlpModel model_from_json(const std::string& text);

// --- run manifest -----------------------------------------------------------

struct RunManifest {
    std::string command;
    std::vector<std::string> args;
    std::vector<std::uint64_t> seeds;
    std::string version = kToolVersion;
    std::vector<std::string> outputs;
    double wall_time_s = 0.0;
};

std::string manifest_to_json(const RunManifest& manifest);

}  // namespace chaossep

#endif
