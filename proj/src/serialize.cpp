#include "chaossep/serialize.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace chaossep {

using nlohmann::json;

std::string fmt_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last)
        throw std::invalid_argument("parse_double: bad number '" + text + "'");
    return v;
}

// --- PLFunction -------------------------------------------------------------

std::string pl_to_csv(const PLFunction& f) {
    std::string out = "x,y\n";
    for (const Knot& k : f.knots())
        out += fmt_double(k.x) + "," + fmt_double(k.y) + "\n";
    return out;
}

PLFunction pl_from_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "x,y")
        throw std::invalid_argument("pl_from_csv: missing 'x,y' header");
    std::vector<Knot> knots;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::invalid_argument("pl_from_csv: malformed row '" + line + "'");
        knots.push_back({parse_double(line.substr(0, comma)),
                         parse_double(line.substr(comma + 1))});
    }
    return PLFunction(std::move(knots));
}

std::string pl_to_json(const PLFunction& f) {
    json j;
    j["domain"] = {f.domain_lo(), f.domain_hi()};
    json knots = json::array();
    for (const Knot& k : f.knots()) knots.push_back({k.x, k.y});
    j["knots"] = std::move(knots);
    return j.dump();
}

PLFunction pl_from_json(const std::string& text) {
    const json j = json::parse(text);
    std::vector<Knot> knots;
    for (const auto& pair : j.at("knots"))
        knots.push_back({pair.at(0).get<double>(), pair.at(1).get<double>()});
    PLFunction f(std::move(knots));
    const auto& dom = j.at("domain");
    if (dom.at(0).get<double>() != f.domain_lo() ||
        dom.at(1).get<double>() != f.domain_hi())
        throw std::invalid_argument("pl_from_json: domain does not match knot range");
    return f;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

PLFunction pl_from_file(const std::string& path) {
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json")
        return pl_from_json(read_text_file(path));
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    return pl_from_csv(in);
}

// --- dynamics ---------------------------------------------------------------

std::string orbit_to_json(const Orbit& orbit) {
    json j;
    j["period"] = orbit.period;
    j["points"] = orbit.points;
    j["residual"] = orbit.closure_residual;
    return j.dump();
}

std::string period_scan_to_csv(const PeriodScan& scan) {
    std::string out = "period,orbit_index,point_index,value\n";
    for (const auto& [period, orbits] : scan.orbits) {
        for (std::size_t o = 0; o < orbits.size(); ++o)
            for (std::size_t i = 0; i < orbits[o].points.size(); ++i)
                out += std::to_string(period) + "," + std::to_string(o) + "," +
                       std::to_string(i) + "," + fmt_double(orbits[o].points[i]) + "\n";
    }
    return out;
}

// --- covering ---------------------------------------------------------------

std::string graph_to_json(const CoveringGraph& graph) {
    json j;
    j["p"] = graph.p;
    json intervals = json::array();
    for (const LabeledInterval& iv : graph.intervals) {
        json entry;
        entry["label"] = iv.label;
        if (!graph.symbolic) {
            entry["lo"] = iv.lo;
            entry["hi"] = iv.hi;
        }
        intervals.push_back(std::move(entry));
    }
    j["intervals"] = std::move(intervals);
    j["adjacency"] = graph.adjacency;
    return j.dump();
}

std::string trace_to_csv(const OscillationTrace& trace) {
    std::string out = "t,label,delta\n";
    for (std::size_t t = 0; t < trace.delta.size(); ++t)
        for (std::size_t i = 0; i < trace.labels.size(); ++i)
            out += std::to_string(t) + "," + trace.labels[i] + "," +
                   trace.delta[t][i].to_string() + "\n";
    return out;
}

// --- separation -------------------------------------------------------------

namespace {

json separation_json(const SeparationConfig& cfg, const SeparationReport& report) {
    json j;
    j["rho"] = cfg.rho;
    j["L"] = cfg.L;
    j["t"] = cfg.t;
    j["u"] = cfg.u;
    j["l"] = cfg.l;
    j["x"] = cfg.x;
    j["y"] = cfg.y;
    j["capacity"] = report.capacity.to_string();
    j["condition_met"] = report.condition_met;
    j["floor_headline"] = report.floor_headline;
    j["floor_refined"] = report.floor_refined;
    j["crossings_used"] = report.crossings_used;
    j["crossings_measured"] = report.crossings_measured;
    if (!report.warning.empty()) j["warning"] = report.warning;
    return j;
}

}  // namespace

std::string separation_report_to_json(const SeparationConfig& cfg,
                                      const SeparationReport& report) {
    return separation_json(cfg, report).dump(2);
}

std::string separation_report_csv_header() {
    return "rho,L,t,u,l,x,y,capacity,condition,floor_headline,floor_refined";
}

std::string separation_report_to_csv_row(const SeparationConfig& cfg,
                                         const SeparationReport& report) {
    std::string out;
    out += fmt_double(cfg.rho) + "," + fmt_double(cfg.L) + ",";
    out += std::to_string(cfg.t) + "," + std::to_string(cfg.u) + "," +
           std::to_string(cfg.l) + ",";
    out += fmt_double(cfg.x) + "," + fmt_double(cfg.y) + ",";
    out += report.capacity.to_string() + ",";
    out += report.condition_met ? "1," : "0,";
    out += fmt_double(report.floor_headline) + "," + fmt_double(report.floor_refined);
    return out;
}

// --- mlp --------------------------------------------------------------------

std::string experiment_rows_to_csv(const std::vector<ExperimentRun>& runs) {
    std::string out = "task,depth,width,seed,epochs,mse,l1,floor\n";
    for (const ExperimentRun& run : runs) {
        out += run.task + "," + std::to_string(run.depth) + "," +
               std::to_string(run.width) + "," + std::to_string(run.seed) + "," +
               std::to_string(run.epochs) + "," + fmt_double(run.result.final_mse) +
               "," + fmt_double(run.result.l1) + "," +
               fmt_double(run.floor_headline) + "\n";
    }
    return out;
}

std::string loss_curve_to_csv(const std::vector<double>& losses) {
    std::string out = "epoch,loss\n";
    for (std::size_t i = 0; i < losses.size(); ++i)
        out += std::to_string(i + 1) + "," + fmt_double(losses[i]) + "\n";
    return out;
}

std::string model_to_json(const MlpModel& m) {
    json j;
    j["depth"] = m.depth;
    j["width"] = m.width;
    j["seed"] = m.seed;
    json dims = json::array();
    std::vector<double> params;
    for (int k = 0; k <= m.depth; ++k) {
        dims.push_back({m.fan_out(k), m.fan_in(k)});
        const auto& w = m.weights[static_cast<std::size_t>(k)];
        const auto& b = m.biases[static_cast<std::size_t>(k)];
        params.insert(params.end(), w.begin(), w.end());
        params.insert(params.end(), b.begin(), b.end());
    }
    j["layer_dims"] = std::move(dims);
    j["parameters"] = std::move(params);
    return j.dump();
}

MlpModel model_from_json(const std::string& text) {
    const json j = json::parse(text);
    MlpModel m;
    m.depth = j.at("depth").get<int>();
    m.width = j.at("width").get<int>();
    m.seed = j.at("seed").get<std::uint64_t>();
    const auto params = j.at("parameters").get<std::vector<double>>();
    std::size_t pos = 0;
    for (int k = 0; k <= m.depth; ++k) {
        const auto fi = static_cast<std::size_t>(m.fan_in(k));
        const auto fo = static_cast<std::size_t>(m.fan_out(k));
        if (pos + fi * fo + fo > params.size())
            throw std::invalid_argument("model_from_json: parameter array too short");
        m.weights.emplace_back(params.begin() + static_cast<long>(pos),
                               params.begin() + static_cast<long>(pos + fi * fo));
        pos += fi * fo;
        m.biases.emplace_back(params.begin() + static_cast<long>(pos),
                              params.begin() + static_cast<long>(pos + fo));
        pos += fo;
    }
    if (pos != params.size())
        throw std::invalid_argument("model_from_json: trailing parameters");
    return m;
}

// --- run manifest -----------------------------------------------------------

std::string manifest_to_json(const RunManifest& manifest) {
    json j;
    j["command"] = manifest.command;
    j["args"] = manifest.args;
    j["seeds"] = manifest.seeds;
    j["version"] = manifest.version;
    j["outputs"] = manifest.outputs;
    j["wall_time_s"] = manifest.wall_time_s;
    return j.dump(2);
}

}  // namespace chaossep
