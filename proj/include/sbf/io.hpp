#pragma once

// Run configuration files, trace writers and readers, and run reports.
//
// Config files hold one JSON object:
//   {
//     "scenario": "pendulum_wide",
//     "pendulum": { "gravity_feedforward": true },
//     "unicycle": { "goal": [2, 4.5], "map": { ... } },
//     "filter": { "rho1": 100, "alpha": 1, "eps": 0, "eps_mode": "manual", ... },
//     "sim": { "x0": [0.5, 0], "duration": 20, "delta_t": 0.1, "law": "single" },
//     "initial_states": [[0.5, 0], [1, 0]],
//     "output": { "path": "trace.csv", "format": "csv", "report": "report.json" },
//     "assert": { "safe": true, "beta_positive": true, "admissible": true }
//   }
// Every section is optional except "scenario"; omitted values come from the
// scenario preset. Unknown keys are rejected.

#include "sbf/sim.hpp"

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace sbf {

class ConfigError : public Error
{
public:
    using Error::Error;
};

enum class TraceFormat { csv, ndjson };

TraceFormat parse_trace_format(std::string_view name);
std::string_view to_string(TraceFormat f);

struct Assertions
{
    std::optional<bool> safe;          // true: min h_s >= 0 required; false: a violation is expected
    std::optional<bool> beta_positive; // min beta > 0
    bool admissible = true;            // every control inside U to 1e-9
    std::optional<double> goal_tolerance;
};

struct RunConfig
{
    std::string scenario;
    PendulumOptions pendulum;
    UnicycleConfig unicycle;
    FilterConfig filter;
    std::size_t estimate_samples = 2000; // for lipschitz eps without l_s / l_phi
    SimConfig sim;
    std::vector<Vector> initial_states;  // batch; empty means sim.x0 only
    std::string output_path;
    TraceFormat format = TraceFormat::csv;
    std::string report_path;
    Assertions assertions;
};

RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);
nlohmann::json to_json(const RunConfig& cfg);

UnicycleMap parse_unicycle_map(const nlohmann::json& j);
nlohmann::json to_json(const UnicycleMap& map);

// ---------------------------------------------------------------------------
// Traces. One record per control step.

struct TraceRecord
{
    double t = 0;
    std::vector<double> x;
    std::vector<double> u;
    double h_s = 0;
    double h = 0;
    double hbar = 0;
    std::vector<double> hbar_per_backup;
    double beta = 0;
    double gamma = 0;
    double sigma = 0;
    std::size_t q = 0;
    std::string branch;

    bool operator==(const TraceRecord&) const = default;
};

std::vector<TraceRecord> trace_records(const SimTrace& trace);

/// Columns t, x1..xn, u1..um, h, hbar, beta, gamma, sigma, q, branch.
void write_csv(std::ostream& os, const std::vector<TraceRecord>& records);
void write_ndjson(std::ostream& os, const std::vector<TraceRecord>& records);
std::vector<TraceRecord> read_ndjson(std::istream& is);

nlohmann::json to_json(const Metrics& m);
nlohmann::json to_json(const EstimatedConstants& c);

} // namespace sbf
