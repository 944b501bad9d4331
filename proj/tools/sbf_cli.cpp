// sbf: run filtered closed-loop simulations from a config file, or run one of
// the sampled invariant suites against a scenario preset.
//
//   sbf run <config> [--output trace.csv] [--format csv|ndjson] [--seed 7]
//   sbf check <scenario> <suite> [--samples K] [--output report.json] [--seed 7]
//
// Exit codes: 0 success, 1 failed assertion or check, 2 bad config or
// arguments, 3 aborted simulation.

#include "sbf/checks.hpp"
#include "sbf/io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kAssertionFailed = 1;
constexpr int kConfigError = 2;
constexpr int kAborted = 3;

std::string run_path(const std::string& base, std::size_t index, std::size_t count)
{
    if (count <= 1)
        return base;
    const fs::path p(base);
    return (p.parent_path() / (p.stem().string() + "_" + std::to_string(index) + p.extension().string())).string();
}

struct RunOutcome
{
    json report;
    bool aborted = false;
    bool assertions_passed = true;
};

RunOutcome run_one(const sbf::RunConfig& cfg, const sbf::Scenario& scenario, const sbf::Vector& x0,
                   const std::string& trace_path)
{
    sbf::SimConfig sim = cfg.sim;
    sim.x0 = x0;
    const sbf::SimTrace trace = sbf::simulate(scenario, cfg.filter, sim);
    const sbf::Metrics m = sbf::metrics(trace, scenario);

    {
        std::ofstream os(trace_path);
        if (!os)
            throw sbf::Error("cannot write " + trace_path);
        const auto records = sbf::trace_records(trace);
        if (cfg.format == sbf::TraceFormat::csv)
            sbf::write_csv(os, records);
        else
            sbf::write_ndjson(os, records);
    }

    RunOutcome out;
    out.aborted = trace.aborted;
    json flags = json::array();
    const bool violated = m.min_h_s.value < 0;
    if (violated)
        flags.push_back("SAFETY_VIOLATED");
    if (m.min_beta.value <= 0)
        flags.push_back("BETA_NONPOSITIVE");
    if (m.max_violation > 1e-9)
        flags.push_back("INADMISSIBLE_CONTROL");
    if (trace.aborted)
        flags.push_back("ABORTED");

    json checks = json::object();
    auto record = [&](const char* name, bool ok) {
        checks[name] = ok;
        out.assertions_passed = out.assertions_passed && ok;
    };
    const sbf::Assertions& a = cfg.assertions;
    if (a.safe)
        record("safe", *a.safe ? !violated : violated);
    if (a.beta_positive)
        record("beta_positive", (m.min_beta.value > 0) == *a.beta_positive);
    if (a.admissible)
        record("admissible", m.max_violation <= 1e-9);
    if (a.goal_tolerance)
        record("goal", m.terminal_goal_distance && *m.terminal_goal_distance <= *a.goal_tolerance);

    json events = json::array();
    for (const sbf::SwitchEvent& e : trace.events)
        events.push_back({{"t", e.t}, {"from", e.from}, {"to", e.to}});

    out.report = json{{"x0", std::vector<double>(x0.data(), x0.data() + x0.size())},
                      {"trace", trace_path},
                      {"metrics", sbf::to_json(m)},
                      {"flags", flags},
                      {"assertions", checks},
                      {"warnings", trace.warnings},
                      {"events", events},
                      {"aborted", trace.aborted},
                      {"abort_reason", trace.abort_reason}};
    return out;
}

int run_command(const std::string& config_path, const std::string& output, const std::string& format,
                std::optional<std::uint64_t> seed)
{
    sbf::RunConfig cfg;
    std::optional<sbf::Scenario> preset;
    try {
        cfg = sbf::load_run_config(config_path);
        if (!output.empty())
            cfg.output_path = output;
        if (!format.empty())
            cfg.format = sbf::parse_trace_format(format);
        if (seed)
            cfg.sim.seed = *seed;
        preset = sbf::make_preset(cfg.scenario, cfg.pendulum, cfg.unicycle).scenario;
        for (const sbf::Vector& x : cfg.initial_states) {
            sbf::SimConfig probe = cfg.sim;
            probe.x0 = x;
            probe.validate(preset->model.state_dim);
        }
    } catch (const sbf::Error& e) {
        std::cerr << "sbf: " << e.what() << '\n';
        return kConfigError;
    }
    const sbf::Scenario& scenario = *preset;

    json estimate = nullptr;
    if (cfg.filter.eps_mode == sbf::EpsMode::lipschitz && !(cfg.filter.l_s && cfg.filter.l_phi)) {
        try {
            const sbf::EstimatedConstants c =
                sbf::estimate_constants(scenario, cfg.filter, cfg.estimate_samples, cfg.sim.seed);
            cfg.filter.l_s = cfg.filter.l_s.value_or(c.l_s);
            cfg.filter.l_phi = cfg.filter.l_phi.value_or(c.l_phi);
            estimate = sbf::to_json(c);
        } catch (const sbf::Error& e) {
            std::cerr << "sbf: " << e.what() << '\n';
            return kConfigError;
        }
    }

    if (cfg.output_path.empty())
        cfg.output_path = cfg.scenario + (cfg.format == sbf::TraceFormat::csv ? ".csv" : ".ndjson");
    if (cfg.report_path.empty()) {
        const fs::path p(cfg.output_path);
        cfg.report_path = (p.parent_path() / (p.stem().string() + ".report.json")).string();
    }

    std::vector<sbf::Vector> starts = cfg.initial_states;
    if (starts.empty())
        starts.push_back(cfg.sim.x0);

    // Independent runs, each with its own trace file.
    std::vector<std::future<RunOutcome>> jobs;
    for (std::size_t i = 0; i < starts.size(); ++i)
        jobs.push_back(std::async(std::launch::async, run_one, std::cref(cfg), std::cref(scenario),
                                  std::cref(starts[i]), run_path(cfg.output_path, i, starts.size())));

    json runs = json::array();
    bool aborted = false, passed = true;
    try {
        for (auto& job : jobs) {
            RunOutcome r = job.get();
            aborted = aborted || r.aborted;
            passed = passed && r.assertions_passed;
            runs.push_back(std::move(r.report));
        }
    } catch (const sbf::Error& e) {
        std::cerr << "sbf: " << e.what() << '\n';
        return kAborted;
    }

    json report{{"config", sbf::to_json(cfg)}, {"runs", runs}, {"passed", passed && !aborted}};
    if (!estimate.is_null())
        report["estimated_constants"] = estimate;
    std::ofstream(cfg.report_path) << report.dump(2) << '\n';

    for (const json& r : runs) {
        std::cout << r["trace"].get<std::string>() << ": min h_s " << r["metrics"]["min_h_s"]["value"].get<double>()
                  << ", min beta " << r["metrics"]["min_beta"]["value"].get<double>();
        for (const json& f : r["flags"])
            std::cout << ' ' << f.get<std::string>();
        std::cout << '\n';
    }
    std::cout << "report: " << cfg.report_path << '\n';
    if (aborted)
        return kAborted;
    return passed ? kOk : kAssertionFailed;
}

int check_command(const std::string& scenario, const std::string& suite, std::size_t samples,
                  const std::string& output, std::uint64_t seed)
{
    sbf::checks::SuiteReport report;
    try {
        const auto& names = sbf::checks::suite_names();
        if (std::find(names.begin(), names.end(), suite) == names.end())
            throw sbf::Error("unknown suite '" + suite + "'");
        // softnum and optim draw their own instances and ignore the scenario.
        if (suite == "softnum")
            report = sbf::checks::softnum_suite(samples, seed);
        else if (suite == "optim")
            report = sbf::checks::optim_suite(samples, seed);
        else
            report = sbf::checks::run_suite(suite, sbf::make_preset(scenario), samples, seed);
    } catch (const sbf::Error& e) {
        std::cerr << "sbf: " << e.what() << '\n';
        return kConfigError;
    }
    const json j = sbf::checks::to_json(report);
    if (!output.empty())
        std::ofstream(output) << j.dump(2) << '\n';
    for (const sbf::checks::CheckResult& c : report.checks)
        std::cout << (c.passed() ? "PASS " : "FAIL ") << c.name << "  samples=" << c.samples
                  << " violations=" << c.violations << " worst=" << c.worst << " threshold=" << c.threshold
                  << (c.passed() ? "" : "  witness: " + c.witness) << '\n';
    std::cout << report.suite << " on " << report.scenario << ": " << (report.passed() ? "passed" : "FAILED") << " in "
              << report.seconds << " s\n";
    return report.passed() ? kOk : kAssertionFailed;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Soft-minimum backup safety filter"};
    app.require_subcommand(1);

    std::string output, format;
    std::optional<std::uint64_t> seed;
    app.add_option("--output", output, "Trace path (run) or report path (check)");
    app.add_option("--format", format, "Trace format")->check(CLI::IsMember({"csv", "ndjson"}));
    app.add_option("--seed", seed, "Sampling seed");

    auto* run = app.add_subcommand("run", "Simulate the runs described by a config file");
    std::string config;
    run->add_option("config", config, "Config file")->required();

    auto* check = app.add_subcommand("check", "Run a sampled invariant suite");
    std::string scenario, suite;
    std::size_t samples = 0;
    check->add_option("scenario", scenario, "Scenario preset")->required();
    check->add_option("suite", suite, "softnum, gradients, sets, optim or control")->required();
    check->add_option("--samples", samples, "Sample budget (0 selects the suite default)");

    for (auto* sub : {run, check}) {
        sub->add_option("--output", output, "Trace path (run) or report path (check)");
        sub->add_option("--format", format, "Trace format")->check(CLI::IsMember({"csv", "ndjson"}));
        sub->add_option("--seed", seed, "Sampling seed");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    if (*run)
        return run_command(config, output, format, seed);
    return check_command(scenario, suite, samples, output, seed.value_or(1));
}
