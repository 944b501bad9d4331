#include "sbf/io.hpp"

#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace sbf {

using nlohmann::json;

namespace {

void check_keys(const json& j, std::initializer_list<std::string_view> allowed, const std::string& where)
{
    if (!j.is_object())
        throw ConfigError(where + ": expected an object");
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (std::string_view a : allowed)
            ok = ok || key == a;
        if (!ok)
            throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

double number(const json& j, const std::string& key, const std::string& where)
{
    const json& v = j.at(key);
    if (!v.is_number())
        throw ConfigError(where + "." + key + ": expected a number");
    return v.get<double>();
}

void read(const json& j, const char* key, double& out, const std::string& where)
{
    if (j.contains(key))
        out = number(j, key, where);
}

// null leaves the value unset, matching the echo of an unset constant.
void read(const json& j, const char* key, std::optional<double>& out, const std::string& where)
{
    if (j.contains(key) && !j.at(key).is_null())
        out = number(j, key, where);
}

void read(const json& j, const char* key, int& out, const std::string& where)
{
    if (!j.contains(key))
        return;
    const json& v = j.at(key);
    if (!v.is_number_integer())
        throw ConfigError(where + "." + key + ": expected an integer");
    out = v.get<int>();
}

void read(const json& j, const char* key, bool& out, const std::string& where)
{
    if (!j.contains(key))
        return;
    const json& v = j.at(key);
    if (!v.is_boolean())
        throw ConfigError(where + "." + key + ": expected true or false");
    out = v.get<bool>();
}

void read(const json& j, const char* key, std::optional<bool>& out, const std::string& where)
{
    if (j.contains(key)) {
        bool b = false;
        read(j, key, b, where);
        out = b;
    }
}

std::string string(const json& j, const char* key, const std::string& where)
{
    const json& v = j.at(key);
    if (!v.is_string())
        throw ConfigError(where + "." + key + ": expected a string");
    return v.get<std::string>();
}

Vector vector(const json& v, const std::string& where)
{
    if (!v.is_array() || v.empty())
        throw ConfigError(where + ": expected a nonempty array of numbers");
    Vector out(Eigen::Index(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number())
            throw ConfigError(where + ": expected a nonempty array of numbers");
        out(Eigen::Index(i)) = v[i].get<double>();
    }
    return out;
}

json to_array(const Vector& v)
{
    return json(std::vector<double>(v.data(), v.data() + v.size()));
}

template <typename Fn>
auto as_config_error(Fn&& fn) -> decltype(fn())
{
    try {
        return fn();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
}

std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double read_double(const json& v)
{
    return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
}

json optional_number(const std::optional<double>& v)
{
    return v ? json(*v) : json(nullptr);
}

json to_json(const Extremum& e)
{
    return json{{"value", e.value}, {"t", e.t}};
}

} // namespace

TraceFormat parse_trace_format(std::string_view name)
{
    if (name == "csv")
        return TraceFormat::csv;
    if (name == "ndjson")
        return TraceFormat::ndjson;
    throw ConfigError("unknown trace format '" + std::string(name) + "' (expected csv or ndjson)");
}

std::string_view to_string(TraceFormat f)
{
    return f == TraceFormat::csv ? "csv" : "ndjson";
}

UnicycleMap parse_unicycle_map(const json& j)
{
    check_keys(j, {"wall", "obstacles", "rho"}, "unicycle.map");
    UnicycleMap map;
    if (!j.contains("wall") || !j.contains("obstacles"))
        throw ConfigError("unicycle.map: missing obstacle parameters ('wall' and 'obstacles' are required)");
    const json& w = j.at("wall");
    check_keys(w, {"ax", "ay", "av", "bv", "c", "p"}, "unicycle.map.wall");
    for (const char* k : {"ax", "ay", "av", "bv", "c", "p"})
        if (!w.contains(k))
            throw ConfigError(std::string("unicycle.map.wall: missing obstacle parameter '") + k + "'");
    map.wall = WallShape{number(w, "ax", "wall"), number(w, "ay", "wall"), number(w, "av", "wall"),
                         number(w, "bv", "wall"), number(w, "c", "wall"), number(w, "p", "wall")};
    const json& obs = j.at("obstacles");
    if (!obs.is_array())
        throw ConfigError("unicycle.map.obstacles: expected an array");
    map.obstacles.clear();
    for (std::size_t i = 0; i < obs.size(); ++i) {
        const std::string where = "unicycle.map.obstacles[" + std::to_string(i) + "]";
        const json& o = obs[i];
        check_keys(o, {"ax", "ay", "av", "bx", "by", "bv", "c", "p"}, where);
        for (const char* k : {"ax", "ay", "av", "bx", "by", "bv", "c", "p"})
            if (!o.contains(k))
                throw ConfigError(where + ": missing obstacle parameter '" + k + "'");
        map.obstacles.push_back(ObstacleShape{number(o, "ax", where), number(o, "ay", where), number(o, "av", where),
                                              number(o, "bx", where), number(o, "by", where), number(o, "bv", where),
                                              number(o, "c", where), number(o, "p", where)});
    }
    read(j, "rho", map.rho, "unicycle.map");
    return map;
}

json to_json(const UnicycleMap& map)
{
    json obstacles = json::array();
    for (const ObstacleShape& o : map.obstacles)
        obstacles.push_back({{"ax", o.ax}, {"ay", o.ay}, {"av", o.av}, {"bx", o.bx}, {"by", o.by}, {"bv", o.bv},
                             {"c", o.c}, {"p", o.p}});
    const WallShape& w = map.wall;
    return json{{"wall", {{"ax", w.ax}, {"ay", w.ay}, {"av", w.av}, {"bv", w.bv}, {"c", w.c}, {"p", w.p}}},
                {"obstacles", obstacles},
                {"rho", map.rho}};
}

RunConfig parse_run_config(const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    check_keys(j, {"scenario", "pendulum", "unicycle", "filter", "sim", "initial_states", "output", "assert"},
               "config");
    if (!j.contains("scenario"))
        throw ConfigError("config: 'scenario' is required");

    RunConfig cfg;
    cfg.scenario = string(j, "scenario", "config");
    const bool is_unicycle = cfg.scenario == "unicycle";

    if (j.contains("pendulum")) {
        if (is_unicycle)
            throw ConfigError("config: 'pendulum' section given for the unicycle scenario");
        const json& p = j.at("pendulum");
        check_keys(p, {"gravity_feedforward"}, "pendulum");
        read(p, "gravity_feedforward", cfg.pendulum.gravity_feedforward, "pendulum");
    }
    if (j.contains("unicycle")) {
        if (!is_unicycle)
            throw ConfigError("config: 'unicycle' section given for a pendulum scenario");
        const json& u = j.at("unicycle");
        check_keys(u, {"goal", "map", "d", "ubar1", "ubar2", "mu", "speed_margin", "mu1", "mu2"}, "unicycle");
        UnicycleConfig& uc = cfg.unicycle;
        if (u.contains("goal"))
            uc.goal = vector(u.at("goal"), "unicycle.goal");
        if (u.contains("map"))
            uc.map = parse_unicycle_map(u.at("map"));
        read(u, "d", uc.d, "unicycle");
        read(u, "ubar1", uc.ubar1, "unicycle");
        read(u, "ubar2", uc.ubar2, "unicycle");
        read(u, "mu", uc.mu, "unicycle");
        read(u, "speed_margin", uc.speed_margin, "unicycle");
        read(u, "mu1", uc.mu1, "unicycle");
        read(u, "mu2", uc.mu2, "unicycle");
    }

    const Preset preset = as_config_error([&] { return make_preset(cfg.scenario, cfg.pendulum, cfg.unicycle); });
    cfg.filter = preset.filter;
    cfg.sim = preset.sim;

    if (j.contains("filter")) {
        const json& f = j.at("filter");
        check_keys(f,
                   {"rho1", "rho2", "alpha", "eps", "eps_mode", "l_s", "l_phi", "kappa_h", "kappa_beta", "N", "Ts",
                    "substeps", "sigma", "estimate_samples"},
                   "filter");
        FilterConfig& fc = cfg.filter;
        read(f, "rho1", fc.rho1, "filter");
        read(f, "rho2", fc.rho2, "filter");
        read(f, "alpha", fc.alpha, "filter");
        read(f, "eps", fc.eps, "filter");
        read(f, "l_s", fc.l_s, "filter");
        read(f, "l_phi", fc.l_phi, "filter");
        read(f, "kappa_h", fc.kappa_h, "filter");
        read(f, "kappa_beta", fc.kappa_beta, "filter");
        read(f, "N", fc.grid.samples, "filter");
        read(f, "Ts", fc.grid.period, "filter");
        read(f, "substeps", fc.grid.substeps, "filter");
        if (f.contains("eps_mode")) {
            const std::string mode = string(f, "eps_mode", "filter");
            if (mode == "manual")
                fc.eps_mode = EpsMode::manual;
            else if (mode == "lipschitz")
                fc.eps_mode = EpsMode::lipschitz;
            else
                throw ConfigError("filter.eps_mode: expected 'manual' or 'lipschitz'");
        }
        if (f.contains("sigma") && string(f, "sigma", "filter") != "piecewise_linear")
            throw ConfigError("filter.sigma: only 'piecewise_linear' is available");
        int samples = int(cfg.estimate_samples);
        read(f, "estimate_samples", samples, "filter");
        if (samples < 1000)
            throw ConfigError("filter.estimate_samples: need at least 1000");
        cfg.estimate_samples = std::size_t(samples);
    }

    if (j.contains("sim")) {
        const json& s = j.at("sim");
        check_keys(s, {"x0", "duration", "delta_t", "law", "plant_substeps", "seed"}, "sim");
        SimConfig& sc = cfg.sim;
        if (s.contains("x0"))
            sc.x0 = vector(s.at("x0"), "sim.x0");
        read(s, "duration", sc.duration, "sim");
        read(s, "delta_t", sc.delta_t, "sim");
        read(s, "plant_substeps", sc.plant_substeps, "sim");
        if (s.contains("law"))
            sc.law = as_config_error([&] { return parse_law(string(s, "law", "sim")); });
        if (s.contains("seed")) {
            if (!s.at("seed").is_number_unsigned())
                throw ConfigError("sim.seed: expected a nonnegative integer");
            sc.seed = s.at("seed").get<std::uint64_t>();
        }
    }

    if (j.contains("initial_states")) {
        const json& list = j.at("initial_states");
        if (!list.is_array() || list.empty())
            throw ConfigError("initial_states: expected a nonempty array of states");
        for (std::size_t i = 0; i < list.size(); ++i)
            cfg.initial_states.push_back(vector(list[i], "initial_states[" + std::to_string(i) + "]"));
    }

    if (j.contains("output")) {
        const json& o = j.at("output");
        check_keys(o, {"path", "format", "report"}, "output");
        if (o.contains("path"))
            cfg.output_path = string(o, "path", "output");
        if (o.contains("format"))
            cfg.format = parse_trace_format(string(o, "format", "output"));
        if (o.contains("report"))
            cfg.report_path = string(o, "report", "output");
    }

    if (j.contains("assert")) {
        const json& a = j.at("assert");
        check_keys(a, {"safe", "beta_positive", "admissible", "goal_tolerance"}, "assert");
        read(a, "safe", cfg.assertions.safe, "assert");
        read(a, "beta_positive", cfg.assertions.beta_positive, "assert");
        read(a, "admissible", cfg.assertions.admissible, "assert");
        read(a, "goal_tolerance", cfg.assertions.goal_tolerance, "assert");
    }

    as_config_error([&] {
        cfg.filter.validate();
        const int n = preset.scenario.model.state_dim;
        cfg.sim.validate(n);
        for (const Vector& x0 : cfg.initial_states) {
            SimConfig probe = cfg.sim;
            probe.x0 = x0;
            probe.validate(n);
        }
        return 0;
    });
    return cfg;
}

RunConfig load_run_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_run_config(text.str());
}

json to_json(const RunConfig& cfg)
{
    const FilterConfig& f = cfg.filter;
    json filter{{"rho1", f.rho1},
                {"rho2", f.rho2},
                {"alpha", f.alpha},
                {"eps", f.eps},
                {"eps_mode", f.eps_mode == EpsMode::manual ? "manual" : "lipschitz"},
                {"l_s", optional_number(f.l_s)},
                {"l_phi", optional_number(f.l_phi)},
                {"kappa_h", f.kappa_h},
                {"kappa_beta", f.kappa_beta},
                {"N", f.grid.samples},
                {"Ts", f.grid.period},
                {"substeps", f.grid.substeps},
                {"sigma", "piecewise_linear"},
                {"estimate_samples", cfg.estimate_samples}};
    if (f.eps_mode == EpsMode::manual || (f.l_s && f.l_phi))
        filter["resolved_eps"] = f.resolved_eps();

    const SimConfig& s = cfg.sim;
    json sim{{"x0", to_array(s.x0)},
             {"duration", s.duration},
             {"delta_t", s.delta_t},
             {"law", std::string(to_string(s.law))},
             {"plant_substeps", s.plant_substeps},
             {"seed", s.seed}};

    json out{{"scenario", cfg.scenario}, {"filter", filter}, {"sim", sim}};
    if (cfg.scenario == "unicycle") {
        const UnicycleConfig& u = cfg.unicycle;
        out["unicycle"] = json{{"goal", to_array(u.goal)},
                               {"map", to_json(u.map)},
                               {"d", u.d},
                               {"ubar1", u.ubar1},
                               {"ubar2", u.ubar2},
                               {"mu", u.mu},
                               {"speed_margin", u.speed_margin},
                               {"mu1", u.mu1},
                               {"mu2", u.mu2}};
    } else {
        out["pendulum"] = json{{"gravity_feedforward", cfg.pendulum.gravity_feedforward}};
    }
    if (!cfg.initial_states.empty()) {
        json list = json::array();
        for (const Vector& x0 : cfg.initial_states)
            list.push_back(to_array(x0));
        out["initial_states"] = list;
    }
    json output{{"format", std::string(to_string(cfg.format))}};
    if (!cfg.output_path.empty())
        output["path"] = cfg.output_path;
    if (!cfg.report_path.empty())
        output["report"] = cfg.report_path;
    out["output"] = output;

    json a{{"admissible", cfg.assertions.admissible}};
    if (cfg.assertions.safe)
        a["safe"] = *cfg.assertions.safe;
    if (cfg.assertions.beta_positive)
        a["beta_positive"] = *cfg.assertions.beta_positive;
    if (cfg.assertions.goal_tolerance)
        a["goal_tolerance"] = *cfg.assertions.goal_tolerance;
    out["assert"] = a;
    return out;
}

std::vector<TraceRecord> trace_records(const SimTrace& trace)
{
    std::vector<TraceRecord> out;
    out.reserve(trace.steps.size());
    for (const SimStep& s : trace.steps) {
        const Diagnostics& d = s.diag;
        TraceRecord r;
        r.t = s.t;
        r.x.assign(s.x.data(), s.x.data() + s.x.size());
        r.u.assign(s.u.data(), s.u.data() + s.u.size());
        r.h_s = d.h_s;
        r.h = d.barrier.h_soft;
        r.hbar = d.barrier.h_bar_star;
        r.hbar_per_backup.assign(d.barrier.per_backup_h_bar.data(),
                                 d.barrier.per_backup_h_bar.data() + d.barrier.per_backup_h_bar.size());
        r.beta = d.beta;
        r.gamma = d.gamma;
        r.sigma = d.sigma;
        r.q = d.q;
        r.branch = std::string(to_string(d.branch));
        out.push_back(std::move(r));
    }
    return out;
}

void write_csv(std::ostream& os, const std::vector<TraceRecord>& records)
{
    const std::size_t n = records.empty() ? 0 : records.front().x.size();
    const std::size_t m = records.empty() ? 0 : records.front().u.size();
    os << "t";
    for (std::size_t i = 1; i <= n; ++i)
        os << ",x" << i;
    for (std::size_t i = 1; i <= m; ++i)
        os << ",u" << i;
    os << ",h,hbar,beta,gamma,sigma,q,branch\n";
    for (const TraceRecord& r : records) {
        os << format_double(r.t);
        for (double v : r.x)
            os << ',' << format_double(v);
        for (double v : r.u)
            os << ',' << format_double(v);
        for (double v : {r.h, r.hbar, r.beta, r.gamma, r.sigma})
            os << ',' << format_double(v);
        os << ',' << r.q << ',' << r.branch << '\n';
    }
}

void write_ndjson(std::ostream& os, const std::vector<TraceRecord>& records)
{
    for (const TraceRecord& r : records) {
        const json j{{"t", r.t},         {"x", r.x},         {"u", r.u},
                     {"h_s", r.h_s},     {"h", r.h},         {"hbar", r.hbar},
                     {"hbar_per_backup", r.hbar_per_backup}, {"beta", r.beta},
                     {"gamma", r.gamma}, {"sigma", r.sigma}, {"q", r.q},
                     {"branch", r.branch}};
        os << j.dump() << '\n';
    }
}

std::vector<TraceRecord> read_ndjson(std::istream& is)
{
    std::vector<TraceRecord> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty())
            continue;
        try {
            const json j = json::parse(line);
            TraceRecord r;
            r.t = read_double(j.at("t"));
            for (const json& v : j.at("x"))
                r.x.push_back(read_double(v));
            for (const json& v : j.at("u"))
                r.u.push_back(read_double(v));
            r.h_s = read_double(j.at("h_s"));
            r.h = read_double(j.at("h"));
            r.hbar = read_double(j.at("hbar"));
            for (const json& v : j.at("hbar_per_backup"))
                r.hbar_per_backup.push_back(read_double(v));
            r.beta = read_double(j.at("beta"));
            r.gamma = read_double(j.at("gamma"));
            r.sigma = read_double(j.at("sigma"));
            r.q = j.at("q").get<std::size_t>();
            r.branch = j.at("branch").get<std::string>();
            out.push_back(std::move(r));
        } catch (const json::exception& e) {
            throw Error("trace line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

json to_json(const Metrics& m)
{
    json out{{"min_h_s", to_json(m.min_h_s)},
             {"min_h", to_json(m.min_h)},
             {"min_hbar", to_json(m.min_h_bar)},
             {"min_beta", to_json(m.min_beta)},
             {"min_gamma", to_json(m.min_gamma)},
             {"max_abs_u", m.max_abs_u},
             {"max_violation", m.max_violation},
             {"branch_fraction", m.branch_fraction},
             {"switch_count", m.switch_count},
             {"qp_calls", m.qp_calls},
             {"terminal_state", to_array(m.terminal_state)}};
    if (m.terminal_goal_distance)
        out["terminal_goal_distance"] = *m.terminal_goal_distance;
    return out;
}

json to_json(const EstimatedConstants& c)
{
    return json{{"l_s", c.l_s},
                {"l_phi", c.l_phi},
                {"l_s_sample_max", c.l_s_sample_max},
                {"l_phi_sample_max", c.l_phi_sample_max},
                {"samples", c.samples},
                {"samples_in_set", c.samples_in_set}};
}

} // namespace sbf
