#include "sbf/sim.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace sbf {
namespace {

// Barrier diagnostics for the laws that do not filter anything.
Diagnostics passive_diagnostics(const Vector& x, const Scenario& scenario, const FilterConfig& cfg)
{
    const double eps = cfg.resolved_eps();
    Diagnostics d;
    d.barrier = evaluate_barrier(scenario, x, cfg.barrier_params(), scenario.backups.size());
    d.h_s = scenario.safety.value(x);
    d.beta = beta(d.barrier, scenario.polytope, cfg.alpha, eps);
    d.gamma = gamma(d.barrier.h_soft, d.beta, cfg);
    return d;
}

void update(Extremum& e, double value, double t, bool first)
{
    if (first || value < e.value) {
        e.value = value;
        e.t = t;
    }
}

} // namespace

Law parse_law(std::string_view name)
{
    if (name == "single")
        return Law::single;
    if (name == "multi")
        return Law::multi;
    if (name == "backup_only")
        return Law::backup_only;
    if (name == "desired_only")
        return Law::desired_only;
    throw Error("unknown control law '" + std::string(name) + "'");
}

std::string_view to_string(Law law)
{
    switch (law) {
    case Law::single: return "single";
    case Law::multi: return "multi";
    case Law::backup_only: return "backup_only";
    case Law::desired_only: return "desired_only";
    }
    return "unknown";
}

void SimConfig::validate(int state_dim) const
{
    if (x0.size() != state_dim)
        throw Error("sim config: x0 has " + std::to_string(x0.size()) + " entries, the scenario needs " +
                    std::to_string(state_dim));
    if (!x0.allFinite())
        throw Error("sim config: x0 must be finite");
    if (!(delta_t > 0) || !std::isfinite(delta_t))
        throw Error("sim config: delta_t must be positive");
    if (!(duration >= delta_t) || !std::isfinite(duration))
        throw Error("sim config: duration must be at least delta_t");
    if (plant_substeps < 5)
        throw Error("sim config: plant_substeps must be at least 5");
}

int SimConfig::step_count() const
{
    return int(std::llround(duration / delta_t));
}

SimTrace simulate(const Scenario& scenario, const FilterConfig& filter, const SimConfig& sim)
{
    filter.validate();
    sim.validate(scenario.model.state_dim);

    SimTrace trace;
    trace.scenario = scenario.name;
    const int steps = sim.step_count();
    trace.steps.reserve(std::size_t(steps));
    FilterState state;
    Vector x = sim.x0;
    const double h = sim.delta_t / sim.plant_substeps;

    for (int k = 0; k < steps; ++k) {
        const double t = k * sim.delta_t;
        SimStep step;
        step.t = t;
        step.x = x;
        try {
            switch (sim.law) {
            case Law::single: {
                ControlOutput out = control_single(x, scenario, filter);
                step.u = std::move(out.u);
                step.diag = std::move(out.diag);
                break;
            }
            case Law::multi: {
                const std::optional<std::size_t> before = state.q;
                ControlOutput out = control_multi(x, state, scenario, filter);
                if (k == 0 && out.diag.barrier.per_backup_h_bar.maxCoeff() < 0)
                    trace.warnings.push_back("every backup hard barrier is negative at x0; q(0) is the argmax anyway");
                if (out.diag.switched)
                    trace.events.push_back(SwitchEvent{t, *before, out.diag.q});
                step.u = std::move(out.u);
                step.diag = std::move(out.diag);
                break;
            }
            case Law::backup_only:
                step.diag = passive_diagnostics(x, scenario, filter);
                step.diag.branch = Branch::backup;
                step.u = scenario.backups.front().control(x);
                break;
            case Law::desired_only:
                step.diag = passive_diagnostics(x, scenario, filter);
                step.diag.branch = Branch::desired;
                step.u = scenario.desired(x);
                break;
            }
        } catch (const Error& e) {
            trace.aborted = true;
            trace.abort_reason = "control evaluation failed at t = " + std::to_string(t) + ": " + e.what();
            break;
        }
        const Vector u = step.u;
        trace.steps.push_back(std::move(step));

        const StateMap plant = [&](const Vector& z) { return scenario.model.dynamics(z, u); };
        for (int s = 0; s < sim.plant_substeps; ++s)
            x = rk4_step(plant, x, h);
        if (!x.allFinite()) {
            std::ostringstream os;
            os << "plant state became non-finite during [" << t << ", " << t + sim.delta_t << ")";
            trace.aborted = true;
            trace.abort_reason = os.str();
            x = trace.steps.back().x;
            break;
        }
    }
    trace.terminal_state = x;
    trace.terminal_time = trace.aborted ? trace.steps.empty() ? 0.0 : trace.steps.back().t : steps * sim.delta_t;
    return trace;
}

EstimatedConstants estimate_constants(const Scenario& scenario, const FilterConfig& filter,
                                      std::size_t sample_count, std::uint64_t seed)
{
    if (sample_count < 1000)
        throw Error("estimate_constants: need at least 1000 samples");
    const SampleBox& box = scenario.box;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    EstimatedConstants c;
    c.samples = sample_count;
    Vector x(box.lower.size());
    for (std::size_t s = 0; s < sample_count; ++s) {
        for (Eigen::Index i = 0; i < x.size(); ++i)
            x(i) = box.lower(i) + (box.upper(i) - box.lower(i)) * unit(rng);
        c.l_s_sample_max = std::max(c.l_s_sample_max, scenario.safety.gradient(x).norm());
        bool in_set = false;
        for (std::size_t j = 0; j < scenario.backups.size(); ++j) {
            const FlowResult flow = integrate_flow(scenario, j, x, filter.grid);
            if (hard_barrier_single(flow, scenario.safety, scenario.backups[j]) < 0)
                continue;
            in_set = true;
            c.l_phi_sample_max =
                std::max(c.l_phi_sample_max, scenario.model.backup_field(x, scenario.backups[j]).norm());
        }
        c.samples_in_set += in_set;
    }
    if (c.samples_in_set == 0)
        throw Error("estimate_constants: no sampled state has a nonnegative hard barrier; the sample box "
                    "does not cover the set");
    c.l_s = 1.1 * c.l_s_sample_max;
    c.l_phi = 1.1 * c.l_phi_sample_max;
    return c;
}

Metrics metrics(const SimTrace& trace, const Scenario& scenario)
{
    if (trace.steps.empty())
        throw Error("metrics: empty trace");
    Metrics m;
    std::map<std::string, std::size_t> counts;
    bool first = true;
    for (const SimStep& s : trace.steps) {
        const Diagnostics& d = s.diag;
        update(m.min_h_s, d.h_s, s.t, first);
        update(m.min_h, d.barrier.h_soft, s.t, first);
        update(m.min_h_bar, d.barrier.h_bar_star, s.t, first);
        update(m.min_beta, d.beta, s.t, first);
        update(m.min_gamma, d.gamma, s.t, first);
        const double v = scenario.polytope.max_violation(s.u);
        m.max_violation = first ? v : std::max(m.max_violation, v);
        m.max_abs_u = std::max(m.max_abs_u, s.u.cwiseAbs().maxCoeff());
        ++counts[std::string(to_string(d.branch))];
        m.qp_calls += d.qp_invoked;
        first = false;
    }
    update(m.min_h_s, scenario.safety.value(trace.terminal_state), trace.terminal_time, false);
    for (const auto& [name, n] : counts)
        m.branch_fraction[name] = double(n) / double(trace.steps.size());
    m.switch_count = trace.events.size();
    m.terminal_state = trace.terminal_state;
    if (scenario.goal && scenario.point_of_interest)
        m.terminal_goal_distance = (scenario.point_of_interest(trace.terminal_state) - *scenario.goal).norm();
    return m;
}

std::vector<std::string> preset_names()
{
    return {"pendulum_wide", "pendulum_narrow", "pendulum_multi", "unicycle"};
}

Preset make_preset(std::string_view name, const PendulumOptions& pendulum, const UnicycleConfig& unicycle)
{
    if (name == "unicycle") {
        FilterConfig f;
        f.rho1 = 50;
        f.alpha = 1;
        f.eps = 0;
        f.kappa_h = 0.012;
        f.kappa_beta = 0.05;
        f.grid = HorizonGrid{50, 0.02, 5};
        SimConfig s;
        s.x0 = Eigen::Vector4d(-3.0, -8.5, 0.0, 0.0);
        s.duration = 30;
        s.delta_t = 0.02;
        s.law = Law::single;
        return Preset{build_unicycle_scenario(unicycle), f, s};
    }
    std::string_view variant_name = name;
    if (variant_name.starts_with("pendulum_"))
        variant_name.remove_prefix(9);
    else
        throw Error("unknown scenario '" + std::string(name) + "'");
    const PendulumVariant variant = parse_pendulum_variant(variant_name);

    FilterConfig f;
    f.rho1 = 100;
    f.rho2 = 50;
    f.alpha = 1;
    f.eps = 0;
    f.kappa_h = 0.05;
    f.kappa_beta = 0.05;
    f.grid = HorizonGrid{variant == PendulumVariant::narrow ? 150 : 50, 0.1, 5};
    SimConfig s;
    s.duration = 20;
    s.delta_t = 0.1;
    s.law = variant == PendulumVariant::multi ? Law::multi : Law::single;
    s.x0 = variant == PendulumVariant::wide ? Eigen::Vector2d(0.5, 0.0) : Eigen::Vector2d(-2.7, 0.0);
    return Preset{build_pendulum_scenario(variant, pendulum), f, s};
}

} // namespace sbf
