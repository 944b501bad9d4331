#pragma once

// Closed-loop simulation under a zero-order hold, trace metrics, and sampled
// estimates of the constants behind the Lipschitz eps floor.

#include "sbf/filter.hpp"
#include "sbf/scenarios.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace sbf {

enum class Law { single, multi, backup_only, desired_only };

Law parse_law(std::string_view name);
std::string_view to_string(Law law);

struct SimConfig
{
    Vector x0;
    double duration = 20;
    double delta_t = 0.1;
    Law law = Law::single;
    int plant_substeps = 10; // RK4 steps per hold interval
    std::uint64_t seed = 0;

    void validate(int state_dim) const;
    int step_count() const;
};

struct SimStep
{
    double t = 0;
    Vector x;
    Vector u;
    Diagnostics diag;
};

struct SwitchEvent
{
    double t = 0;
    std::size_t from = 0;
    std::size_t to = 0;
};

struct SimTrace
{
    std::string scenario;
    std::vector<SimStep> steps;
    std::vector<SwitchEvent> events;
    std::vector<std::string> warnings;
    Vector terminal_state;
    double terminal_time = 0;
    bool aborted = false;
    std::string abort_reason;
};

/// Evaluates the chosen law at t_k = k delta_t, holds it over
/// [t_k, t_k + delta_t) and advances the plant with RK4. A non-finite state
/// or a failing prediction ends the run with a partial trace.
SimTrace simulate(const Scenario& scenario, const FilterConfig& filter, const SimConfig& sim);

struct EstimatedConstants
{
    double l_s = 0;            // inflated by 10%
    double l_phi = 0;          // inflated by 10%
    double l_s_sample_max = 0;
    double l_phi_sample_max = 0;
    std::size_t samples = 0;
    std::size_t samples_in_set = 0; // samples with some hbar*_j >= 0
};

/// Uniform samples of the scenario box: l_s from ||grad h_s||_2 over all
/// samples, l_phi from ||f~_j||_2 over samples with hbar*_j >= 0. Throws when
/// no sample lands in any of those sets.
EstimatedConstants estimate_constants(const Scenario& scenario, const FilterConfig& filter,
                                      std::size_t sample_count, std::uint64_t seed);

struct Extremum
{
    double value = 0;
    double t = 0;
};

struct Metrics
{
    Extremum min_h_s;      // includes the terminal state
    Extremum min_h;
    Extremum min_h_bar;
    Extremum min_beta;
    Extremum min_gamma;
    double max_abs_u = 0;
    double max_violation = 0; // max_k max_i (A u_k - b)_i
    std::map<std::string, double> branch_fraction;
    std::size_t switch_count = 0;
    std::size_t qp_calls = 0;
    Vector terminal_state;
    std::optional<double> terminal_goal_distance;
};

Metrics metrics(const SimTrace& trace, const Scenario& scenario);

// ---------------------------------------------------------------------------
// Shipped scenario setups.

struct Preset
{
    Scenario scenario;
    FilterConfig filter;
    SimConfig sim;
};

/// pendulum_wide, pendulum_narrow, pendulum_multi or unicycle.
Preset make_preset(std::string_view name, const PendulumOptions& pendulum = {},
                   const UnicycleConfig& unicycle = {});
std::vector<std::string> preset_names();

} // namespace sbf
