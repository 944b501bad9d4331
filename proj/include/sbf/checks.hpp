#pragma once

// Sampled invariant suites. Each check reports its violation count and the
// worst observed value together with the state or instance that produced it.

#include "sbf/sim.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace sbf::checks {

struct CheckResult
{
    std::string name;
    std::size_t samples = 0;
    std::size_t violations = 0;
    double worst = 0;     // largest error, or smallest margin, depending on the check
    double threshold = 0; // the bound `worst` is compared against
    std::string witness;

    bool passed() const { return violations == 0; }
};

struct SuiteReport
{
    std::string suite;
    std::string scenario;
    std::uint64_t seed = 0;
    double seconds = 0;
    std::vector<CheckResult> checks;

    bool passed() const;
    const CheckResult& at(std::string_view name) const;
};

const std::vector<std::string>& suite_names();

/// Dispatches on softnum, gradients, sets, optim or control. `samples`
/// scales every check of the suite (0 selects the documented defaults).
SuiteReport run_suite(std::string_view suite, const Preset& preset, std::size_t samples, std::uint64_t seed);

/// Default 10^4 tuples.
SuiteReport softnum_suite(std::size_t samples, std::uint64_t seed);
/// Barrier gradient and sensitivity at `samples` states (default 100); the
/// point-wise field checks use ten times as many.
SuiteReport gradients_suite(const Preset& preset, std::size_t samples, std::uint64_t seed);
/// Default 10^4 states of the scenario box.
SuiteReport sets_suite(const Preset& preset, std::size_t samples, std::uint64_t seed);
/// Default 10^3 random LP instances and 10^3 feasible QP instances, m <= 3.
SuiteReport optim_suite(std::size_t samples, std::uint64_t seed);
/// Default 10^4 states for admissibility, a tenth as many pairs for the
/// continuity probe.
SuiteReport control_suite(const Preset& preset, std::size_t samples, std::uint64_t seed);

/// Bound on ||u(x1) - u(x2)|| / ||x1 - x2|| used by the continuity probe.
double continuity_constant(std::string_view scenario);

/// Hard barrier of one backup on a grid `factor` times denser (one RK4 step
/// per sample), a stand-in for the continuous-time minimum.
double fine_hard_barrier(const Scenario& scenario, std::size_t backup, const Vector& x, const HorizonGrid& grid,
                         int factor = 10);

/// Fraction of a per_axis x per_axis grid over the scenario box where the
/// soft barrier over the first `backup_count` backups is nonnegative.
double superlevel_fraction(const Scenario& scenario, const BarrierParams& params, std::size_t backup_count,
                           int per_axis);

nlohmann::json to_json(const SuiteReport& report);

} // namespace sbf::checks
