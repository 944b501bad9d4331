#include "sbf/checks.hpp"
#include "sbf/io.hpp"
#include "sbf/sim.hpp"

#include <doctest.h>

#include <numbers>
#include <random>

using namespace sbf;

namespace {

// Motionless plant: f = 0, g = I, u_b = 0, linear h_s.
Scenario still_scenario(const RowVector& c)
{
    SystemModel model;
    model.state_dim = 2;
    model.input_dim = 2;
    model.drift = [](const Vector& x) { return Vector(Vector::Zero(x.size())); };
    model.input_map = [](const Vector&) { return Matrix(Matrix::Identity(2, 2)); };
    BackupPolicy stop;
    stop.label = "stop";
    stop.control = [](const Vector&) { return Vector(Vector::Zero(2)); };
    stop.barrier = [c](const Vector& x) { return 1 + (c * x).value(); };
    stop.barrier_gradient = [c](const Vector&) { return c; };
    stop.field_jacobian = [](const Vector&) { return Matrix(Matrix::Zero(2, 2)); };
    return Scenario{
        .name = "still",
        .model = model,
        .polytope = ControlPolytope::box(Vector::Constant(2, -1), Vector::Constant(2, 1)),
        .safety = SafetySpec{[c](const Vector& x) { return 2 + (c * x).value(); }, [c](const Vector&) { return c; }},
        .backups = {stop},
        .desired = [](const Vector&) { return Vector(Vector::Zero(2)); },
        .box = SampleBox{Vector::Constant(2, -1), Vector::Constant(2, 1)},
        .point_of_interest = {},
        .goal = std::nullopt,
    };
}

SimTrace run(const Preset& p, const Vector& x0, double delta_t = 0.1)
{
    SimConfig sim = p.sim;
    sim.x0 = x0;
    sim.delta_t = delta_t;
    return simulate(p.scenario, p.filter, sim);
}

Vector pendulum_state(double theta, double omega = 0)
{
    return Vector(Eigen::Vector2d(theta, omega));
}

// Preset with eps at the estimated Lipschitz floor.
Preset with_eps_floor(const char* name, std::uint64_t seed)
{
    Preset p = make_preset(name);
    const EstimatedConstants c = estimate_constants(p.scenario, p.filter, 2000, seed);
    p.filter.eps_mode = EpsMode::lipschitz;
    p.filter.l_s = c.l_s;
    p.filter.l_phi = c.l_phi;
    return p;
}

} // namespace

TEST_CASE("backup-only run from the pendulum equilibrium")
{
    Preset p = make_preset("pendulum_wide");
    p.sim.law = Law::backup_only;
    const SimTrace t = run(p, Vector::Zero(2));
    REQUIRE(t.steps.size() == 200);
    for (const SimStep& s : t.steps) {
        CHECK(s.x.norm() == 0.0);
        CHECK(s.u.norm() == 0.0);
        CHECK(s.diag.branch == Branch::backup);
    }
    CHECK(t.terminal_time == doctest::Approx(20.0));
    const Metrics m = metrics(t, p.scenario);
    CHECK(m.min_h_s.value == doctest::Approx(std::numbers::pi));
    CHECK(m.max_abs_u == 0.0);
    CHECK(m.branch_fraction.at("backup") == 1.0);
}

TEST_CASE("time grid is uniform and controls are admissible")
{
    const Preset p = make_preset("pendulum_multi");
    const SimTrace t = run(p, pendulum_state(0.5));
    for (std::size_t k = 0; k < t.steps.size(); ++k) {
        CHECK(t.steps[k].t == doctest::Approx(0.1 * double(k)).epsilon(1e-12));
        CHECK(p.scenario.polytope.max_violation(t.steps[k].u) <= 1e-9);
    }
    CHECK(metrics(t, p.scenario).max_violation <= 1e-9);
}

TEST_CASE("narrow single law leaves the safe set")
{
    const Preset p = make_preset("pendulum_narrow");
    const SimTrace t = run(p, pendulum_state(-2.7));
    REQUIRE_FALSE(t.aborted);
    const Metrics m = metrics(t, p.scenario);
    CHECK(m.min_h_s.value < 0);

    // Until the state first leaves S_s it is never in S, so only u_b is applied.
    std::size_t k = 0;
    for (; k < t.steps.size() && t.steps[k].diag.h_s >= 0; ++k) {
        CHECK(t.steps[k].diag.barrier.h_soft < 0);
        CHECK(t.steps[k].diag.branch == Branch::backup);
        CHECK(t.steps[k].u == p.scenario.backups[0].control(t.steps[k].x));
    }
    CHECK(k < t.steps.size());
}

TEST_CASE("multi law from the wide example start settles into a blend")
{
    const Preset p = make_preset("pendulum_multi");
    const SimTrace t = run(p, pendulum_state(0.5));
    const Metrics m = metrics(t, p.scenario);
    CHECK(m.min_h_s.value >= 0);
    std::size_t blends = 0;
    for (std::size_t k = t.steps.size() - 20; k < t.steps.size(); ++k)
        blends += t.steps[k].diag.branch == Branch::blend;
    CHECK(blends == 20);
    for (std::size_t k = t.steps.size() - 20; k < t.steps.size(); ++k) {
        CHECK(t.steps[k].diag.sigma > 0);
        CHECK(t.steps[k].diag.sigma < 1);
    }
}

TEST_CASE("multi law warns when no backup certifies the start")
{
    const Preset p = make_preset("pendulum_multi");
    SimConfig sim = p.sim;
    sim.x0 = pendulum_state(3.5, 2.5);
    sim.duration = 1;
    const SimTrace t = simulate(p.scenario, p.filter, sim);
    CHECK_FALSE(t.warnings.empty());
}

TEST_CASE("unicycle run reaches the goal and uses the QP")
{
    const Preset p = make_preset("unicycle");
    const SimTrace t = simulate(p.scenario, p.filter, p.sim);
    REQUIRE_FALSE(t.aborted);
    const Metrics m = metrics(t, p.scenario);
    REQUIRE(m.terminal_goal_distance);
    CHECK(*m.terminal_goal_distance < 0.2);
    CHECK(m.min_h_s.value >= 0);
    CHECK(m.min_beta.value > 0);
    CHECK(m.branch_fraction.at("qp") > 0);
    CHECK(m.max_violation <= 1e-9);
}

TEST_CASE("constant estimates on a motionless plant")
{
    const RowVector c = Eigen::RowVector2d(0.6, -0.8);
    const Scenario s = still_scenario(c);
    FilterConfig f;
    f.grid = HorizonGrid{10, 0.1, 5};
    const EstimatedConstants e = estimate_constants(s, f, 1000, 3);
    CHECK(e.l_s_sample_max == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(e.l_s == doctest::Approx(1.1));
    CHECK(e.l_phi_sample_max == 0.0);
    CHECK(e.l_phi == 0.0);
    CHECK(e.samples == 1000);
    CHECK(e.samples_in_set > 0);
    CHECK(e.samples_in_set < 1000);
    CHECK_THROWS_AS(estimate_constants(s, f, 999, 3), Error);
}

TEST_CASE("constant estimates need samples inside the hard sets")
{
    const RowVector c = Eigen::RowVector2d(0.6, -0.8);
    Scenario s = still_scenario(c);
    s.safety.value = [](const Vector&) { return -1.0; };
    FilterConfig f;
    f.grid = HorizonGrid{10, 0.1, 5};
    CHECK_THROWS_AS(estimate_constants(s, f, 1000, 3), Error);
}

TEST_CASE("pendulum constants are finite and the floor makes runs more conservative")
{
    const Preset base = make_preset("pendulum_wide");
    const EstimatedConstants e = estimate_constants(base.scenario, base.filter, 2000, 5);
    CHECK(std::isfinite(e.l_s));
    CHECK(std::isfinite(e.l_phi));
    CHECK(e.l_s > 0);
    CHECK(e.l_phi > 0);
    CHECK(e.l_s == doctest::Approx(1.1 * e.l_s_sample_max));

    const Preset floor = with_eps_floor("pendulum_wide", 5);
    for (double th : {-0.5, -1.0, -1.5, -2.0}) {
        auto excursion = [](const SimTrace& t) {
            double worst = 0;
            for (const SimStep& s : t.steps)
                worst = std::max(worst, s.x.norm());
            return worst;
        };
        const SimTrace loose = run(base, pendulum_state(th));
        const SimTrace tight = run(floor, pendulum_state(th));
        CHECK(excursion(tight) <= excursion(loose));
        CHECK(metrics(tight, floor.scenario).min_h_s.value >= 0);
    }
}

TEST_CASE("with eps at the floor the fine hard barrier never falls below zero")
{
    const Preset p = with_eps_floor("pendulum_wide", 7);
    const HorizonGrid grid = p.filter.grid;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> th(-3.14, 3.14), om(-3, 3);
    int runs = 0;
    while (runs < 20) {
        const Vector x0 = pendulum_state(th(rng), om(rng));
        if (checks::fine_hard_barrier(p.scenario, 0, x0, grid) < 0)
            continue;
        ++runs;
        const SimTrace t = run(p, x0);
        REQUIRE_FALSE(t.aborted);
        double worst = 1e300;
        for (const SimStep& s : t.steps)
            worst = std::min(worst, checks::fine_hard_barrier(p.scenario, 0, s.x, grid));
        worst = std::min(worst, checks::fine_hard_barrier(p.scenario, 0, t.terminal_state, grid));
        INFO("x0 = " << x0.transpose());
        CHECK(worst >= -1e-6);

        // Once certified, the sampled hard barrier stays nonnegative.
        for (std::size_t k = 0; k + 1 < t.steps.size(); ++k)
            if (t.steps[k].diag.barrier.h_bar_star >= 0)
                CHECK(t.steps[k + 1].diag.barrier.h_bar_star >= 0);
    }
}

TEST_CASE("multi law with eps at the floor keeps the hard barrier certified")
{
    const Preset p = with_eps_floor("pendulum_multi", 9);
    for (double th : {-2.7, -1.0, 0.5, 2.0}) {
        const SimTrace t = run(p, pendulum_state(th));
        REQUIRE_FALSE(t.aborted);
        for (std::size_t k = 0; k + 1 < t.steps.size(); ++k)
            if (t.steps[k].diag.barrier.h_bar_star >= 0)
                CHECK(t.steps[k + 1].diag.barrier.h_bar_star >= 0);
    }
}

TEST_CASE("identical configurations give identical traces")
{
    const Preset p = make_preset("pendulum_multi");
    const auto a = trace_records(run(p, pendulum_state(-2.7)));
    const auto b = trace_records(run(p, pendulum_state(-2.7)));
    CHECK(a == b);
}

TEST_CASE("non-finite states abort with a partial trace")
{
    Scenario s = still_scenario(Eigen::RowVector2d(0.6, -0.8));
    s.model.drift = [](const Vector& x) { return Vector(x.array().square() * 50); };
    FilterConfig f;
    f.grid = HorizonGrid{10, 0.1, 5};
    SimConfig sim;
    sim.x0 = Vector::Constant(2, 0.5);
    sim.duration = 5;
    sim.law = Law::backup_only;
    const SimTrace t = simulate(s, f, sim);
    CHECK(t.aborted);
    CHECK_FALSE(t.abort_reason.empty());
    CHECK(t.steps.size() < std::size_t(sim.step_count()));
}

TEST_CASE("simulation settings are validated")
{
    SimConfig sim;
    sim.x0 = Vector::Zero(2);
    CHECK_NOTHROW(sim.validate(2));
    CHECK_THROWS_AS(sim.validate(3), Error);
    sim.plant_substeps = 4;
    CHECK_THROWS_AS(sim.validate(2), Error);
    sim = SimConfig{};
    sim.x0 = Vector::Zero(2);
    sim.delta_t = 0;
    CHECK_THROWS_AS(sim.validate(2), Error);
    sim = SimConfig{};
    sim.x0 = Vector::Zero(2);
    sim.duration = 0.05;
    CHECK_THROWS_AS(sim.validate(2), Error);
    CHECK_THROWS_AS(parse_law("optimal"), Error);
    CHECK(parse_law("multi") == Law::multi);
}

// The three checks below pin the wide pendulum example at the hold period 0.1.

TEST_CASE("wide example at hold period 0.1 stays safe with positive margin")
{
    const Preset p = make_preset("pendulum_wide");
    const SimTrace t = run(p, pendulum_state(0.5));
    const Metrics m = metrics(t, p.scenario);
    INFO("min h_s " << m.min_h_s.value << " at t=" << m.min_h_s.t << ", min beta " << m.min_beta.value << " at t="
                    << m.min_beta.t);
    CHECK(m.min_h_s.value >= 0);
    CHECK(m.min_h.value >= 0);
    CHECK(m.min_beta.value > 0);
    CHECK(m.max_abs_u <= 1.5 + 1e-9);
}

TEST_CASE("wide example at hold period 0.1 ends in a strict blend")
{
    const Preset p = make_preset("pendulum_wide");
    const SimTrace t = run(p, pendulum_state(0.5));
    std::size_t strict = 0;
    for (std::size_t k = t.steps.size() - 20; k < t.steps.size(); ++k)
        strict += t.steps[k].diag.gamma > 0 && t.steps[k].diag.gamma < 1;
    CHECK(strict == 20);
}

TEST_CASE("wide example: halving the hold period 0.1 barely moves min h_s")
{
    const Preset p = make_preset("pendulum_wide");
    const double coarse = metrics(run(p, pendulum_state(0.5), 0.1), p.scenario).min_h_s.value;
    const double fine = metrics(run(p, pendulum_state(0.5), 0.05), p.scenario).min_h_s.value;
    INFO("min h_s " << coarse << " at 0.1, " << fine << " at 0.05");
    CHECK(std::abs(coarse - fine) < 1e-3);
}
