// Runs the nine end-to-end criteria and prints one PASS/FAIL line for each.

#include "sbf/checks.hpp"
#include "sbf/sim.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace sbf;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome
{
    bool ok = true;
    std::ostringstream detail;

    void require(bool cond, const std::string& what)
    {
        if (!cond) {
            ok = false;
            detail << " [failed: " << what << "]";
        }
    }
};

// Suite checks must all pass; prints the worst value of each.
void require_checks(Outcome& o, const checks::SuiteReport& r, const std::vector<std::string>& names)
{
    for (const std::string& n : names) {
        const checks::CheckResult& c = r.at(n);
        o.detail << ' ' << r.scenario << ':' << n << " worst=" << c.worst << " viol=" << c.violations << '/'
                 << c.samples;
        o.require(c.passed(), r.scenario + ":" + n);
    }
}

Vector pend(double theta)
{
    return Vector(Eigen::Vector2d(theta, 0));
}

SimTrace run(const Preset& p, const Vector& x0)
{
    SimConfig sim = p.sim;
    sim.x0 = x0;
    return simulate(p.scenario, p.filter, sim);
}

Outcome sandwich()
{
    Outcome o;
    const auto t0 = Clock::now();
    const checks::SuiteReport r = checks::softnum_suite(10000, 1);
    const double s = std::chrono::duration<double>(Clock::now() - t0).count();
    require_checks(o, r, {"softmin_below_min", "softmin_above_floor", "softmax_below_max", "softmax_above_floor"});
    o.require(s < 1, "runtime < 1 s");
    return o;
}

Outcome gradients()
{
    Outcome o;
    const auto t0 = Clock::now();
    const checks::SuiteReport r = checks::gradients_suite(make_preset("pendulum_wide"), 100, 2);
    const double s = std::chrono::duration<double>(Clock::now() - t0).count();
    require_checks(o, r, {"barrier_gradient", "sensitivity"});
    o.require(r.at("barrier_gradient").threshold <= 1e-3, "gradient bound 1e-3");
    o.require(r.at("sensitivity").threshold <= 1e-4, "sensitivity bound 1e-4");
    o.require(s < 30, "runtime < 30 s");
    return o;
}

Outcome solvers()
{
    Outcome o;
    const auto t0 = Clock::now();
    const checks::SuiteReport r = checks::optim_suite(1000, 3);
    const double s = std::chrono::duration<double>(Clock::now() - t0).count();
    require_checks(o, r, {"lp_matches_vertex_enumeration", "qp_matches_oracle"});
    o.require(r.at("lp_matches_vertex_enumeration").samples >= 1000, "1000 LP instances");
    o.require(r.at("qp_matches_oracle").samples >= 1000, "1000 QP instances");
    o.require(s < 30, "runtime < 30 s");
    return o;
}

Outcome pendulum_single()
{
    Outcome o;
    const Preset base = make_preset("pendulum_wide");
    auto check_run = [&](const Preset& p, double theta, bool full) {
        const auto t0 = Clock::now();
        const SimTrace t = run(p, pend(theta));
        const double s = std::chrono::duration<double>(Clock::now() - t0).count();
        const std::string tag = "theta0=" + std::to_string(theta);
        o.require(!t.aborted, tag + " finished");
        if (t.aborted)
            return;
        const Metrics m = metrics(t, p.scenario);
        o.detail << ' ' << tag << " min_h_s=" << m.min_h_s.value << " min_beta=" << m.min_beta.value;
        o.require(m.min_h_s.value >= 0, tag + " min h_s >= 0");
        o.require(m.max_abs_u <= 1.5 + 1e-9, tag + " |u| <= 1.5");
        o.require(s < 60, tag + " runtime < 1 min");
        if (full) {
            o.require(m.min_h.value >= 0, tag + " min h >= 0");
            o.require(m.min_beta.value > 0, tag + " min beta > 0");
        }
    };
    check_run(base, 0.5, true);
    for (double th : {1.0, 1.5, 2.0})
        check_run(base, th, false);

    Preset floor = base;
    const EstimatedConstants c = estimate_constants(base.scenario, base.filter, 2000, 1);
    floor.filter.eps_mode = EpsMode::lipschitz;
    floor.filter.l_s = c.l_s;
    floor.filter.l_phi = c.l_phi;
    o.detail << " eps=" << floor.filter.resolved_eps();
    for (double th : {-0.5, -1.0, -1.5, -2.0})
        check_run(floor, th, false);
    return o;
}

Outcome contrast()
{
    Outcome o;
    const auto t0 = Clock::now();
    const Preset narrow = make_preset("pendulum_narrow");
    const Preset multi = make_preset("pendulum_multi");
    const SimTrace a = run(narrow, pend(-2.7));
    const SimTrace b = run(multi, pend(-2.7));
    const double s = std::chrono::duration<double>(Clock::now() - t0).count();
    o.require(!a.aborted && !b.aborted, "runs finished");
    if (!o.ok)
        return o;
    const double ha = metrics(a, narrow.scenario).min_h_s.value;
    const double hb = metrics(b, multi.scenario).min_h_s.value;
    o.detail << " single N=" << narrow.filter.grid.samples << " min_h_s=" << ha << " multi N="
             << multi.filter.grid.samples << " rho2=" << multi.filter.rho2 << " min_h_s=" << hb;
    o.require(narrow.filter.grid.samples == 150, "single N = 150");
    o.require(multi.filter.grid.samples == 50 && multi.scenario.backups.size() == 3, "multi N = 50, three backups");
    o.require(ha < 0, "single leaves S_s");
    o.require(hb >= 0, "multi stays in S_s");
    o.require(s < 120, "runtime < 2 min");
    return o;
}

Outcome coverage()
{
    Outcome o;
    const Preset narrow = make_preset("pendulum_narrow");
    const Preset multi = make_preset("pendulum_multi");
    const double single = checks::superlevel_fraction(narrow.scenario, narrow.filter.barrier_params(), 1, 100);
    const double many = checks::superlevel_fraction(multi.scenario, multi.filter.barrier_params(), 3, 100);
    o.detail << " single=" << single << " multi=" << many;
    o.require(many > single, "multi area exceeds single area");
    return o;
}

Outcome unicycle()
{
    Outcome o;
    const auto t0 = Clock::now();
    for (const Eigen::Vector2d& goal : {Eigen::Vector2d(2, 4.5), Eigen::Vector2d(-1, 0), Eigen::Vector2d(-4.5, 8)}) {
        UnicycleConfig uc;
        uc.goal = goal;
        const Preset p = make_preset("unicycle", {}, uc);
        const SimTrace t = run(p, Vector(Eigen::Vector4d(-3, -8.5, 0, 0)));
        std::ostringstream tag;
        tag << "goal=(" << goal(0) << ',' << goal(1) << ')';
        o.require(!t.aborted, tag.str() + " finished");
        if (t.aborted)
            continue;
        const Metrics m = metrics(t, p.scenario);
        const double dist = m.terminal_goal_distance.value_or(1e300);
        o.detail << ' ' << tag.str() << " dist=" << dist << " min_h_s=" << m.min_h_s.value;
        o.require(dist <= 0.2, tag.str() + " within 0.2");
        o.require(m.min_h_s.value >= 0, tag.str() + " min h_s >= 0");
        o.require(m.max_violation <= 1e-9, tag.str() + " controls in U");
    }
    const double s = std::chrono::duration<double>(Clock::now() - t0).count();
    o.require(s < 300, "runtime < 5 min");
    return o;
}

Outcome inclusions()
{
    Outcome o;
    const auto t0 = Clock::now();
    for (const char* name : {"pendulum_wide", "pendulum_narrow", "pendulum_multi"}) {
        const checks::SuiteReport r = checks::sets_suite(make_preset(name), 10000, 8);
        require_checks(o, r,
                       {"backup_set_in_fine_hard_set", "fine_hard_set_in_hard_set", "hard_set_in_safe_set",
                        "soft_below_hard"});
    }
    const double s = std::chrono::duration<double>(Clock::now() - t0).count();
    o.require(s < 120, "runtime < 2 min");
    return o;
}

Outcome control()
{
    Outcome o;
    for (const char* name : {"pendulum_wide", "pendulum_multi"}) {
        const checks::SuiteReport r = checks::control_suite(make_preset(name), 10000, 9);
        require_checks(o, r, {"single_admissible", "multi_admissible", "single_continuity", "multi_continuity"});
    }
    return o;
}

} // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"soft-min/soft-max sandwich", sandwich},
        {"gradient and sensitivity fidelity", gradients},
        {"LP and QP oracles", solvers},
        {"single-backup pendulum runs", pendulum_single},
        {"single vs multi backup from [-2.7, 0]", contrast},
        {"superlevel area growth", coverage},
        {"unicycle goals", unicycle},
        {"sampled set inclusions", inclusions},
        {"admissibility and continuity", control},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = Clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.ok = false;
            o.detail << " [exception: " << e.what() << "]";
        }
        const double s = std::chrono::duration<double>(Clock::now() - t0).count();
        failed += !o.ok;
        std::printf("%s criterion %zu (%s) %.2fs:%s\n", o.ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), s,
                    o.detail.str().c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
