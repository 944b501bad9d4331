#include "sbf/checks.hpp"

#include "sbf/oracles.hpp"
#include "sbf/softnum.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <sstream>

namespace sbf::checks {

using nlohmann::json;

namespace {

std::string str(const Vector& v)
{
    std::ostringstream os;
    os.precision(17);
    os << '[';
    for (Eigen::Index i = 0; i < v.size(); ++i)
        os << (i ? ", " : "") << v(i);
    os << ']';
    return os.str();
}

// Value must stay at or below the threshold; tracks the largest one.
struct Ceiling
{
    CheckResult r;
    bool any = false;

    Ceiling(std::string name, double threshold)
    {
        r.name = std::move(name);
        r.threshold = threshold;
    }
    void add(double v, const std::function<std::string()>& witness)
    {
        ++r.samples;
        r.violations += !(v <= r.threshold);
        if (!any || v > r.worst || !std::isfinite(v)) {
            r.worst = v;
            r.witness = witness();
        }
        any = true;
    }
};

// Value must stay at or above the threshold (strictly above when `strict`);
// tracks the smallest one.
struct Floor
{
    CheckResult r;
    bool strict = false;
    bool any = false;

    Floor(std::string name, double threshold, bool strict_ = false) : strict(strict_)
    {
        r.name = std::move(name);
        r.threshold = threshold;
    }
    void add(double v, const std::function<std::string()>& witness)
    {
        ++r.samples;
        const bool ok = strict ? v > r.threshold : v >= r.threshold;
        r.violations += !ok;
        if (!any || v < r.worst || !std::isfinite(v)) {
            r.worst = v;
            r.witness = witness();
        }
        any = true;
    }
};

class Sampler
{
public:
    explicit Sampler(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }

    Vector in_box(const SampleBox& box, double stretch = 1.0)
    {
        Vector x(box.lower.size());
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            const double mid = 0.5 * (box.lower(i) + box.upper(i));
            const double half = 0.5 * (box.upper(i) - box.lower(i)) * stretch;
            x(i) = uniform(mid - half, mid + half);
        }
        return x;
    }

    Vector unit(Eigen::Index n)
    {
        Vector d(n);
        for (Eigen::Index i = 0; i < n; ++i)
            d(i) = normal();
        return d / d.norm();
    }

private:
    std::mt19937_64 rng_;
};

std::size_t backups_in_use(const Preset& p)
{
    return p.sim.law == Law::multi ? p.scenario.backups.size() : 1;
}

SuiteReport start(std::string suite, std::string scenario, std::uint64_t seed)
{
    SuiteReport r;
    r.suite = std::move(suite);
    r.scenario = std::move(scenario);
    r.seed = seed;
    return r;
}

using Clock = std::chrono::steady_clock;

double elapsed(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// ---------------------------------------------------------------------------
// Random polytopes for the solver checks: either a random box with extra
// cuts, or plain random halfspaces around the origin (resampled until
// bounded). In both cases the origin is interior and r <= 8.

ControlPolytope random_polytope(Sampler& s, int m)
{
    if (s.uniform(0, 1) < 0.5) {
        const int per_box = 2 * m;
        const int cuts = s.integer(1, std::max(1, 8 - per_box));
        Matrix A(per_box + cuts, m);
        Vector b(per_box + cuts);
        A.setZero();
        for (int i = 0; i < m; ++i) {
            A(2 * i, i) = 1;
            b(2 * i) = s.uniform(0.2, 2.0);
            A(2 * i + 1, i) = -1;
            b(2 * i + 1) = s.uniform(0.2, 2.0);
        }
        for (int k = 0; k < cuts; ++k) {
            A.row(per_box + k) = s.unit(m).transpose();
            b(per_box + k) = s.uniform(0.1, 1.5);
        }
        return ControlPolytope(A, b);
    }
    for (int attempt = 0; attempt < 1000; ++attempt) {
        const int r = s.integer(m + 1, 8);
        Matrix A(r, m);
        Vector b(r);
        for (int k = 0; k < r; ++k) {
            A.row(k) = s.unit(m).transpose();
            b(k) = s.uniform(0.2, 2.0);
        }
        try {
            return ControlPolytope(A, b);
        } catch (const Error&) {
        }
    }
    throw Error("random_polytope: could not draw a bounded polytope");
}

void bounding_box(const ControlPolytope& P, Vector& lo, Vector& hi)
{
    lo = P.vertices().front();
    hi = lo;
    for (const Vector& v : P.vertices()) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
    }
}

// Distance of u from (1 - sigma) fallback + sigma u_*, or infinity when sigma
// leaves [0, 1].
double blend_residual(const ControlOutput& out, const Vector& fallback)
{
    const double s = out.diag.sigma;
    if (!(s >= 0 && s <= 1))
        return std::numeric_limits<double>::infinity();
    return (out.u - ((1 - s) * fallback + s * *out.diag.u_star)).cwiseAbs().maxCoeff();
}

} // namespace

bool SuiteReport::passed() const
{
    for (const CheckResult& c : checks)
        if (!c.passed())
            return false;
    return !checks.empty();
}

const CheckResult& SuiteReport::at(std::string_view name) const
{
    for (const CheckResult& c : checks)
        if (c.name == name)
            return c;
    throw Error("suite " + suite + " has no check named " + std::string(name));
}

const std::vector<std::string>& suite_names()
{
    static const std::vector<std::string> names{"softnum", "gradients", "sets", "optim", "control"};
    return names;
}

// Calibrated on 10^3 pairs per preset (largest observed quotient about 40 on
// both scenarios), then pinned with headroom.
double continuity_constant(std::string_view scenario)
{
    if (scenario == "unicycle")
        return 1e3;
    return 1e3;
}

double fine_hard_barrier(const Scenario& scenario, std::size_t backup, const Vector& x, const HorizonGrid& grid,
                         int factor)
{
    const HorizonGrid fine{grid.samples * factor, grid.period / factor, 1};
    const FlowResult flow = integrate_flow(scenario, backup, x, fine);
    return hard_barrier_single(flow, scenario.safety, scenario.backups[backup]);
}

double superlevel_fraction(const Scenario& scenario, const BarrierParams& params, std::size_t backup_count,
                           int per_axis)
{
    if (scenario.box.lower.size() != 2)
        throw Error("superlevel_fraction: only planar state spaces are supported");
    const SampleBox& box = scenario.box;
    std::size_t inside = 0;
    for (int i = 0; i < per_axis; ++i)
        for (int j = 0; j < per_axis; ++j) {
            const Eigen::Vector2d x(box.lower(0) + (box.upper(0) - box.lower(0)) * i / (per_axis - 1),
                                    box.lower(1) + (box.upper(1) - box.lower(1)) * j / (per_axis - 1));
            inside += evaluate_barrier(scenario, x, params, backup_count).h_soft >= 0;
        }
    return double(inside) / double(per_axis * per_axis);
}

// ---------------------------------------------------------------------------

SuiteReport softnum_suite(std::size_t samples, std::uint64_t seed)
{
    const auto t0 = Clock::now();
    if (samples == 0)
        samples = 10000;
    SuiteReport rep = start("softnum", "-", seed);
    Sampler s(seed);
    Floor min_upper("softmin_below_min", 0.0, true);
    Floor min_lower("softmin_above_floor", 0.0);
    Floor max_upper("softmax_below_max", 0.0);
    Floor max_lower("softmax_above_floor", 0.0, true);
    Ceiling shift("translation_equivariance", 1e-12);
    Ceiling convex("weights_convex", 1e-12);
    Ceiling fd("weights_match_differences", 1e-6);
    const double rhos[] = {1, 10, 100};

    for (std::size_t k = 0; k < samples; ++k) {
        const int n = s.integer(1, 10);
        const double rho = rhos[k % 3];
        Vector z(n);
        for (int i = 0; i < n; ++i)
            z(i) = s.uniform(-10, 10);
        auto witness = [&] {
            std::ostringstream os;
            os << "rho=" << rho << " z=" << str(z);
            return os.str();
        };
        const double lo = z.minCoeff(), hi = z.maxCoeff();
        const double logn = std::log(double(n)) / rho;
        const double smin = softmin(z, rho), smax = softmax(z, rho);
        if (n > 1)
            min_upper.add(lo - smin, witness);
        min_lower.add(smin - (lo - logn), witness);
        max_upper.add(hi - smax, witness);
        if (n > 1)
            max_lower.add(smax - (hi - logn), witness);

        const double c = s.uniform(-10, 10);
        shift.add(std::abs(softmin(Vector(z.array() + c), rho) - smin - c), witness);
        shift.add(std::abs(softmax(Vector(z.array() + c), rho) - smax - c), witness);

        const Vector wmin = softmin_weights(z, rho), wmax = softmax_weights(z, rho);
        convex.add(std::max(std::abs(wmin.sum() - 1), -std::min(0.0, wmin.minCoeff())), witness);
        convex.add(std::max(std::abs(wmax.sum() - 1), -std::min(0.0, wmax.minCoeff())), witness);

        if (k % 10 == 0) {
            const double delta = 1e-5;
            for (int i = 0; i < n; ++i) {
                Vector zp = z, zm = z;
                zp(i) += delta;
                zm(i) -= delta;
                fd.add(std::abs((softmin(zp, rho) - softmin(zm, rho)) / (2 * delta) - wmin(i)), witness);
                fd.add(std::abs((softmax(zp, rho) - softmax(zm, rho)) / (2 * delta) - wmax(i)), witness);
            }
        }
    }

    Floor overflow("overflow_robustness", 0.0, true);
    {
        const Eigen::Vector2d z(1e4, 1e4 + 1);
        const double v = softmin(z, 100.0);
        const bool ok = std::isfinite(v) && v < 1e4 && v >= 1e4 - std::log(2.0) / 100;
        overflow.add(ok ? 1.0 : 0.0, [&] { return "softmin([1e4, 1e4+1], 100) = " + std::to_string(v); });
    }

    for (auto* c : {&min_upper.r, &min_lower.r, &max_upper.r, &max_lower.r, &shift.r, &convex.r, &fd.r, &overflow.r})
        rep.checks.push_back(*c);
    rep.seconds = elapsed(t0);
    return rep;
}

SuiteReport gradients_suite(const Preset& preset, std::size_t samples, std::uint64_t seed)
{
    const auto t0 = Clock::now();
    if (samples == 0)
        samples = 100;
    const Scenario& sc = preset.scenario;
    const BarrierParams params = preset.filter.barrier_params();
    const std::size_t nu = backups_in_use(preset);
    SuiteReport rep = start("gradients", sc.name, seed);
    Sampler s(seed);

    Ceiling hs("safety_gradient", 1e-4);
    Ceiling hb("backup_barrier_gradient", 1e-4);
    Ceiling jac("backup_field_jacobian", 1e-5);
    for (std::size_t k = 0; k < 10 * samples; ++k) {
        const Vector x = s.in_box(sc.box);
        auto witness = [&] { return "x=" + str(x); };
        hs.add(oracle::relative_error(sc.safety.gradient(x), oracle::fd_gradient(sc.safety.value, x, 1e-6)), witness);
        for (std::size_t j = 0; j < nu; ++j) {
            const BackupPolicy& b = sc.backups[j];
            hb.add(oracle::relative_error(b.barrier_gradient(x), oracle::fd_gradient(b.barrier, x, 1e-6)), witness);
            const Matrix fd = oracle::fd_jacobian([&](const Vector& z) { return sc.model.backup_field(z, b); }, x, 1e-6);
            jac.add(oracle::relative_error(sc.model.backup_field_jacobian(x, b), fd), witness);
        }
    }

    Ceiling grad("barrier_gradient", 1e-3);
    Ceiling sens("sensitivity", 1e-4);
    Ceiling lie("drift_lie_derivative", 1e-3);
    const auto h_of = [&](const Vector& z) { return evaluate_barrier(sc, z, params, nu).h_soft; };
    for (std::size_t k = 0; k < samples; ++k) {
        const Vector x = s.in_box(sc.box);
        auto witness = [&] { return "x=" + str(x); };
        const BarrierEval ev = evaluate_barrier(sc, x, params, nu);
        grad.add(oracle::relative_error(ev.grad_h, oracle::fd_gradient(h_of, x, 1e-5)), witness);

        for (std::size_t j = 0; j < nu; ++j) {
            const FlowResult flow = integrate_flow(sc, j, x, params.grid);
            const Matrix fd = oracle::fd_jacobian(
                [&](const Vector& z) { return Vector(integrate_flow(sc, j, z, params.grid).phi.back()); }, x, 1e-5);
            sens.add(oracle::relative_error(flow.sensitivity.back(), fd), witness);
        }

        const Vector f = sc.model.drift(x);
        const double delta = 1e-5;
        const double fd_lf = (h_of(x + delta * f) - h_of(x - delta * f)) / (2 * delta);
        lie.add(std::abs(ev.Lf_h - fd_lf) / std::max(std::abs(fd_lf), 1e-6), witness);
    }

    for (auto* c : {&hs.r, &hb.r, &jac.r, &grad.r, &sens.r, &lie.r})
        rep.checks.push_back(*c);
    rep.seconds = elapsed(t0);
    return rep;
}

SuiteReport sets_suite(const Preset& preset, std::size_t samples, std::uint64_t seed)
{
    const auto t0 = Clock::now();
    if (samples == 0)
        samples = 10000;
    const Scenario& sc = preset.scenario;
    const FilterConfig& f = preset.filter;
    const BarrierParams params = f.barrier_params();
    const std::size_t nu = backups_in_use(preset);
    SuiteReport rep = start("sets", sc.name, seed);
    Sampler s(seed);

    Floor backup_in_fine("backup_set_in_fine_hard_set", -1e-6);
    Floor fine_in_hard("fine_hard_set_in_hard_set", -1e-6);
    Floor hard_in_safe("hard_set_in_safe_set", 0.0);
    Floor soft_below_hard("soft_below_hard", 0.0, true);
    Floor soft_in_hard("soft_set_in_hard_set", 0.0, true);
    Floor sandwich("soft_above_sandwich_bound", 0.0);
    Floor monotone("soft_monotone_in_rho1", -1e-12);
    const double slack = std::log(double(f.grid.samples + 2)) / f.rho1 + (nu > 1 ? std::log(double(nu)) / f.rho2 : 0.0);

    for (std::size_t k = 0; k < samples; ++k) {
        const Vector x = s.in_box(sc.box);
        auto witness = [&] { return "x=" + str(x); };
        const double hs = sc.safety.value(x);
        std::vector<FlowResult> flows;
        for (std::size_t j = 0; j < nu; ++j) {
            flows.push_back(integrate_flow(sc, j, x, params.grid));
            const BackupPolicy& b = sc.backups[j];
            const double hbar = hard_barrier_single(flows.back(), sc.safety, b);
            const double fine = fine_hard_barrier(sc, j, x, params.grid);
            if (b.barrier(x) >= 0)
                backup_in_fine.add(fine, witness);
            if (fine >= -1e-6)
                fine_in_hard.add(hbar, witness);
            if (hbar >= 0)
                hard_in_safe.add(hs, witness);
        }
        const BarrierEval ev = soft_barrier_multi(flows, sc.safety, sc.backups, f.rho1, f.rho2);
        soft_below_hard.add(ev.h_bar_star - ev.h_soft, witness);
        if (ev.h_soft >= 0)
            soft_in_hard.add(ev.h_bar_star, witness);
        sandwich.add(ev.h_soft - (ev.h_bar_star - slack), witness);

        if (k < 100) {
            double previous = -std::numeric_limits<double>::infinity();
            for (double rho : {10.0, 50.0, 100.0, 500.0}) {
                const double h = soft_barrier_single(flows.front(), sc.safety, sc.backups.front(), rho);
                if (std::isfinite(previous))
                    monotone.add(h - previous, witness);
                previous = h;
            }
        }
    }

    for (auto* c : {&backup_in_fine.r, &fine_in_hard.r, &hard_in_safe.r, &soft_below_hard.r, &soft_in_hard.r,
                    &sandwich.r, &monotone.r})
        rep.checks.push_back(*c);
    rep.seconds = elapsed(t0);
    return rep;
}

SuiteReport optim_suite(std::size_t samples, std::uint64_t seed)
{
    const auto t0 = Clock::now();
    if (samples == 0)
        samples = 1000;
    SuiteReport rep = start("optim", "-", seed);
    Sampler s(seed);

    Ceiling lp("lp_matches_vertex_enumeration", 1e-9);
    Ceiling lp_argmax("lp_argmax_feasible", 1e-9);
    Ceiling lp_neg("lp_negation_consistent", 1e-12);
    for (std::size_t k = 0; k < samples; ++k) {
        const int m = int(k % 3) + 1;
        const ControlPolytope P = random_polytope(s, m);
        const RowVector c = (k % 17 == 0) ? RowVector::Zero(m) : RowVector(s.unit(m).transpose() * s.uniform(0.1, 3));
        const LinearMax got = lp_max_linear(c, P);
        const oracle::LpOracle ref = oracle::lp_max(c, P.A(), P.b());
        auto witness = [&] {
            std::ostringstream os;
            os << "A=" << str(Eigen::Map<const Vector>(P.A().data(), P.A().size())) << " b=" << str(P.b())
               << " c=" << str(c.transpose());
            return os.str();
        };
        lp.add(std::abs(got.value - ref.value), witness);
        lp_argmax.add(P.max_violation(got.argmax), witness);
        double lowest = std::numeric_limits<double>::infinity();
        for (const Vector& v : P.vertices())
            lowest = std::min(lowest, (c * v).value());
        lp_neg.add(std::abs(lp_max_linear(-c, P).value + lowest), witness);
    }

    Ceiling qp("qp_matches_oracle", 1e-6);
    Ceiling admissible("qp_admissible", 1e-9);
    Floor barrier("qp_meets_barrier", -1e-9);
    Ceiling projection("qp_projection_property", 1e-12);
    Floor grid("qp_grid_never_better", -1e-9);
    Floor beta_iff("beta_sign_matches_feasibility", 0.5);
    Floor throws("qp_rejects_infeasible", 0.5);
    // Draw until `samples` feasible instances were compared; infeasible draws
    // feed the rejection checks.
    for (std::size_t k = 0; qp.r.samples < samples && k < 10 * samples; ++k) {
        const int m = int(k % 3) + 1;
        const ControlPolytope P = random_polytope(s, m);
        const RowVector normal = s.unit(m).transpose() * s.uniform(0.1, 2.0);
        const double offset = -lp_max_linear(normal, P).value + s.uniform(-0.5, 1.5);
        Vector u_d(m);
        for (int i = 0; i < m; ++i)
            u_d(i) = s.uniform(-3, 3);
        auto witness = [&] {
            std::ostringstream os;
            os << "A=" << str(Eigen::Map<const Vector>(P.A().data(), P.A().size())) << " b=" << str(P.b())
               << " normal=" << str(normal.transpose()) << " offset=" << offset << " u_d=" << str(u_d);
            return os.str();
        };
        const double margin = offset + lp_max_linear(normal, P).value;
        const std::optional<Vector> ref = oracle::qp_min_distance(u_d, P.A(), P.b(), normal, offset);
        if (std::abs(margin) > 1e-9)
            beta_iff.add((margin >= 0) == ref.has_value() ? 1.0 : 0.0, witness);
        if (margin < -1e-9) {
            bool threw = false;
            try {
                qp_min_intervention(u_d, P, AffineConstraint{normal, offset});
            } catch (const InfeasibleQp&) {
                threw = true;
            }
            throws.add(threw ? 1.0 : 0.0, witness);
            continue;
        }
        if (margin < 0 || !ref)
            continue;
        const Vector u = qp_min_intervention(u_d, P, AffineConstraint{normal, offset}).u;
        qp.add((u - *ref).norm(), witness);
        admissible.add(P.max_violation(u), witness);
        barrier.add((normal * u).value() + offset, witness);

        Vector lo, hi;
        bounding_box(P, lo, hi);
        const double best = (u - u_d).norm();
        std::size_t found = 0;
        for (int attempt = 0; attempt < 20000 && found < 1000; ++attempt) {
            Vector v(m);
            for (int i = 0; i < m; ++i)
                v(i) = s.uniform(lo(i), hi(i));
            if (!P.contains(v, 0.0) || (normal * v).value() + offset < 0)
                continue;
            ++found;
            projection.add(best - (v - u_d).norm(), witness);
        }
        const std::optional<Vector> g =
            oracle::qp_grid_search(u_d, P.A(), P.b(), normal, offset, lo, hi, m == 3 ? 15 : 31);
        if (g)
            grid.add((*g - u_d).norm() - (*ref - u_d).norm(), witness);
    }

    for (auto* c : {&lp.r, &lp_argmax.r, &lp_neg.r, &qp.r, &admissible.r, &barrier.r, &projection.r, &grid.r,
                    &beta_iff.r, &throws.r})
        rep.checks.push_back(*c);
    rep.seconds = elapsed(t0);
    return rep;
}

SuiteReport control_suite(const Preset& preset, std::size_t samples, std::uint64_t seed)
{
    const auto t0 = Clock::now();
    if (samples == 0)
        samples = 10000;
    const Scenario& sc = preset.scenario;
    const FilterConfig& f = preset.filter;
    const double eps = f.resolved_eps();
    const double C = continuity_constant(sc.name);
    SuiteReport rep = start("control", sc.name, seed);
    Sampler s(seed);

    struct LawChecks
    {
        Ceiling admissible;
        Ceiling convex;
        Ceiling gating;
        Ceiling continuity;
    };
    auto make = [&](const std::string& law) {
        return LawChecks{Ceiling(law + "_admissible", 1e-9), Ceiling(law + "_blend_convex", 1e-12),
                         Ceiling(law + "_gamma_gates_qp", 0.0), Ceiling(law + "_continuity", C)};
    };
    LawChecks single = make("single"), multi = make("multi");
    Ceiling identical("multi_equals_single_for_one_backup", 0.0);

    auto fallback_multi = [&](const Vector& x, const Diagnostics& d) {
        return augmented_backup(x, d.barrier.per_backup_h_bar, sc.backups, eps);
    };

    for (std::size_t k = 0; k < samples; ++k) {
        const Vector x = s.in_box(sc.box, 1.25);
        auto witness = [&] { return "x=" + str(x); };

        std::uint64_t calls = qp_call_count();
        const ControlOutput a = control_single(x, sc, f);
        single.admissible.add(sc.polytope.max_violation(a.u), witness);
        single.gating.add(a.diag.gamma < 0 ? double(qp_call_count() - calls) : 0.0, witness);
        if (a.diag.u_star) {
            const Vector ub = sc.backups.front().control(x);
            single.convex.add(blend_residual(a, ub), witness);
        }

        FilterState state;
        calls = qp_call_count();
        const ControlOutput b = control_multi(x, state, sc, f);
        multi.admissible.add(sc.polytope.max_violation(b.u), witness);
        multi.gating.add(b.diag.gamma < 0 ? double(qp_call_count() - calls) : 0.0, witness);
        if (b.diag.u_star) {
            multi.convex.add(blend_residual(b, fallback_multi(x, b.diag)), witness);
        }
        if (sc.backups.size() == 1)
            identical.add((a.u - b.u).cwiseAbs().maxCoeff(), witness);

        if (k % 10 == 0) {
            const Vector x2 = x + 1e-6 * s.unit(x.size());
            auto pair_witness = [&] { return "x1=" + str(x) + " x2=" + str(x2); };
            const double dx = (x2 - x).norm();
            const ControlOutput a2 = control_single(x2, sc, f);
            single.continuity.add((a2.u - a.u).norm() / dx, pair_witness);

            FilterState state2 = state; // same q; the pair does not straddle bd S_eps
            const ControlOutput b2 = control_multi(x2, state2, sc, f);
            const bool straddles = (b.diag.barrier.h_bar_star > eps) != (b2.diag.barrier.h_bar_star > eps);
            if (!straddles)
                multi.continuity.add((b2.u - b.u).norm() / dx, pair_witness);
        }
    }

    for (LawChecks* l : {&single, &multi})
        for (auto* c : {&l->admissible.r, &l->convex.r, &l->gating.r, &l->continuity.r})
            rep.checks.push_back(*c);
    if (sc.backups.size() == 1)
        rep.checks.push_back(identical.r);
    rep.seconds = elapsed(t0);
    return rep;
}

SuiteReport run_suite(std::string_view suite, const Preset& preset, std::size_t samples, std::uint64_t seed)
{
    if (suite == "softnum")
        return softnum_suite(samples, seed);
    if (suite == "gradients")
        return gradients_suite(preset, samples, seed);
    if (suite == "sets")
        return sets_suite(preset, samples, seed);
    if (suite == "optim")
        return optim_suite(samples, seed);
    if (suite == "control")
        return control_suite(preset, samples, seed);
    throw Error("unknown suite '" + std::string(suite) + "' (expected softnum, gradients, sets, optim or control)");
}

json to_json(const SuiteReport& report)
{
    json checks = json::array();
    for (const CheckResult& c : report.checks)
        checks.push_back({{"name", c.name},
                          {"passed", c.passed()},
                          {"samples", c.samples},
                          {"violations", c.violations},
                          {"worst", c.worst},
                          {"threshold", c.threshold},
                          {"witness", c.witness}});
    return json{{"suite", report.suite},     {"scenario", report.scenario}, {"seed", report.seed},
                {"seconds", report.seconds}, {"passed", report.passed()},   {"checks", checks}};
}

} // namespace sbf::checks
