#include "sbf/filter.hpp"

#include <cmath>

namespace sbf {
namespace {

bool positive_finite(double v)
{
    return v > 0 && std::isfinite(v);
}

std::size_t argmax_lowest(const Vector& v)
{
    Eigen::Index k = 0;
    for (Eigen::Index i = 1; i < v.size(); ++i)
        if (v(i) > v(k))
            k = i;
    return std::size_t(k);
}

// Shared tail of both laws: the fallback when gamma < 0, otherwise the
// sigma(gamma) homotopy from the fallback to u_*.
void finish(const Vector& x, const Vector& fallback, Branch fallback_branch, const Scenario& scenario,
            const FilterConfig& cfg, double eps, ControlOutput& out)
{
    Diagnostics& d = out.diag;
    if (d.gamma < 0) {
        d.sigma = 0;
        d.branch = fallback_branch;
        out.u = fallback;
        return;
    }
    d.sigma = sigma(d.gamma);
    const QpResult qp =
        qp_min_intervention(scenario.desired(x), scenario.polytope, barrier_constraint(d.barrier, cfg.alpha, eps));
    d.qp_invoked = true;
    d.u_star = qp.u;
    if (d.sigma >= 1) {
        d.branch = Branch::qp;
        out.u = qp.u;
    } else {
        d.branch = Branch::blend;
        out.u = (1 - d.sigma) * fallback + d.sigma * qp.u;
    }
}

} // namespace

void FilterConfig::validate() const
{
    if (!positive_finite(rho1) || !positive_finite(rho2))
        throw Error("filter config: rho1 and rho2 must be positive");
    if (!positive_finite(alpha))
        throw Error("filter config: alpha must be positive");
    if (!positive_finite(kappa_h) || !positive_finite(kappa_beta))
        throw Error("filter config: kappa_h and kappa_beta must be positive");
    if (eps_mode == EpsMode::manual && !(eps >= 0 && std::isfinite(eps)))
        throw Error("filter config: eps must be nonnegative");
    if (l_s && !(*l_s >= 0 && std::isfinite(*l_s)))
        throw Error("filter config: l_s must be nonnegative");
    if (l_phi && !(*l_phi >= 0 && std::isfinite(*l_phi)))
        throw Error("filter config: l_phi must be nonnegative");
    grid.validate();
}

double FilterConfig::resolved_eps() const
{
    if (eps_mode == EpsMode::manual)
        return eps;
    if (!l_s || !l_phi)
        throw Error("filter config: lipschitz eps needs l_s and l_phi");
    return 0.5 * grid.period * *l_phi * *l_s;
}

double sigma(double a)
{
    if (a <= 0)
        return 0;
    if (a >= 1)
        return 1;
    return a;
}

double gamma(double h, double beta, const FilterConfig& cfg)
{
    return std::min((h - cfg.resolved_eps()) / cfg.kappa_h, beta / cfg.kappa_beta);
}

std::vector<std::size_t> index_set(const Vector& per_backup_h_bar, double eps)
{
    std::vector<std::size_t> out;
    for (Eigen::Index j = 0; j < per_backup_h_bar.size(); ++j)
        if (per_backup_h_bar(j) >= eps)
            out.push_back(std::size_t(j));
    return out;
}

Vector augmented_backup(const Vector& x, const Vector& per_backup_h_bar, const std::vector<BackupPolicy>& backups,
                        double eps)
{
    if (std::size_t(per_backup_h_bar.size()) > backups.size())
        throw Error("augmented_backup: more barrier values than backups");
    double total = 0;
    std::size_t contributors = 0, last = 0;
    for (Eigen::Index j = 0; j < per_backup_h_bar.size(); ++j) {
        const double w = std::max(0.0, per_backup_h_bar(j) - eps);
        if (w > 0) {
            total += w;
            ++contributors;
            last = std::size_t(j);
        }
    }
    if (!(total > 0))
        throw Error("augmented_backup: no backup margin exceeds eps");
    if (contributors == 1)
        return backups[last].control(x);
    Vector u;
    for (Eigen::Index j = 0; j < per_backup_h_bar.size(); ++j) {
        const double w = std::max(0.0, per_backup_h_bar(j) - eps);
        if (w <= 0)
            continue;
        const Vector uj = (w / total) * backups[std::size_t(j)].control(x);
        u = u.size() ? Vector(u + uj) : uj;
    }
    return u;
}

ControlOutput control_single(const Vector& x, const Scenario& scenario, const FilterConfig& cfg)
{
    const double eps = cfg.resolved_eps();
    ControlOutput out;
    Diagnostics& d = out.diag;
    d.barrier = evaluate_barrier(scenario, x, cfg.barrier_params(), 1);
    d.h_s = scenario.safety.value(x);
    d.beta = beta(d.barrier, scenario.polytope, cfg.alpha, eps);
    d.gamma = gamma(d.barrier.h_soft, d.beta, cfg);
    finish(x, scenario.backups.front().control(x), Branch::backup, scenario, cfg, eps, out);
    return out;
}

ControlOutput control_multi(const Vector& x, FilterState& state, const Scenario& scenario, const FilterConfig& cfg)
{
    const double eps = cfg.resolved_eps();
    ControlOutput out;
    Diagnostics& d = out.diag;
    d.barrier = evaluate_barrier(scenario, x, cfg.barrier_params(), scenario.backups.size());
    d.h_s = scenario.safety.value(x);
    d.beta = beta(d.barrier, scenario.polytope, cfg.alpha, eps);
    d.gamma = gamma(d.barrier.h_soft, d.beta, cfg);

    const bool inside = d.barrier.h_bar_star > eps;
    if (!state.q || (state.inside && *state.inside != inside)) {
        const std::size_t q = argmax_lowest(d.barrier.per_backup_h_bar);
        d.switched = state.q.has_value() && *state.q != q;
        state.q = q;
    }
    state.inside = inside;
    d.q = *state.q;

    if (!inside) {
        d.sigma = 0;
        d.branch = Branch::backup;
        out.u = scenario.backups[d.q].control(x);
        return out;
    }
    const Vector u_a = augmented_backup(x, d.barrier.per_backup_h_bar, scenario.backups, eps);
    finish(x, u_a, Branch::augmented, scenario, cfg, eps, out);
    return out;
}

std::string_view to_string(Branch b)
{
    switch (b) {
    case Branch::backup: return "backup";
    case Branch::augmented: return "augmented";
    case Branch::blend: return "blend";
    case Branch::qp: return "qp";
    case Branch::desired: return "desired";
    }
    return "unknown";
}

} // namespace sbf
