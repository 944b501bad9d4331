#pragma once

// Safety-filter control laws.
//
// Single backup: with gamma = min((h - eps)/kappa_h, beta/kappa_beta),
//   u = u_b                                  if gamma < 0,
//   u = (1 - sigma(gamma)) u_b + sigma(gamma) u_*   otherwise,
// where u_* is the minimum-intervention QP solution.
//
// Several backups: the same blend around the augmented backup u_a (margin
// weighted mix of the backups whose hard barrier clears eps), and the switched
// backup u_{b_q} outside the interior of S_eps = { hbar* >= eps }.

#include "sbf/barrier.hpp"
#include "sbf/optim.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace sbf {

enum class SigmaKind { piecewise_linear };
enum class EpsMode { manual, lipschitz };

struct FilterConfig
{
    double rho1 = 100;
    double rho2 = 50;
    double alpha = 1;
    double eps = 0;
    double kappa_h = 0.05;
    double kappa_beta = 0.05;
    HorizonGrid grid;
    SigmaKind sigma_kind = SigmaKind::piecewise_linear;
    EpsMode eps_mode = EpsMode::manual;
    std::optional<double> l_s;
    std::optional<double> l_phi;

    void validate() const;
    /// eps itself in manual mode, Ts l_phi l_s / 2 in lipschitz mode (both
    /// constants must be set by then).
    double resolved_eps() const;
    BarrierParams barrier_params() const { return BarrierParams{rho1, rho2, grid}; }
};

/// 0 for a <= 0, a on (0, 1), 1 for a >= 1.
double sigma(double a);
double gamma(double h, double beta, const FilterConfig& cfg);

/// { j : hbar_j >= eps }, ascending.
std::vector<std::size_t> index_set(const Vector& per_backup_h_bar, double eps);

/// sum_j max(0, hbar_j - eps) u_bj(x) / sum_j max(0, hbar_j - eps). Throws when
/// no margin is positive. With one contributing backup its control is returned
/// unchanged.
Vector augmented_backup(const Vector& x, const Vector& per_backup_h_bar, const std::vector<BackupPolicy>& backups,
                        double eps);

enum class Branch {
    backup,    // u = u_b (or u_{b_q})
    augmented, // u = u_a
    blend,     // 0 <= sigma < 1
    qp,        // sigma = 1, u = u_*
    desired,   // unfiltered desired control (diagnostic runs only)
};

std::string_view to_string(Branch b);

struct Diagnostics
{
    BarrierEval barrier;
    double h_s = 0;
    double beta = 0;
    double gamma = 0;
    double sigma = 0;
    std::size_t q = 0;
    Branch branch = Branch::backup;
    bool qp_invoked = false;
    bool switched = false;
    std::optional<Vector> u_star;
};

struct ControlOutput
{
    Vector u;
    Diagnostics diag;
};

/// Single-backup law; uses the scenario's first backup.
ControlOutput control_single(const Vector& x, const Scenario& scenario, const FilterConfig& cfg);

struct FilterState
{
    std::optional<std::size_t> q;   // unset until the first step
    std::optional<bool> inside;     // hbar*(x) > eps at the previous step
};

/// Multi-backup law over all scenario backups. q is (re)assigned to the
/// argmax of the per-backup hard barriers at the first call and whenever
/// hbar* - eps changes sign between consecutive calls; lowest index on ties.
ControlOutput control_multi(const Vector& x, FilterState& state, const Scenario& scenario, const FilterConfig& cfg);

} // namespace sbf
