#pragma once

// Composite barriers over predicted backup trajectories.
//
// For one backup the N + 2 barrier arguments are
//   z = ( h_s(phi_0), h_s(phi_1), ..., h_s(phi_N), h_b(phi_N) ),
// the hard barrier is min z and the soft barrier is softmin_rho1 z. With
// several backups, h = softmax_rho2 over the per-backup soft barriers and the
// hard counterpart is the max of the per-backup hard barriers.

#include "sbf/flow.hpp"

#include <vector>

namespace sbf {

/// The N + 2 arguments, in the order listed above.
Vector barrier_arguments(const FlowResult& flow, const SafetySpec& safety, const BackupPolicy& backup);

double hard_barrier_single(const FlowResult& flow, const SafetySpec& safety, const BackupPolicy& backup);
double soft_barrier_single(const FlowResult& flow, const SafetySpec& safety, const BackupPolicy& backup,
                           double rho1);

/// dh/dx = sum_i w_i h_s'(phi_i) Q_i + w_b h_b'(phi_N) Q_N, with w the
/// soft-minimum weights of the barrier arguments.
RowVector barrier_gradient_single(const FlowResult& flow, const SafetySpec& safety, const BackupPolicy& backup,
                                  double rho1);

struct BackupBarrier
{
    double h_soft = 0;
    double h_bar = 0;
    RowVector gradient;
};

/// Soft and hard barrier plus gradient for one backup, sharing one pass over
/// the trajectory.
BackupBarrier evaluate_backup_barrier(const FlowResult& flow, const SafetySpec& safety, const BackupPolicy& backup,
                                      double rho1);

struct BarrierEval
{
    double h_soft = 0;             // softmax over per-backup soft barriers
    double h_bar_star = 0;         // max over per-backup hard barriers
    Vector per_backup_h_bar;
    Vector per_backup_h_soft;
    RowVector grad_h;
    double Lf_h = 0;
    RowVector Lg_h;
};

/// Fills everything except the Lie derivatives. Backup j uses flows[j].
BarrierEval soft_barrier_multi(const std::vector<FlowResult>& flows, const SafetySpec& safety,
                               const std::vector<BackupPolicy>& backups, double rho1, double rho2);

RowVector barrier_gradient_multi(const std::vector<FlowResult>& flows, const SafetySpec& safety,
                                 const std::vector<BackupPolicy>& backups, double rho1, double rho2);

struct LieDerivatives
{
    double Lf = 0;
    RowVector Lg;
};

LieDerivatives lie_derivatives(const Vector& x, const RowVector& grad_h, const SystemModel& model);

struct BarrierParams
{
    double rho1 = 100;
    double rho2 = 50;
    HorizonGrid grid;
};

/// Integrates the first `backup_count` backups from x and evaluates the
/// composite barrier with Lie derivatives.
BarrierEval evaluate_barrier(const Scenario& scenario, const Vector& x, const BarrierParams& params,
                             std::size_t backup_count);

} // namespace sbf
