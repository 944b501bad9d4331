#include "sbf/barrier.hpp"

#include "sbf/softnum.hpp"

namespace sbf {

Vector barrier_arguments(const FlowResult& flow, const SafetySpec& safety, const BackupPolicy& backup)
{
    const std::size_t n_samples = flow.phi.size();
    Vector z(Eigen::Index(n_samples + 1));
    for (std::size_t i = 0; i < n_samples; ++i)
        z(Eigen::Index(i)) = safety.value(flow.phi[i]);
    z(Eigen::Index(n_samples)) = backup.barrier(flow.phi.back());
    return z;
}

double hard_barrier_single(const FlowResult& flow, const SafetySpec& safety, const BackupPolicy& backup)
{
    return barrier_arguments(flow, safety, backup).minCoeff();
}

double soft_barrier_single(const FlowResult& flow, const SafetySpec& safety, const BackupPolicy& backup,
                           double rho1)
{
    return softmin(barrier_arguments(flow, safety, backup), rho1);
}

namespace {

RowVector weighted_gradient(const FlowResult& flow, const SafetySpec& safety, const BackupPolicy& backup,
                            const Vector& weights)
{
    const std::size_t n_samples = flow.phi.size();
    RowVector g = RowVector::Zero(flow.phi.front().size());
    for (std::size_t i = 0; i < n_samples; ++i) {
        const double w = weights(Eigen::Index(i));
        if (w != 0.0)
            g.noalias() += w * (safety.gradient(flow.phi[i]) * flow.sensitivity[i]);
    }
    const double wb = weights(Eigen::Index(n_samples));
    if (wb != 0.0)
        g.noalias() += wb * (backup.barrier_gradient(flow.phi.back()) * flow.sensitivity.back());
    return g;
}

} // namespace

RowVector barrier_gradient_single(const FlowResult& flow, const SafetySpec& safety, const BackupPolicy& backup,
                                  double rho1)
{
    const Vector z = barrier_arguments(flow, safety, backup);
    return weighted_gradient(flow, safety, backup, softmin_weights(z, rho1));
}

BackupBarrier evaluate_backup_barrier(const FlowResult& flow, const SafetySpec& safety, const BackupPolicy& backup,
                                      double rho1)
{
    const Vector z = barrier_arguments(flow, safety, backup);
    BackupBarrier out;
    out.h_soft = softmin(z, rho1);
    out.h_bar = z.minCoeff();
    out.gradient = weighted_gradient(flow, safety, backup, softmin_weights(z, rho1));
    return out;
}

BarrierEval soft_barrier_multi(const std::vector<FlowResult>& flows, const SafetySpec& safety,
                               const std::vector<BackupPolicy>& backups, double rho1, double rho2)
{
    if (flows.empty() || flows.size() > backups.size())
        throw Error("soft_barrier_multi: need one flow per backup (at least one)");
    const auto nu = Eigen::Index(flows.size());
    BarrierEval ev;
    ev.per_backup_h_bar.resize(nu);
    ev.per_backup_h_soft.resize(nu);
    Matrix grads(nu, flows.front().phi.front().size());
    for (Eigen::Index j = 0; j < nu; ++j) {
        const BackupBarrier b = evaluate_backup_barrier(flows[std::size_t(j)], safety, backups[std::size_t(j)], rho1);
        ev.per_backup_h_soft(j) = b.h_soft;
        ev.per_backup_h_bar(j) = b.h_bar;
        grads.row(j) = b.gradient;
    }
    ev.h_soft = softmax(ev.per_backup_h_soft, rho2);
    ev.h_bar_star = ev.per_backup_h_bar.maxCoeff();
    ev.grad_h = nu == 1 ? RowVector(grads.row(0)) : RowVector(softmax_weights(ev.per_backup_h_soft, rho2).transpose() * grads);
    return ev;
}

RowVector barrier_gradient_multi(const std::vector<FlowResult>& flows, const SafetySpec& safety,
                                 const std::vector<BackupPolicy>& backups, double rho1, double rho2)
{
    return soft_barrier_multi(flows, safety, backups, rho1, rho2).grad_h;
}

LieDerivatives lie_derivatives(const Vector& x, const RowVector& grad_h, const SystemModel& model)
{
    return LieDerivatives{grad_h.dot(model.drift(x)), grad_h * model.input_map(x)};
}

BarrierEval evaluate_barrier(const Scenario& scenario, const Vector& x, const BarrierParams& params,
                             std::size_t backup_count)
{
    if (backup_count == 0 || backup_count > scenario.backups.size())
        throw Error("evaluate_barrier: backup count out of range");
    std::vector<FlowResult> flows;
    flows.reserve(backup_count);
    for (std::size_t j = 0; j < backup_count; ++j)
        flows.push_back(integrate_flow(scenario, j, x, params.grid));
    BarrierEval ev = soft_barrier_multi(flows, scenario.safety, scenario.backups, params.rho1, params.rho2);
    const LieDerivatives lie = lie_derivatives(x, ev.grad_h, scenario.model);
    ev.Lf_h = lie.Lf;
    ev.Lg_h = lie.Lg;
    return ev;
}

} // namespace sbf
