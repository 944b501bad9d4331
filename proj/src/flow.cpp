#include "sbf/flow.hpp"

#include <sstream>

namespace sbf {
namespace {

std::string flow_error_message(double time, const Vector& last)
{
    std::ostringstream os;
    os << "backup flow became non-finite at t = " << time << " (last finite state: "
       << last.transpose() << ")";
    return os.str();
}

} // namespace

void HorizonGrid::validate() const
{
    if (samples < 1 || !(period > 0) || !std::isfinite(period) || substeps < 1)
        throw Error("horizon grid: need N >= 1, Ts > 0 and substeps >= 1");
}

FlowError::FlowError(double time, Vector last_state)
    : Error(flow_error_message(time, last_state)), time_(time), last_state_(std::move(last_state))
{
}

Vector rk4_step(const StateMap& field, const Vector& x, double step)
{
    const Vector k1 = field(x);
    const Vector k2 = field(x + 0.5 * step * k1);
    const Vector k3 = field(x + 0.5 * step * k2);
    const Vector k4 = field(x + step * k3);
    return x + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

FlowResult integrate_flow(const StateMap& field, const VectorFieldJacobian& jacobian, const Vector& x,
                          const HorizonGrid& grid, std::string label)
{
    grid.validate();
    const Eigen::Index n = x.size();
    const double h = grid.period / grid.substeps;

    FlowResult out;
    out.backup_label = std::move(label);
    out.phi.reserve(std::size_t(grid.samples) + 1);
    out.sensitivity.reserve(std::size_t(grid.samples) + 1);
    out.phi.push_back(x);
    out.sensitivity.push_back(Matrix::Identity(n, n));

    Vector state = x;
    Matrix Q = Matrix::Identity(n, n);
    for (int i = 0; i < grid.samples; ++i) {
        for (int s = 0; s < grid.substeps; ++s) {
            const Vector k1 = field(state);
            const Matrix l1 = jacobian(state) * Q;
            const Vector x2 = state + 0.5 * h * k1;
            const Vector k2 = field(x2);
            const Matrix l2 = jacobian(x2) * (Q + 0.5 * h * l1);
            const Vector x3 = state + 0.5 * h * k2;
            const Vector k3 = field(x3);
            const Matrix l3 = jacobian(x3) * (Q + 0.5 * h * l2);
            const Vector x4 = state + h * k3;
            const Vector k4 = field(x4);
            const Matrix l4 = jacobian(x4) * (Q + h * l3);
            Vector next = state + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            Matrix nextQ = Q + (h / 6.0) * (l1 + 2.0 * l2 + 2.0 * l3 + l4);
            if (!next.allFinite() || !nextQ.allFinite())
                throw FlowError((i * grid.substeps + s) * h, state);
            state = std::move(next);
            Q = std::move(nextQ);
        }
        out.phi.push_back(state);
        out.sensitivity.push_back(Q);
    }
    return out;
}

FlowResult integrate_flow(const Scenario& scenario, std::size_t backup_index, const Vector& x,
                          const HorizonGrid& grid)
{
    if (backup_index >= scenario.backups.size())
        throw Error("integrate_flow: backup index out of range");
    const BackupPolicy& backup = scenario.backups[backup_index];
    const SystemModel& model = scenario.model;
    return integrate_flow([&](const Vector& z) { return model.backup_field(z, backup); },
                          [&](const Vector& z) { return model.backup_field_jacobian(z, backup); }, x, grid,
                          backup.label);
}

} // namespace sbf
