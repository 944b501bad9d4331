#pragma once

// Finite-horizon prediction of the closed-loop backup trajectory phi(x, .)
// together with its state sensitivity Q(x, .) = d phi / d x, both sampled on
// {0, Ts, ..., N Ts}. The n-dimensional flow and the n x n variational system
// dQ/dt = f~'(phi) Q are advanced jointly by classical RK4 with a fixed step
// Ts / substeps, so the sensitivity is the exact derivative of the discrete
// flow map.

#include "sbf/model.hpp"

#include <functional>
#include <string>
#include <vector>

namespace sbf {

struct HorizonGrid
{
    int samples = 50;     // N
    double period = 0.1;  // Ts
    int substeps = 5;     // RK4 steps per Ts

    double horizon() const { return samples * period; }
    void validate() const;
};

struct FlowResult
{
    std::vector<Vector> phi;          // N + 1 states
    std::vector<Matrix> sensitivity;  // N + 1 matrices, Q[0] = I
    std::string backup_label;

    std::size_t samples() const { return phi.size() - 1; }
};

/// Raised when the predicted trajectory stops being finite.
class FlowError : public Error
{
public:
    FlowError(double time, Vector last_state);

    double time() const { return time_; }
    const Vector& last_state() const { return last_state_; }

private:
    double time_;
    Vector last_state_;
};

using VectorFieldJacobian = std::function<Matrix(const Vector&)>;

/// One classical RK4 step of xdot = field(x).
Vector rk4_step(const StateMap& field, const Vector& x, double step);

FlowResult integrate_flow(const StateMap& field, const VectorFieldJacobian& jacobian, const Vector& x,
                          const HorizonGrid& grid, std::string label = {});

FlowResult integrate_flow(const Scenario& scenario, std::size_t backup_index, const Vector& x,
                          const HorizonGrid& grid);

} // namespace sbf
