#pragma once

// Small dense programs over the actuator polytope U = { u : A u <= b }:
// the linear maximum that defines the feasibility margin beta, and the
// minimum-intervention QP  min ||u - u_d||^2  s.t.  u in U,  c u + d >= 0.

#include "sbf/barrier.hpp"
#include "sbf/model.hpp"

#include <cstdint>

namespace sbf {

inline constexpr double kFeasibilityTol = 1e-9;
inline constexpr double kStationarityTol = 1e-8;

struct LinearMax
{
    double value = 0;
    Vector argmax;
    std::size_t vertex = 0; // index into the polytope's vertex cache
};

/// max c u over U, by a scan of the cached vertices. Ties within 1e-12 go to
/// the lowest vertex index.
LinearMax lp_max_linear(const RowVector& c, const ControlPolytope& polytope);

/// The barrier condition  normal u + offset >= 0.
struct AffineConstraint
{
    RowVector normal; // L_g h(x)
    double offset = 0; // L_f h(x) + alpha (h(x) - eps)
};

AffineConstraint barrier_constraint(const BarrierEval& ev, double alpha, double eps);

/// beta = L_f h + alpha (h - eps) + max_{u in U} L_g h u.
double beta(const BarrierEval& ev, const ControlPolytope& polytope, double alpha, double eps);

/// The QP was called on an empty feasible region (beta < 0).
class InfeasibleQp : public Error
{
public:
    using Error::Error;
};

struct QpResult
{
    Vector u;
    int iterations = 0;
    std::vector<int> active;   // working set at the solution; index r means the barrier row
    Vector multipliers;        // matching the working set
};

/// Primal active-set method started from the LP vertex that maximizes the
/// barrier row. The result is checked against the KKT conditions (feasibility
/// 1e-9, stationarity 1e-8) before it is returned.
QpResult qp_min_intervention(const Vector& u_desired, const ControlPolytope& polytope,
                             const AffineConstraint& constraint);

/// Number of qp_min_intervention calls made by this process.
std::uint64_t qp_call_count();

} // namespace sbf
