#pragma once

// Brute-force references used by the sampled checks and the tests. None of
// these share code with the production solvers or integrators they verify.

#include "sbf/model.hpp"

#include <functional>
#include <optional>

namespace sbf::oracle {

/// Central differences, one coordinate at a time.
RowVector fd_gradient(const std::function<double(const Vector&)>& f, const Vector& x, double delta);
Matrix fd_jacobian(const std::function<Vector(const Vector&)>& f, const Vector& x, double delta);

/// ||a - b|| / max(||b||, floor).
double relative_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double floor = 1e-8);

/// Solves the square system M u = v by Cramer's rule (m <= 3); nullopt when
/// |det M| is below 1e-12 times the product of the row norms.
std::optional<Vector> cramer_solve(const Matrix& M, const Vector& v);

struct LpOracle
{
    double value = 0;
    Vector argmax;
    std::size_t vertex_count = 0;
};

/// max c u over { A u <= b } by intersecting every m-subset of the rows.
/// Throws when no feasible intersection exists.
LpOracle lp_max(const RowVector& c, const Matrix& A, const Vector& b);

/// min ||u - u_d|| over { A u <= b, normal u + offset >= 0 } by projecting
/// u_d onto the affine hull of every subset of at most m constraints and
/// keeping the closest feasible projection. nullopt when nothing is feasible.
std::optional<Vector> qp_min_distance(const Vector& u_d, const Matrix& A, const Vector& b, const RowVector& normal,
                                      double offset);

/// Closest feasible point of a uniform grid with `per_axis` points per axis
/// over [lower, upper], then two more grids spanning +/- 4 cells around the
/// best point so far. An independent upper bound for the QP distance.
std::optional<Vector> qp_grid_search(const Vector& u_d, const Matrix& A, const Vector& b, const RowVector& normal,
                                     double offset, const Vector& lower, const Vector& upper, int per_axis);

} // namespace sbf::oracle
