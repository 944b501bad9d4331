#pragma once

// Plant, actuator polytope, safe set and backup policies for a control-affine
// system  xdot = f(x) + g(x) u.

#include "sbf/types.hpp"

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace sbf {

using StateMap = std::function<Vector(const Vector&)>;
using ScalarField = std::function<double(const Vector&)>;
using GradientField = std::function<RowVector(const Vector&)>;
using MatrixField = std::function<Matrix(const Vector&)>;

/// A backup control u_b together with the barrier h_b of the set it keeps
/// forward invariant. `field_jacobian`, when set, is the analytic Jacobian of
/// the closed-loop field f(x) + g(x) u_b(x).
struct BackupPolicy
{
    std::string label;
    StateMap control;
    ScalarField barrier;
    GradientField barrier_gradient;
    MatrixField field_jacobian;
};

struct SystemModel
{
    int state_dim = 0;
    int input_dim = 0;
    StateMap drift;
    MatrixField input_map;

    Vector dynamics(const Vector& x, const Vector& u) const { return drift(x) + input_map(x) * u; }

    /// f~(x) = f(x) + g(x) u_b(x).
    Vector backup_field(const Vector& x, const BackupPolicy& backup) const
    {
        return dynamics(x, backup.control(x));
    }

    /// Analytic f~'(x) when the policy provides one, otherwise a central
    /// difference with step 1e-6 (roughly 1e-9 absolute accuracy).
    Matrix backup_field_jacobian(const Vector& x, const BackupPolicy& backup) const;
};

struct SafetySpec
{
    ScalarField value;
    GradientField gradient;
};

/// U = { u : A u <= b }, bounded and nonempty. Vertices are enumerated once at
/// construction; an empty or unbounded description throws.
class ControlPolytope
{
public:
    ControlPolytope(Matrix A, Vector b);

    static ControlPolytope box(const Vector& lower, const Vector& upper);

    const Matrix& A() const { return A_; }
    const Vector& b() const { return b_; }
    int input_dim() const { return int(A_.cols()); }
    const std::vector<Vector>& vertices() const { return vertices_; }

    /// max_i (A u - b)_i; nonpositive inside.
    double max_violation(const Vector& u) const;
    bool contains(const Vector& u, double tol = 1e-9) const { return max_violation(u) <= tol; }

private:
    Matrix A_;
    Vector b_;
    std::vector<Vector> vertices_;
};

struct SampleBox
{
    Vector lower;
    Vector upper;
};

struct Scenario
{
    std::string name;
    SystemModel model;
    ControlPolytope polytope;
    SafetySpec safety;
    std::vector<BackupPolicy> backups;
    StateMap desired;
    SampleBox box;
    // Ground-robot scenarios track a point of interest toward a goal.
    StateMap point_of_interest;
    std::optional<Vector> goal;
};

// ---------------------------------------------------------------------------
// Smooth saturation.

/// Five-branch saturation: identity for |a| < ubar (1 - lambda), a sine blend
/// c1 sin(c2 a +/- c3) +/- c4 up to |a| = ubar, constant beyond.
struct CsatParams
{
    double ubar = 1.5;
    double lambda = 0.3;
    double c1 = 0.18;
    double c2 = 7.77;
    double c3 = -10.08;
    double c4 = 1.32;

    /// Constants that make the saturation continuously differentiable for the
    /// given ubar and lambda (sine crest at ubar, unit slope at the inner joint).
    static CsatParams continuously_differentiable(double ubar, double lambda);
};

template <typename Scalar>
Scalar csat(Scalar a, const CsatParams& p)
{
    const Scalar inner = p.ubar * (1 - p.lambda);
    if (a > p.ubar)
        return Scalar(p.ubar);
    if (a >= inner)
        return p.c1 * std::sin(p.c2 * a + p.c3) + p.c4;
    if (a > -inner)
        return a;
    if (a >= -p.ubar)
        return p.c1 * std::sin(p.c2 * a - p.c3) - p.c4;
    return Scalar(-p.ubar);
}

double csat_derivative(double a, const CsatParams& p);

// ---------------------------------------------------------------------------
// p-norms for large p, evaluated as max|z_i| (sum (|z_i|/max|z_i|)^p)^(1/p).

template <typename Derived>
typename Derived::Scalar pnorm(const Eigen::MatrixBase<Derived>& z, typename Derived::Scalar p)
{
    using Scalar = typename Derived::Scalar;
    const Scalar peak = z.cwiseAbs().maxCoeff();
    if (peak == Scalar(0))
        return Scalar(0);
    return peak * std::pow((z.cwiseAbs().array() / peak).pow(p).sum(), Scalar(1) / p);
}

/// d||z||_p / dz as a row vector; zero at the origin.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, 1, Eigen::Dynamic>
pnorm_gradient(const Eigen::MatrixBase<Derived>& z, typename Derived::Scalar p)
{
    using Scalar = typename Derived::Scalar;
    Eigen::Matrix<Scalar, 1, Eigen::Dynamic> g = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>::Zero(z.size());
    const Scalar norm = pnorm(z, p);
    if (norm == Scalar(0))
        return g;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        const Scalar zi = z.derived().coeff(i);
        const Scalar r = std::abs(zi) / norm;
        g(i) = (zi < 0 ? -1 : 1) * std::pow(r, p - 1);
    }
    return g;
}

/// Quadratic level-set barrier  level - (x - c)^T M (x - c); M is used through
/// its symmetric part.
struct QuadraticBarrier
{
    Vector center;
    Matrix weight;
    double level = 0;

    double operator()(const Vector& x) const;
    RowVector gradient(const Vector& x) const;
};

} // namespace sbf
