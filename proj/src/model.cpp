#include "sbf/model.hpp"

#include <numbers>

namespace sbf {

Matrix SystemModel::backup_field_jacobian(const Vector& x, const BackupPolicy& backup) const
{
    if (backup.field_jacobian)
        return backup.field_jacobian(x);
    constexpr double step = 1e-6;
    Matrix J(x.size(), x.size());
    Vector xp = x, xm = x;
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        xp(k) = x(k) + step;
        xm(k) = x(k) - step;
        J.col(k) = (backup_field(xp, backup) - backup_field(xm, backup)) / (2 * step);
        xp(k) = xm(k) = x(k);
    }
    return J;
}

CsatParams CsatParams::continuously_differentiable(double ubar, double lambda)
{
    if (!(ubar > 0) || !(lambda > 0 && lambda < 1))
        throw Error("csat: need ubar > 0 and 0 < lambda < 1");
    // With the crest at ubar, width w = ubar*lambda and phase t = c2*w, unit
    // slope plus matching value at the inner joint reduce to t*cot(t/2) = 1.
    double t = 2.3;
    for (int it = 0; it < 50; ++it) {
        const double c = 1 / std::tan(t / 2);
        const double r = t * c - 1;
        const double dr = c - t / (2 * std::sin(t / 2) * std::sin(t / 2));
        const double next = t - r / dr;
        if (std::abs(next - t) < 1e-15) {
            t = next;
            break;
        }
        t = next;
    }
    const double w = ubar * lambda;
    CsatParams p;
    p.ubar = ubar;
    p.lambda = lambda;
    p.c2 = t / w;
    p.c1 = w / (1 - std::cos(t));
    p.c3 = std::numbers::pi / 2 - p.c2 * ubar;
    p.c4 = ubar - p.c1;
    return p;
}

double csat_derivative(double a, const CsatParams& p)
{
    const double inner = p.ubar * (1 - p.lambda);
    if (a > p.ubar || a < -p.ubar)
        return 0;
    if (a >= inner)
        return p.c1 * p.c2 * std::cos(p.c2 * a + p.c3);
    if (a > -inner)
        return 1;
    return p.c1 * p.c2 * std::cos(p.c2 * a - p.c3);
}

double QuadraticBarrier::operator()(const Vector& x) const
{
    const Vector e = x - center;
    return level - e.dot(weight * e);
}

RowVector QuadraticBarrier::gradient(const Vector& x) const
{
    const Vector e = x - center;
    return -(e.transpose() * (weight + weight.transpose()));
}

} // namespace sbf
