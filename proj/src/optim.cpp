#include "sbf/optim.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <atomic>

namespace sbf {
namespace {

std::atomic<std::uint64_t> g_qp_calls{0};

constexpr int kMaxIterations = 100;

} // namespace

LinearMax lp_max_linear(const RowVector& c, const ControlPolytope& polytope)
{
    if (c.size() != polytope.input_dim())
        throw Error("lp_max_linear: objective has the wrong dimension");
    const auto& verts = polytope.vertices();
    LinearMax best;
    best.value = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < verts.size(); ++k) {
        const double v = (c * verts[k]).value();
        if (v > best.value + 1e-12) {
            best.value = v;
            best.vertex = k;
        }
    }
    best.argmax = verts[best.vertex];
    best.value = (c * best.argmax).value();
    return best;
}

AffineConstraint barrier_constraint(const BarrierEval& ev, double alpha, double eps)
{
    return AffineConstraint{ev.Lg_h, ev.Lf_h + alpha * (ev.h_soft - eps)};
}

double beta(const BarrierEval& ev, const ControlPolytope& polytope, double alpha, double eps)
{
    return ev.Lf_h + alpha * (ev.h_soft - eps) + lp_max_linear(ev.Lg_h, polytope).value;
}

std::uint64_t qp_call_count()
{
    return g_qp_calls.load();
}

QpResult qp_min_intervention(const Vector& u_desired, const ControlPolytope& polytope,
                             const AffineConstraint& constraint)
{
    g_qp_calls.fetch_add(1);
    const int m = polytope.input_dim();
    if (u_desired.size() != m || constraint.normal.size() != m)
        throw Error("qp_min_intervention: dimension mismatch");

    // All constraints as G u <= g; the barrier row is the last one.
    const Eigen::Index r = polytope.A().rows();
    Matrix G(r + 1, m);
    Vector g(r + 1);
    G.topRows(r) = polytope.A();
    g.head(r) = polytope.b();
    G.row(r) = -constraint.normal;
    g(r) = constraint.offset;

    const LinearMax start = lp_max_linear(constraint.normal, polytope);
    if (start.value + constraint.offset < -kFeasibilityTol)
        throw InfeasibleQp("qp_min_intervention: barrier constraint cannot be met inside the polytope");

    QpResult res;
    if ((G * u_desired - g).maxCoeff() <= 0.0) {
        res.u = u_desired;
        return res;
    }

    Vector u = start.argmax;
    std::vector<int> work;
    Vector lambda;
    for (res.iterations = 1; res.iterations <= kMaxIterations; ++res.iterations) {
        const Vector target = u_desired - u;
        Matrix Gw(Eigen::Index(work.size()), m);
        for (std::size_t i = 0; i < work.size(); ++i)
            Gw.row(Eigen::Index(i)) = G.row(work[i]);
        Vector p = target;
        lambda.resize(Eigen::Index(work.size()));
        if (!work.empty()) {
            lambda = (Gw * Gw.transpose()).fullPivLu().solve(Gw * target);
            p = target - Gw.transpose() * lambda;
        }

        if (p.norm() <= 1e-13 * (1.0 + u.norm())) {
            if (work.empty() || lambda.minCoeff() >= 0.0)
                break;
            Eigen::Index drop = 0;
            lambda.minCoeff(&drop);
            work.erase(work.begin() + drop);
            continue;
        }

        double step = 1.0;
        int blocking = -1;
        for (int i = 0; i <= int(r); ++i) {
            if (std::find(work.begin(), work.end(), i) != work.end())
                continue;
            const double rate = G.row(i).dot(p);
            if (rate <= 1e-14)
                continue;
            const double t = std::max(0.0, g(i) - G.row(i).dot(u)) / rate;
            if (t < step) {
                step = t;
                blocking = i;
            }
        }
        u += step * p;
        if (blocking >= 0)
            work.push_back(blocking);
    }
    if (res.iterations > kMaxIterations)
        throw Error("qp_min_intervention: active-set iteration limit reached");

    // KKT certificate.
    Vector residual = u - u_desired;
    for (std::size_t i = 0; i < work.size(); ++i)
        residual += lambda(Eigen::Index(i)) * G.row(work[i]).transpose();
    const double violation = (G * u - g).maxCoeff();
    if (violation > kFeasibilityTol || residual.norm() > kStationarityTol ||
        (lambda.size() > 0 && lambda.minCoeff() < -kStationarityTol))
        throw Error("qp_min_intervention: KKT check failed");

    res.u = u;
    res.active = work;
    res.multipliers = lambda;
    return res;
}

} // namespace sbf
