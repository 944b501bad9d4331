#include "sbf/oracles.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace sbf::oracle {
namespace {

double det(const Matrix& M)
{
    switch (M.rows()) {
    case 1: return M(0, 0);
    case 2: return M(0, 0) * M(1, 1) - M(0, 1) * M(1, 0);
    case 3:
        return M(0, 0) * (M(1, 1) * M(2, 2) - M(1, 2) * M(2, 1)) - M(0, 1) * (M(1, 0) * M(2, 2) - M(1, 2) * M(2, 0)) +
               M(0, 2) * (M(1, 0) * M(2, 1) - M(1, 1) * M(2, 0));
    default: throw Error("cramer_solve: only sizes 1 to 3 are supported");
    }
}

// Calls fn(indices) for every k-subset of {0..n-1}.
template <typename Fn>
void subsets(int n, int k, Fn&& fn)
{
    std::vector<int> idx(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i)
        idx[std::size_t(i)] = i;
    while (true) {
        fn(idx);
        int i = k - 1;
        while (i >= 0 && idx[std::size_t(i)] == n - k + i)
            --i;
        if (i < 0)
            return;
        ++idx[std::size_t(i)];
        for (int j = i + 1; j < k; ++j)
            idx[std::size_t(j)] = idx[std::size_t(j - 1)] + 1;
    }
}

bool feasible(const Matrix& G, const Vector& g, const Vector& u, double tol)
{
    return ((G * u - g).array() <= tol).all();
}

void stack(const Matrix& A, const Vector& b, const RowVector& normal, double offset, Matrix& G, Vector& g)
{
    G.resize(A.rows() + 1, A.cols());
    g.resize(A.rows() + 1);
    G.topRows(A.rows()) = A;
    g.head(A.rows()) = b;
    G.row(A.rows()) = -normal;
    g(A.rows()) = offset;
}

} // namespace

RowVector fd_gradient(const std::function<double(const Vector&)>& f, const Vector& x, double delta)
{
    RowVector g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        Vector xp = x, xm = x;
        xp(i) += delta;
        xm(i) -= delta;
        g(i) = (f(xp) - f(xm)) / (2 * delta);
    }
    return g;
}

Matrix fd_jacobian(const std::function<Vector(const Vector&)>& f, const Vector& x, double delta)
{
    Matrix J;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        Vector xp = x, xm = x;
        xp(i) += delta;
        xm(i) -= delta;
        const Vector col = (f(xp) - f(xm)) / (2 * delta);
        if (i == 0)
            J.resize(col.size(), x.size());
        J.col(i) = col;
    }
    return J;
}

double relative_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double floor)
{
    return (a - b).norm() / std::max(b.norm(), floor);
}

std::optional<Vector> cramer_solve(const Matrix& M, const Vector& v)
{
    const Eigen::Index k = M.rows();
    const double d = det(M);
    double scale = 1;
    for (Eigen::Index i = 0; i < k; ++i)
        scale *= M.row(i).norm();
    if (!(std::abs(d) > 1e-12 * scale))
        return std::nullopt;
    Vector out(k);
    for (Eigen::Index i = 0; i < k; ++i) {
        Matrix Mi = M;
        Mi.col(i) = v;
        out(i) = det(Mi) / d;
    }
    return out;
}

LpOracle lp_max(const RowVector& c, const Matrix& A, const Vector& b)
{
    const int m = int(A.cols());
    LpOracle best;
    best.value = -std::numeric_limits<double>::infinity();
    subsets(int(A.rows()), m, [&](const std::vector<int>& rows) {
        Matrix M(m, m);
        Vector v(m);
        for (int i = 0; i < m; ++i) {
            M.row(i) = A.row(rows[std::size_t(i)]);
            v(i) = b(rows[std::size_t(i)]);
        }
        const std::optional<Vector> u = cramer_solve(M, v);
        if (!u || !feasible(A, b, *u, 1e-9))
            return;
        ++best.vertex_count;
        const double val = (c * *u).value();
        if (val > best.value) {
            best.value = val;
            best.argmax = *u;
        }
    });
    if (best.vertex_count == 0)
        throw Error("oracle::lp_max: no feasible vertex");
    return best;
}

std::optional<Vector> qp_min_distance(const Vector& u_d, const Matrix& A, const Vector& b, const RowVector& normal,
                                      double offset)
{
    Matrix G;
    Vector g;
    stack(A, b, normal, offset, G, g);
    const int m = int(A.cols());
    std::optional<Vector> best;
    double best_dist = std::numeric_limits<double>::infinity();
    auto consider = [&](const Vector& u) {
        if (!feasible(G, g, u, 1e-9))
            return;
        const double d = (u - u_d).norm();
        if (d < best_dist) {
            best_dist = d;
            best = u;
        }
    };
    consider(u_d);
    for (int k = 1; k <= m; ++k) {
        subsets(int(G.rows()), k, [&](const std::vector<int>& rows) {
            Matrix Gs(k, m);
            Vector gs(k);
            for (int i = 0; i < k; ++i) {
                Gs.row(i) = G.row(rows[std::size_t(i)]);
                gs(i) = g(rows[std::size_t(i)]);
            }
            const std::optional<Vector> y = cramer_solve(Gs * Gs.transpose(), Gs * u_d - gs);
            if (y)
                consider(u_d - Gs.transpose() * *y);
        });
    }
    return best;
}

std::optional<Vector> qp_grid_search(const Vector& u_d, const Matrix& A, const Vector& b, const RowVector& normal,
                                     double offset, const Vector& lower, const Vector& upper, int per_axis)
{
    Matrix G;
    Vector g;
    stack(A, b, normal, offset, G, g);
    const Eigen::Index m = A.cols();
    Vector lo = lower, hi = upper;
    std::optional<Vector> best;
    double best_dist = std::numeric_limits<double>::infinity();
    for (int pass = 0; pass < 3; ++pass) {
        const Vector cell = (hi - lo) / double(per_axis - 1);
        std::vector<int> idx(static_cast<std::size_t>(m), 0);
        Vector u(m);
        while (true) {
            for (Eigen::Index i = 0; i < m; ++i)
                u(i) = lo(i) + cell(i) * idx[std::size_t(i)];
            if (feasible(G, g, u, 0.0)) {
                const double d = (u - u_d).norm();
                if (d < best_dist) {
                    best_dist = d;
                    best = u;
                }
            }
            Eigen::Index i = 0;
            while (i < m && ++idx[std::size_t(i)] == per_axis)
                idx[std::size_t(i++)] = 0;
            if (i == m)
                break;
        }
        if (!best)
            return best;
        lo = best->array() - 4 * cell.array();
        hi = best->array() + 4 * cell.array();
    }
    return best;
}

} // namespace sbf::oracle
