#include "sbf/model.hpp"

#include <Eigen/LU>
#include <numeric>

namespace sbf {
namespace {

// Calls fn(indices) for every k-subset of {0, ..., r-1} in lexicographic order.
template <typename Fn>
void for_each_subset(int r, int k, Fn&& fn)
{
    if (k > r)
        return;
    std::vector<int> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
        fn(idx);
        int i = k - 1;
        while (i >= 0 && idx[i] == r - k + i)
            --i;
        if (i < 0)
            return;
        ++idx[i];
        for (int j = i + 1; j < k; ++j)
            idx[j] = idx[j - 1] + 1;
    }
}

constexpr double kFeasTol = 1e-9;

} // namespace

ControlPolytope::ControlPolytope(Matrix A, Vector b) : A_(std::move(A)), b_(std::move(b))
{
    const int r = int(A_.rows());
    const int m = int(A_.cols());
    if (m < 1 || r != b_.size())
        throw Error("polytope: A must be r x m with m >= 1 and b of length r");
    if (!A_.allFinite() || !b_.allFinite())
        throw Error("polytope: non-finite entries");

    // A pointed recession cone {d : A d <= 0} has its extreme rays on
    // intersections of m-1 independent constraint planes.
    bool unbounded = false;
    for_each_subset(r, m - 1, [&](const std::vector<int>& rows) {
        if (unbounded)
            return;
        Matrix sub(rows.size(), m);
        for (std::size_t i = 0; i < rows.size(); ++i)
            sub.row(Eigen::Index(i)) = A_.row(rows[i]);
        Eigen::FullPivLU<Matrix> lu(sub.rows() > 0 ? sub : Matrix::Zero(1, m));
        const Matrix kernel = lu.kernel();
        if (kernel.cols() != 1)
            return;
        const Vector d = kernel.col(0).normalized();
        for (double sign : {1.0, -1.0}) {
            const Vector dir = sign * d;
            if ((A_ * dir).maxCoeff() <= 1e-12)
                unbounded = true;
        }
    });
    if (unbounded)
        throw Error("polytope: constraint set is unbounded");

    for_each_subset(r, m, [&](const std::vector<int>& rows) {
        Matrix sub(m, m);
        Vector rhs(m);
        for (int i = 0; i < m; ++i) {
            sub.row(i) = A_.row(rows[i]);
            rhs(i) = b_(rows[i]);
        }
        Eigen::FullPivLU<Matrix> lu(sub);
        if (!lu.isInvertible())
            return;
        const Vector v = lu.solve(rhs);
        if (!v.allFinite() || max_violation(v) > kFeasTol)
            return;
        for (const auto& w : vertices_)
            if ((w - v).lpNorm<Eigen::Infinity>() <= kFeasTol)
                return;
        vertices_.push_back(v);
    });
    if (vertices_.empty())
        throw Error("polytope: constraint set is empty (or has no vertices)");
}

ControlPolytope ControlPolytope::box(const Vector& lower, const Vector& upper)
{
    const Eigen::Index m = lower.size();
    if (upper.size() != m)
        throw Error("polytope: box bounds of different length");
    Matrix A = Matrix::Zero(2 * m, m);
    Vector b(2 * m);
    for (Eigen::Index i = 0; i < m; ++i) {
        A(2 * i, i) = 1;
        b(2 * i) = upper(i);
        A(2 * i + 1, i) = -1;
        b(2 * i + 1) = -lower(i);
    }
    return ControlPolytope(std::move(A), std::move(b));
}

double ControlPolytope::max_violation(const Vector& u) const
{
    return (A_ * u - b_).maxCoeff();
}

} // namespace sbf
