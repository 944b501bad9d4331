#pragma once

// Log-sum-exp soft minimum / soft maximum and their gradient weights.
//
//   softmin_rho(z) = -(1/rho) log sum_i exp(-rho z_i)
//   softmax_rho(z) =  (1/rho) log sum_i exp( rho z_i) - log(N)/rho
//
// Both are evaluated with the extremum factored out, so nothing overflows for
// any finite input. They satisfy
//
//   min z - log(N)/rho <= softmin(z) <  min z
//   max z - log(N)/rho <  softmax(z) <= max z
//
// and the results are rounded toward the interior of those bounds when the
// exact value falls within one ulp of an endpoint, so the inequalities hold
// in floating point as well.

#include <Eigen/Core>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>

namespace sbf {

namespace detail {

template <typename Derived>
void require_nonempty(const Eigen::DenseBase<Derived>& z, const char* what)
{
    if (z.size() == 0)
        throw std::invalid_argument(std::string(what) + ": empty argument list");
}

template <typename Scalar>
void require_sharpness(Scalar rho, const char* what)
{
    if (!(rho > Scalar(0)) || !std::isfinite(rho))
        throw std::invalid_argument(std::string(what) + ": rho must be positive and finite");
}

// sum_{i != k} exp(s (z_i - z_k)) where z_k is the extremum; s = -rho for the
// soft minimum, +rho for the soft maximum. Excluding the extremum term keeps
// tiny contributions that would vanish against 1.
template <typename Derived>
typename Derived::Scalar tail_sum(const Eigen::DenseBase<Derived>& z, Eigen::Index k,
                                  typename Derived::Scalar s)
{
    using Scalar = typename Derived::Scalar;
    Scalar acc(0);
    for (Eigen::Index i = 0; i < z.size(); ++i)
        if (i != k)
            acc += std::exp(s * (z.derived().coeff(i) - z.derived().coeff(k)));
    return acc;
}

} // namespace detail

template <typename Derived>
typename Derived::Scalar softmin(const Eigen::DenseBase<Derived>& z, typename Derived::Scalar rho)
{
    using Scalar = typename Derived::Scalar;
    detail::require_nonempty(z, "softmin");
    detail::require_sharpness(rho, "softmin");
    Eigen::Index k = 0;
    const Scalar lo = z.minCoeff(&k);
    if (z.size() == 1)
        return lo;
    const Scalar tail = detail::tail_sum(z, k, -rho);
    Scalar value = lo - std::log1p(tail) / rho;
    const Scalar floor = lo - std::log(Scalar(z.size())) / rho;
    if (value >= lo)
        value = std::nextafter(lo, -std::numeric_limits<Scalar>::infinity());
    if (value < floor)
        value = floor;
    return value;
}

template <typename Derived>
typename Derived::Scalar softmax(const Eigen::DenseBase<Derived>& z, typename Derived::Scalar rho)
{
    using Scalar = typename Derived::Scalar;
    detail::require_nonempty(z, "softmax");
    detail::require_sharpness(rho, "softmax");
    Eigen::Index k = 0;
    const Scalar hi = z.maxCoeff(&k);
    if (z.size() == 1)
        return hi;
    const Scalar tail = detail::tail_sum(z, k, rho);
    Scalar value = hi + (std::log1p(tail) - std::log(Scalar(z.size()))) / rho;
    const Scalar floor = hi - std::log(Scalar(z.size())) / rho;
    if (value > hi)
        value = hi;
    if (value <= floor)
        value = std::nextafter(floor, std::numeric_limits<Scalar>::infinity());
    return value;
}

/// d softmin / d z_i: w_i = exp(-rho z_i) / sum_j exp(-rho z_j).
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>
softmin_weights(const Eigen::DenseBase<Derived>& z, typename Derived::Scalar rho)
{
    detail::require_nonempty(z, "softmin_weights");
    detail::require_sharpness(rho, "softmin_weights");
    const auto lo = z.minCoeff();
    Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> w =
        (-rho * (z.derived().array() - lo)).exp().matrix();
    return w / w.sum();
}

/// d softmax / d z_i: w_i = exp(rho z_i) / sum_j exp(rho z_j).
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>
softmax_weights(const Eigen::DenseBase<Derived>& z, typename Derived::Scalar rho)
{
    detail::require_nonempty(z, "softmax_weights");
    detail::require_sharpness(rho, "softmax_weights");
    const auto hi = z.maxCoeff();
    Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> w =
        (rho * (z.derived().array() - hi)).exp().matrix();
    return w / w.sum();
}

inline double softmin(std::span<const double> z, double rho)
{
    return softmin(Eigen::Map<const Eigen::VectorXd>(z.data(), Eigen::Index(z.size())), rho);
}

inline double softmax(std::span<const double> z, double rho)
{
    return softmax(Eigen::Map<const Eigen::VectorXd>(z.data(), Eigen::Index(z.size())), rho);
}

} // namespace sbf
