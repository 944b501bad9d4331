#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace sbf {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using RowVector = Eigen::RowVectorXd;

// Base for every error this library raises.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

} // namespace sbf
