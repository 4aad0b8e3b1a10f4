#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace ddc {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// s0*I - A is singular (or numerically so) for the requested shift.
struct SingularShiftError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Data matrices failed the invertibility check and retries were exhausted.
struct ConditioningError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed persisted file; the message carries file and field context.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Reciprocal condition number sigma_min/sigma_max of a (possibly
/// rectangular) matrix. Zero for an all-zero matrix.
double reciprocal_condition(const Mat& m);

}  // namespace ddc
