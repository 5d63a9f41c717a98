#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace lrf {

using Scalar = double;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Immediate or cumulative reward across the m configured objectives.
/// Component 0 is the primary objective; all arithmetic requires matching m.
using RewardVector = Eigen::VectorXd;

/// Input that fails a documented precondition of a public operation.
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Caller broke an API contract (e.g. index out of range, wrong batch kind).
struct ContractViolation : std::logic_error {
    using std::logic_error::logic_error;
};

/// Operation declined to run (oracle size guard, missing exploration data).
struct RefusalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Pearson correlation is undefined: one side has (numerically) zero variance.
struct UndefinedCorrelation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace lrf
