#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sfksd {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Samples are stored n x d, column-major, so each coordinate is contiguous.
using SampleMatrix = Eigen::MatrixXd;

/// Raised for invalid parameters at construction time.
class ConstructionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a point is on or outside the boundary of the domain it is
/// evaluated on.
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string &what, std::ptrdiff_t row = -1)
        : std::domain_error(row >= 0 ? what + " (row " + std::to_string(row) + ")" : what),
          row_(row) {}

    std::ptrdiff_t row() const noexcept { return row_; }

private:
    std::ptrdiff_t row_;
};

/// Raised on numerical failure (overflow, quadrature non-convergence,
/// sampler exhaustion).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace sfksd
