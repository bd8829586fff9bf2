#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>

namespace hausdorff {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Group elements are n x n rotation matrices on SO(n) and n x 1 columns on
// R^n and on the sphere S^{n-1}.
using Point = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kPi = 3.14159265358979323846;

/// Invalid input: wrong backend, out-of-domain argument, malformed configuration.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical routine failed to converge or produced a non-finite value.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Monte-Carlo (or quadrature) estimate with its standard error.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;

  double half_width(double z = 3.0) const { return z * std_error; }
  double lower(double z = 3.0) const { return value - half_width(z); }
  double upper(double z = 3.0) const { return value + half_width(z); }
};

/// Sample mean and the standard error of the mean.
Estimate mean_estimate(std::span<const double> values);

/// 1/q with the convention 1/inf = 0.
inline double reciprocal_exponent(double q) { return std::isinf(q) ? 0.0 : 1.0 / q; }

}  // namespace hausdorff
