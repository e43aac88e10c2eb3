#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace mfsteer {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Points = std::vector<Vec2>;

/// Invalid input or configuration. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Explicit scheme left its stability region. Maps to CLI exit code 3.
class InstabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite values or other numerical breakdown.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mfsteer
