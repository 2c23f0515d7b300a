#pragma once

#include <Eigen/Core>

#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

namespace riskplan {

using Vec2 = Eigen::Vector2d;

/// Integer grid coordinates. `x` is the column, `y` the row.
struct Cell {
  int x = 0;
  int y = 0;

  friend bool operator==(const Cell&, const Cell&) = default;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Error hierarchy. Callers that care about the category (the CLI maps them to
// exit codes) catch the derived types; everything else sees std::runtime_error.

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvariantError : public InputError {
 public:
  using InputError::InputError;
};

class NoPathError : public std::runtime_error {
 public:
  NoPathError() : std::runtime_error("no feasible path") {}
};

class SingularityError : public std::runtime_error {
 public:
  SingularityError() : std::runtime_error("singular evaluation at obstacle center") {}
};

class OptimizerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace riskplan

template <>
struct std::hash<riskplan::Cell> {
  size_t operator()(const riskplan::Cell& c) const noexcept {
    return std::hash<std::int64_t>{}((static_cast<std::int64_t>(c.x) << 32) ^
                                     static_cast<std::uint32_t>(c.y));
  }
};
