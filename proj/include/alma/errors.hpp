#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace alma {

/// Mismatched array dimensions between operands.
class shape_error : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative solver exhausted its iteration budget without meeting its
/// tolerance. Carries the last relative residual for diagnostics.
class iteration_limit_error : public std::runtime_error {
public:
  iteration_limit_error(const std::string& what, double residual, int iterations)
      : std::runtime_error(what + " (residual " + std::to_string(residual) + " after " +
                           std::to_string(iterations) + " iterations)"),
        residual_(residual),
        iterations_(iterations) {}

  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

private:
  double residual_;
  int iterations_;
};

/// The constraint bound is inconsistent with the data: the sketched boundary
/// never crosses u = 0, so no tangent can be read there.
class constraint_infeasible_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// The sketched boundary has unexpected geometry (e.g. a nonnegative slope
/// at u = 0, which would produce a nonpositive tuning parameter).
class geometry_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// All candidate points coincide; no hull can be formed.
class degenerate_hull_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// The log-log residual/regularizer curve has no corner. Carries the curve
/// (lambda, log residual, log TV) for inspection.
class no_corner_error : public std::runtime_error {
public:
  no_corner_error(const std::string& what, std::vector<std::array<double, 3>> curve)
      : std::runtime_error(what), curve_(std::move(curve)) {}

  const std::vector<std::array<double, 3>>& curve() const noexcept { return curve_; }

private:
  std::vector<std::array<double, 3>> curve_;
};

/// Invalid configuration value (empty masks, bad grids, malformed files).
class config_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace alma
