#pragma once

#include <array>
#include <functional>

namespace qvshrink {

struct ScalarMinimum {
  double x = 0.0;
  double value = 0.0;
  int evaluations = 0;
};

/// Golden-section minimization of f on [lo, hi], run until the bracket's
/// relative width falls below rel_tol. Returns the best point seen,
/// including the original endpoints.
ScalarMinimum golden_section(const std::function<double(double)>& f, double lo,
                             double hi, double rel_tol = 1e-6,
                             int max_iter = 200);

struct SimplexResult {
  std::array<double, 2> x{};
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Nelder-Mead in two dimensions. Stops when the simplex diameter drops
/// below diam_tol or after max_iter iterations. Objective values that are
/// not finite are treated as +infinity.
SimplexResult nelder_mead2(
    const std::function<double(const std::array<double, 2>&)>& f,
    std::array<double, 2> start, double diam_tol = 1e-8, int max_iter = 2000,
    double initial_step = 0.5);

}  // namespace qvshrink
