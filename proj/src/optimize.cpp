#include "qvshrink/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qvshrink {

namespace {

double guarded(double v) {
  return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

}  // namespace

ScalarMinimum golden_section(const std::function<double(double)>& f, double lo,
                             double hi, double rel_tol, int max_iter) {
  constexpr double kInvPhi = 0.6180339887498949;  // (sqrt(5)-1)/2
  ScalarMinimum best;
  best.x = lo;
  best.value = guarded(f(lo));
  best.evaluations = 1;
  const auto consider = [&](double x, double v) {
    if (v < best.value) {
      best.x = x;
      best.value = v;
    }
  };
  {
    const double vhi = guarded(f(hi));
    ++best.evaluations;
    consider(hi, vhi);
  }
  if (!(hi > lo)) return best;

  double a = lo, b = hi;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = guarded(f(x1));
  double f2 = guarded(f(x2));
  best.evaluations += 2;
  consider(x1, f1);
  consider(x2, f2);
  for (int it = 0; it < max_iter; ++it) {
    if ((b - a) <= rel_tol * (std::abs(a) + std::abs(b) + 1e-300)) break;
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = guarded(f(x1));
      consider(x1, f1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = guarded(f(x2));
      consider(x2, f2);
    }
    ++best.evaluations;
  }
  return best;
}

SimplexResult nelder_mead2(
    const std::function<double(const std::array<double, 2>&)>& f,
    std::array<double, 2> start, double diam_tol, int max_iter,
    double initial_step) {
  using Point = std::array<double, 2>;
  struct Vertex {
    Point x;
    double v;
  };
  const auto eval = [&](const Point& x) { return guarded(f(x)); };

  std::array<Vertex, 3> simplex;
  simplex[0] = {start, eval(start)};
  for (int d = 0; d < 2; ++d) {
    Point x = start;
    x[d] += initial_step;
    simplex[d + 1] = {x, eval(x)};
  }

  SimplexResult result;
  const auto by_value = [](const Vertex& a, const Vertex& b) { return a.v < b.v; };
  for (int it = 0; it < max_iter; ++it) {
    std::sort(simplex.begin(), simplex.end(), by_value);
    const double diam = std::max(
        {std::hypot(simplex[0].x[0] - simplex[1].x[0], simplex[0].x[1] - simplex[1].x[1]),
         std::hypot(simplex[0].x[0] - simplex[2].x[0], simplex[0].x[1] - simplex[2].x[1]),
         std::hypot(simplex[1].x[0] - simplex[2].x[0], simplex[1].x[1] - simplex[2].x[1])});
    result.iterations = it;
    if (diam < diam_tol) {
      result.converged = true;
      break;
    }

    const Point centroid{(simplex[0].x[0] + simplex[1].x[0]) / 2.0,
                         (simplex[0].x[1] + simplex[1].x[1]) / 2.0};
    const auto at = [&](double coef) {
      return Point{centroid[0] + coef * (simplex[2].x[0] - centroid[0]),
                   centroid[1] + coef * (simplex[2].x[1] - centroid[1])};
    };

    const Point xr = at(-1.0);  // reflection
    const double vr = eval(xr);
    if (vr < simplex[0].v) {
      const Point xe = at(-2.0);  // expansion
      const double ve = eval(xe);
      simplex[2] = ve < vr ? Vertex{xe, ve} : Vertex{xr, vr};
    } else if (vr < simplex[1].v) {
      simplex[2] = {xr, vr};
    } else {
      const Point xc = at(vr < simplex[2].v ? -0.5 : 0.5);  // contraction
      const double vc = eval(xc);
      if (vc < std::min(vr, simplex[2].v)) {
        simplex[2] = {xc, vc};
      } else {
        for (int k = 1; k < 3; ++k) {  // shrink toward the best vertex
          for (int d = 0; d < 2; ++d) {
            simplex[k].x[d] = simplex[0].x[d] + 0.5 * (simplex[k].x[d] - simplex[0].x[d]);
          }
          simplex[k].v = eval(simplex[k].x);
        }
      }
    }
  }
  std::sort(simplex.begin(), simplex.end(), by_value);
  result.x = simplex[0].x;
  result.value = simplex[0].v;
  return result;
}

}  // namespace qvshrink
