#pragma once

// Shared helpers for the unit and acceptance suites: independent grid
// oracles for the monotone quadratic subproblem, small random-instance
// generators, and Monte Carlo bookkeeping.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "qvshrink/estimators.hpp"
#include "qvshrink/families.hpp"
#include "qvshrink/isotonic.hpp"
#include "qvshrink/rng.hpp"
#include "qvshrink/ure.hpp"

namespace testsupport {

using namespace qvshrink;

inline double quad_objective(const MonotoneProblem& problem, const VectorXd& b) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < b.size(); ++i) {
    total += problem.weights[i] * b[i] * b[i] - 2.0 * problem.linear[i] * b[i];
  }
  return total;
}

// Exact minimum of the quadratic over monotone grid tuples b in
// {0, 1/(G-1), ..., 1}: dynamic programming over blocks with prefix minima.
// Exhaustive over the grid, independent of the PAVA implementation.
inline double monotone_grid_minimum(const MonotoneProblem& problem,
                                    int grid_points) {
  const TauBlocks blocks = group_by_tau(problem.tau);
  const std::size_t nb = blocks.block_count();
  std::vector<double> bw(nb, 0.0), bs(nb, 0.0);
  for (std::size_t j = 0; j < nb; ++j) {
    for (Eigen::Index k = blocks.block_start[j]; k < blocks.block_start[j + 1]; ++k) {
      bw[j] += problem.weights[blocks.order[k]];
      bs[j] += problem.linear[blocks.order[k]];
    }
  }
  const double step = 1.0 / (grid_points - 1);
  std::vector<double> dp(grid_points, 0.0);
  for (std::size_t j = 0; j < nb; ++j) {
    std::vector<double> next(grid_points);
    double run_min = std::numeric_limits<double>::infinity();
    for (int g = 0; g < grid_points; ++g) {
      run_min = std::min(run_min, dp[g]);  // best tail ending at value <= v_g
      const double v = g * step;
      next[g] = bw[j] * v * v - 2.0 * bs[j] * v + run_min;
    }
    dp = std::move(next);
  }
  return *std::min_element(dp.begin(), dp.end());
}

// Naive enumeration over all monotone block-value tuples; exponential, used
// only to validate the DP above on tiny instances.
inline double monotone_grid_minimum_enum(const MonotoneProblem& problem,
                                         int grid_points) {
  const TauBlocks blocks = group_by_tau(problem.tau);
  const std::size_t nb = blocks.block_count();
  std::vector<double> bw(nb, 0.0), bs(nb, 0.0);
  for (std::size_t j = 0; j < nb; ++j) {
    for (Eigen::Index k = blocks.block_start[j]; k < blocks.block_start[j + 1]; ++k) {
      bw[j] += problem.weights[blocks.order[k]];
      bs[j] += problem.linear[blocks.order[k]];
    }
  }
  const double step = 1.0 / (grid_points - 1);
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> g(nb, 0);
  const auto value = [&] {
    double total = 0.0;
    for (std::size_t j = 0; j < nb; ++j) {
      const double v = g[j] * step;
      total += bw[j] * v * v - 2.0 * bs[j] * v;
    }
    return total;
  };
  while (true) {
    best = std::min(best, value());
    bool advanced = false;
    std::size_t j = nb;
    while (j-- > 0) {
      if (g[j] < grid_points - 1) {
        ++g[j];
        for (std::size_t l = j + 1; l < nb; ++l) g[l] = g[j];  // keep monotone
        advanced = true;
        break;
      }
    }
    if (!advanced) break;
  }
  return best;
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

inline MeanSe mean_se(const std::vector<double>& xs) {
  MeanSe out;
  for (double x : xs) out.mean += x;
  out.mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - out.mean) * (x - out.mean);
  if (xs.size() > 1) {
    out.se = std::sqrt(ss / (static_cast<double>(xs.size()) - 1.0) /
                       static_cast<double>(xs.size()));
  }
  return out;
}

// Families with a working sampler, for the per-family property sweeps.
inline std::vector<Family> sampleable_families() {
  return {Family::binomial(),  Family::poisson(),      Family::neg_binomial(),
          Family::gamma(2.5),  Family::normal(),       Family::laplace(),
          Family::logistic(),  Family::student_t(7.0), Family::uniform_ls(1.3)};
}

inline ParamPoint random_point(const Family& family, Philox& rng) {
  ParamPoint pt;
  switch (family.tag()) {
    case FamilyTag::kBinomial:
      pt.tau = 2.0 + std::floor(uniform01(rng) * 11.0);
      pt.theta = 0.02 + 0.96 * uniform01(rng);
      break;
    case FamilyTag::kNegBinomial:
      pt.tau = 1.0 + std::floor(uniform01(rng) * 10.0);
      pt.theta = 0.05 + 3.0 * uniform01(rng);
      break;
    case FamilyTag::kPoisson:
      pt.tau = 0.5 + 7.5 * uniform01(rng);
      pt.theta = 0.05 + 4.0 * uniform01(rng);
      break;
    case FamilyTag::kGamma:
      pt.tau = 0.5 + 7.5 * uniform01(rng);
      pt.theta = 0.2 + 4.8 * uniform01(rng);
      break;
    default: {
      pt.tau = 0.3 + 5.7 * uniform01(rng);
      std::normal_distribution<double> n(0.0, 2.0);
      pt.theta = n(rng);
      break;
    }
  }
  return pt;
}

struct DrawnDataset {
  Dataset data;
  VectorXd theta;
};

inline DrawnDataset random_dataset(const Family& family, int p, Philox& rng) {
  VectorXd y(p), tau(p), theta(p);
  for (int i = 0; i < p; ++i) {
    const ParamPoint pt = random_point(family, rng);
    theta[i] = pt.theta;
    tau[i] = pt.tau;
    y[i] = sample(family, pt, rng);
  }
  return {Dataset(y, tau, family), theta};
}

// Random feasible rules for the concentration/unbiasedness sweeps.
inline SemiRule random_semi_rule(const Dataset& data, Philox& rng) {
  const TauBlocks blocks = group_by_tau(data.tau);
  const std::size_t nb = blocks.block_count();
  std::vector<double> vals(nb);
  for (auto& v : vals) v = uniform01(rng);
  std::sort(vals.begin(), vals.end());  // nondecreasing along tau-descending
  SemiRule rule;
  rule.b.resize(data.size());
  for (std::size_t j = 0; j < nb; ++j) {
    for (Eigen::Index k = blocks.block_start[j]; k < blocks.block_start[j + 1]; ++k) {
      rule.b[blocks.order[k]] = vals[j];
    }
  }
  const double m = data.y.cwiseAbs().maxCoeff();
  const double lo = std::max(-m, data.family.theta_lower());
  const double hi = std::min(m, data.family.theta_upper());
  rule.mu = lo + (hi - lo) * uniform01(rng);
  return rule;
}

inline double loss_of(const VectorXd& estimates, const VectorXd& theta) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < estimates.size(); ++i) {
    const double d = estimates[i] - theta[i];
    total += d * d;
  }
  return total / static_cast<double>(estimates.size());
}

}  // namespace testsupport
