#include "qvshrink/isotonic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qvshrink {

TauBlocks group_by_tau(const VectorXd& tau) {
  const Eigen::Index p = tau.size();
  if (p == 0) throw std::invalid_argument("group_by_tau: empty tau");
  TauBlocks out;
  out.order.resize(p);
  std::iota(out.order.begin(), out.order.end(), 0);
  std::stable_sort(out.order.begin(), out.order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return tau[a] > tau[b]; });
  out.block_start.push_back(0);
  for (Eigen::Index k = 1; k < p; ++k) {
    if (tau[out.order[k]] != tau[out.order[k - 1]]) out.block_start.push_back(k);
  }
  out.block_start.push_back(p);
  return out;
}

namespace {

// One pool of adjacent blocks with summed quadratic/linear coefficients.
// Its value is the box-constrained minimizer of W b^2 - 2 S b: the clipped
// target S/W, or the cap/floor when the pooled objective is purely linear
// (zero-weight pools with s > 0 want 1, with s = 0 any value works).
struct Pool {
  double weight;
  double linear;
  std::size_t first_block;
  std::size_t last_block;

  double argmin() const {
    if (weight > 0) {
      return std::min(1.0, std::max(0.0, linear / weight));
    }
    return linear > 0 ? 1.0 : 0.0;
  }
};

}  // namespace

VectorXd solve_monotone(const TauBlocks& blocks, const VectorXd& weights,
                        const VectorXd& linear) {
  const Eigen::Index p = weights.size();
  if (linear.size() != p || static_cast<Eigen::Index>(blocks.order.size()) != p) {
    throw std::invalid_argument("solve_monotone: vector lengths differ");
  }
  for (Eigen::Index i = 0; i < p; ++i) {
    if (!(weights[i] >= 0) || !std::isfinite(weights[i])) {
      throw std::invalid_argument("solve_monotone: weights must be finite and >= 0");
    }
    if (weights[i] == 0 && linear[i] < 0) {
      throw std::invalid_argument("solve_monotone: zero-weight index needs s >= 0");
    }
  }

  const std::size_t nblocks = blocks.block_count();
  std::vector<double> block_w(nblocks, 0.0), block_s(nblocks, 0.0);
  for (std::size_t j = 0; j < nblocks; ++j) {
    for (Eigen::Index k = blocks.block_start[j]; k < blocks.block_start[j + 1]; ++k) {
      const Eigen::Index i = blocks.order[k];
      block_w[j] += weights[i];
      block_s[j] += linear[i];
    }
  }

  // Generalized pool-adjacent-violators: merge while the box-constrained
  // pool minimizers violate the nondecreasing requirement. Keeping the raw
  // (W, S) sums through merges lets zero-weight linear terms shift the
  // minimizer of whatever pool absorbs them, which the exact optimum needs.
  std::vector<Pool> pools;
  for (std::size_t j = 0; j < nblocks; ++j) {
    Pool cur{block_w[j], block_s[j], j, j};
    while (!pools.empty() && pools.back().argmin() > cur.argmin()) {
      cur.weight += pools.back().weight;
      cur.linear += pools.back().linear;
      cur.first_block = pools.back().first_block;
      pools.pop_back();
    }
    pools.push_back(cur);
  }

  VectorXd b(p);
  for (const Pool& pool : pools) {
    const double v = pool.argmin();
    for (std::size_t j = pool.first_block; j <= pool.last_block; ++j) {
      for (Eigen::Index k = blocks.block_start[j]; k < blocks.block_start[j + 1];
           ++k) {
        b[blocks.order[k]] = v;
      }
    }
  }
  return b;
}

VectorXd solve_monotone(const MonotoneProblem& problem) {
  if (problem.weights.size() != problem.tau.size()) {
    throw std::invalid_argument("solve_monotone: vector lengths differ");
  }
  return solve_monotone(group_by_tau(problem.tau), problem.weights, problem.linear);
}

}  // namespace qvshrink
