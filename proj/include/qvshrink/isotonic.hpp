#pragma once

#include <Eigen/Dense>
#include <vector>

namespace qvshrink {

using Eigen::VectorXd;

/// Minimize sum_i (w_i b_i^2 - 2 s_i b_i) over b in [0,1]^p subject to the
/// monotone-shrinkage constraint: tau_i >= tau_j implies b_i <= b_j, with
/// equal tau forced to a common value.
///
/// Requires w_i >= 0 and, where w_i = 0, s_i >= 0 (always the case for the
/// risk objectives built on this, whose linear terms are variance estimates).
struct MonotoneProblem {
  VectorXd weights;  // w, quadratic coefficients
  VectorXd linear;   // s, linear coefficients
  VectorXd tau;      // ordering key: larger tau sorts first and shrinks less
};

/// tau-descending traversal order (stable, so equal tau keeps input order)
/// with offsets delimiting the equal-tau blocks. Reused across solves that
/// share tau, e.g. the per-mu subproblems of the semiparametric fit.
struct TauBlocks {
  std::vector<Eigen::Index> order;
  std::vector<Eigen::Index> block_start;  // size = block count + 1

  std::size_t block_count() const { return block_start.size() - 1; }
};

TauBlocks group_by_tau(const VectorXd& tau);

/// Exact solution by pool-adjacent-violators over the block sequence, then
/// clipping to [0,1] (exact for the box since pooled blocks move
/// independently under the projection).
VectorXd solve_monotone(const TauBlocks& blocks, const VectorXd& weights,
                        const VectorXd& linear);
VectorXd solve_monotone(const MonotoneProblem& problem);

}  // namespace qvshrink
