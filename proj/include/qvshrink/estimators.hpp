#pragma once

#include <optional>
#include <variant>

#include "qvshrink/families.hpp"
#include "qvshrink/ure.hpp"

namespace qvshrink {

struct FitDiagnostics {
  int grid_points = 0;        // size of the outer search grid, if any
  int refine_evaluations = 0; // objective evaluations in the refinement stage
  int nm_iterations = 0;      // total Nelder-Mead iterations across starts
  int nm_starts = 0;
};

/// Output of every fitter: the per-index estimates, the rule that produced
/// them (absent for rules with no shrinkage structure, e.g. naive), and the
/// minimized objective where the fitter minimizes one (URE for the URE
/// fitters, exact risk for the oracle).
struct FitResult {
  VectorXd estimates;
  std::variant<std::monostate, SemiRule, ParamRule> rule;
  std::optional<double> objective;
  FitDiagnostics diagnostics;

  const SemiRule* semi_rule() const { return std::get_if<SemiRule>(&rule); }
  const ParamRule* param_rule() const { return std::get_if<ParamRule>(&rule); }
};

/// Semiparametric URE estimator: joint minimization over monotone b in
/// [0,1]^p and mu in [-max|y|, max|y|] within the mean domain. For each mu
/// on the grid the optimal b is an isotonic regression; the profiled
/// objective is then refined by golden section around the best grid cell.
FitResult fit_semi(const Dataset& data, int mu_grid_size = 201);

/// Semiparametric URE estimator shrinking toward the grand mean: a single
/// isotonic solve, no mu search.
FitResult fit_semi_grand(const Dataset& data);

/// Parametric URE estimator over gamma in [0, inf] and constrained mu; mu
/// is profiled in closed form for each gamma and the gamma axis is searched
/// on the substitution t = gamma/(1+gamma).
FitResult fit_param(const Dataset& data);

/// Parametric URE estimator with mu fixed at the grand mean.
FitResult fit_param_grand(const Dataset& data);

/// Conjugate-prior empirical Bayes by method of moments (binomial and
/// Poisson families only). A nonpositive moment denominator yields
/// gamma = infinity, i.e. full shrinkage to the grand mean.
FitResult fit_eb_mm(const Dataset& data);

/// Conjugate-prior empirical Bayes by marginal maximum likelihood (binomial
/// and Poisson families only), maximized by Nelder-Mead in (log gamma,
/// logit/log mu) from four deterministic starts.
FitResult fit_eb_ml(const Dataset& data);

/// Extended positive-part James-Stein estimator with A_i = 1/tau_i.
/// The default shrinks y toward the precision-weighted mean; literal_form
/// reproduces the non-equivariant textbook transcription that scales y
/// itself rather than the deviation.
FitResult fit_james_stein(const Dataset& data, bool literal_form = false);

FitResult fit_naive(const Dataset& data);
FitResult fit_grand_mean(const Dataset& data);

/// Risk-minimizing parametric rule computed from the true means; usable
/// only inside simulations.
FitResult fit_oracle(const Dataset& data, const VectorXd& truth);

/// Exact finite-p risk of a parametric rule under squared error loss:
/// (1/p) sum_i [ (tau_i/(tau_i+gamma))^2 V(theta_i)/tau_i
///               + (gamma/(tau_i+gamma))^2 (mu - theta_i)^2 ].
double oracle_risk(const Dataset& data, const VectorXd& truth,
                   const ParamRule& rule);

}  // namespace qvshrink
