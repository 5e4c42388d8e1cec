#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "qvshrink/families.hpp"

namespace qvshrink {

/// Semiparametric shrinkage rule: theta_hat_i = (1 - b_i) y_i + b_i mu.
/// When produced by a fitter, b satisfies the monotone requirement and mu
/// lies in [-max|y|, max|y|] intersected with the mean domain; raw
/// evaluation accepts any values.
struct SemiRule {
  VectorXd b;
  double mu = 0.0;
};

/// Parametric rule: b_i = gamma / (tau_i + gamma), which is automatically
/// monotone. gamma may be +infinity (full shrinkage to mu).
struct ParamRule {
  double gamma = 0.0;
  double mu = 0.0;

  double shrink(double tau) const {
    return std::isinf(gamma) ? 1.0 : gamma / (tau + gamma);
  }

  VectorXd induced_b(const VectorXd& tau) const {
    VectorXd b(tau.size());
    for (Eigen::Index i = 0; i < tau.size(); ++i) b[i] = shrink(tau[i]);
    return b;
  }
};

/// (1/p) sum_i [ b_i^2 (y_i - mu)^2 + (1 - 2 b_i) V(y_i)/(tau_i + nu2) ].
double ure_semi(const Dataset& data, const SemiRule& rule);

/// Grand-mean variant with mu = ybar computed internally:
/// (1/p) sum_i [ b_i^2 (y_i - ybar)^2 + (1 - 2(1 - 1/p) b_i) V(y_i)/(tau_i + nu2) ].
double ure_grand(const Dataset& data, const VectorXd& b);

/// (1/p) sum_i [ gamma^2/(tau_i+gamma)^2 (y_i - mu)^2
///               + (tau_i - gamma)/(tau_i + gamma) V(y_i)/(tau_i + nu2) ],
/// with gamma = +inf evaluated as the full-shrinkage limit.
double ure_param(const Dataset& data, const ParamRule& rule);

/// Parametric grand-mean variant (mu = ybar internally).
double ure_param_grand(const Dataset& data, double gamma);

/// theta_hat_i = (1 - b_i) y_i + b_i mu, the expression every fit reports.
VectorXd apply_semi(const Dataset& data, const SemiRule& rule);
VectorXd apply_param(const Dataset& data, const ParamRule& rule);

}  // namespace qvshrink
