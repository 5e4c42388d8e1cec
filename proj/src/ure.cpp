#include "qvshrink/ure.hpp"

#include <stdexcept>

#include "qvshrink/compensated.hpp"

namespace qvshrink {

namespace {

void require_same_size(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b) throw std::invalid_argument(std::string(what) + ": length mismatch");
}

}  // namespace

double ure_semi(const Dataset& data, const SemiRule& rule) {
  require_same_size(rule.b.size(), data.size(), "ure_semi");
  const Eigen::Index p = data.size();
  CompensatedSum acc;
  for (Eigen::Index i = 0; i < p; ++i) {
    const double term = unbiased_variance_term(data.family, data.y[i], data.tau[i]);
    const double dev = data.y[i] - rule.mu;
    acc.add(rule.b[i] * rule.b[i] * dev * dev + (1.0 - 2.0 * rule.b[i]) * term);
  }
  return acc.value() / static_cast<double>(p);
}

double ure_grand(const Dataset& data, const VectorXd& b) {
  require_same_size(b.size(), data.size(), "ure_grand");
  const Eigen::Index p = data.size();
  const double ybar = compensated_mean(data.y);
  const double scale = 1.0 - 1.0 / static_cast<double>(p);
  CompensatedSum acc;
  for (Eigen::Index i = 0; i < p; ++i) {
    const double term = unbiased_variance_term(data.family, data.y[i], data.tau[i]);
    const double dev = data.y[i] - ybar;
    acc.add(b[i] * b[i] * dev * dev + (1.0 - 2.0 * scale * b[i]) * term);
  }
  return acc.value() / static_cast<double>(p);
}

double ure_param(const Dataset& data, const ParamRule& rule) {
  if (!(rule.gamma >= 0)) throw std::invalid_argument("ure_param: gamma must be >= 0");
  const Eigen::Index p = data.size();
  const bool full = std::isinf(rule.gamma);
  CompensatedSum acc;
  for (Eigen::Index i = 0; i < p; ++i) {
    const double term = unbiased_variance_term(data.family, data.y[i], data.tau[i]);
    const double dev = data.y[i] - rule.mu;
    if (full) {
      acc.add(dev * dev - term);
    } else {
      const double frac = rule.gamma / (data.tau[i] + rule.gamma);
      const double ratio = (data.tau[i] - rule.gamma) / (data.tau[i] + rule.gamma);
      acc.add(frac * frac * dev * dev + ratio * term);
    }
  }
  return acc.value() / static_cast<double>(p);
}

double ure_param_grand(const Dataset& data, double gamma) {
  if (!(gamma >= 0)) {
    throw std::invalid_argument("ure_param_grand: gamma must be >= 0");
  }
  const Eigen::Index p = data.size();
  const double ybar = compensated_mean(data.y);
  const double scale = 1.0 - 1.0 / static_cast<double>(p);
  const bool full = std::isinf(gamma);
  CompensatedSum acc;
  for (Eigen::Index i = 0; i < p; ++i) {
    const double term = unbiased_variance_term(data.family, data.y[i], data.tau[i]);
    const double dev = data.y[i] - ybar;
    const double frac = full ? 1.0 : gamma / (data.tau[i] + gamma);
    acc.add(frac * frac * dev * dev + (1.0 - 2.0 * scale * frac) * term);
  }
  return acc.value() / static_cast<double>(p);
}

VectorXd apply_semi(const Dataset& data, const SemiRule& rule) {
  require_same_size(rule.b.size(), data.size(), "apply_semi");
  VectorXd out(data.size());
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    out[i] = (1.0 - rule.b[i]) * data.y[i] + rule.b[i] * rule.mu;
  }
  return out;
}

VectorXd apply_param(const Dataset& data, const ParamRule& rule) {
  VectorXd out(data.size());
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    const double b = rule.shrink(data.tau[i]);
    out[i] = (1.0 - b) * data.y[i] + b * rule.mu;
  }
  return out;
}

}  // namespace qvshrink
