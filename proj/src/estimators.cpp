#include "qvshrink/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "qvshrink/compensated.hpp"
#include "qvshrink/isotonic.hpp"
#include "qvshrink/optimize.hpp"
#include "qvshrink/special.hpp"

namespace qvshrink {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct MuBounds {
  double lo;
  double hi;
};

// [-max|y|, max|y|] intersected with the (closed) mean domain.
MuBounds mu_bounds(const Dataset& data) {
  const double m = data.y.cwiseAbs().maxCoeff();
  return {std::max(-m, data.family.theta_lower()),
          std::min(m, data.family.theta_upper())};
}

double clamp(double x, double lo, double hi) {
  return std::min(hi, std::max(lo, x));
}

// Scan gamma on the grid t = k/(n-1), gamma = t/(1-t) (t = 1 meaning
// infinity), then refine by golden section inside the best cell's two
// neighboring cells. Equal objectives resolve toward larger gamma.
struct GammaScan {
  double gamma;
  double value;
  int evaluations;
};

GammaScan scan_gamma(const std::function<double(double)>& objective,
                     int grid_points = 1001) {
  const auto to_gamma = [](double t) {
    return t >= 1.0 ? kInf : t / (1.0 - t);
  };
  int best_k = 0;
  double best_val = kInf;
  for (int k = 0; k < grid_points; ++k) {
    const double t = static_cast<double>(k) / (grid_points - 1);
    const double val = objective(to_gamma(t));
    if (val <= best_val) {  // ties keep the larger gamma
      best_val = val;
      best_k = k;
    }
  }
  const double step = 1.0 / (grid_points - 1);
  const double t_lo = std::max(0.0, (best_k - 1) * step);
  const double t_hi = std::min(1.0, (best_k + 1) * step);
  const auto refined = golden_section(
      [&](double t) { return objective(to_gamma(t)); }, t_lo, t_hi, 1e-6);
  GammaScan out{to_gamma(static_cast<double>(best_k) * step), best_val,
                grid_points + refined.evaluations};
  if (refined.value < best_val) {
    out.gamma = to_gamma(refined.x);
    out.value = refined.value;
  }
  return out;
}

}  // namespace

FitResult fit_semi(const Dataset& data, int mu_grid_size) {
  if (mu_grid_size < 2) throw std::invalid_argument("fit_semi: grid needs >= 2 points");
  const VectorXd vterm = data.variance_terms();
  const auto [lo, hi] = mu_bounds(data);
  const TauBlocks blocks = group_by_tau(data.tau);

  const auto profile = [&](double mu) {
    const VectorXd w = (data.y.array() - mu).square().matrix();
    SemiRule rule{solve_monotone(blocks, w, vterm), mu};
    return std::make_pair(ure_semi(data, rule), std::move(rule));
  };

  FitResult result;
  if (lo >= hi) {
    auto [val, rule] = profile(lo);
    result.rule = rule;
    result.objective = val;
    result.estimates = apply_semi(data, rule);
    result.diagnostics.grid_points = 1;
    return result;
  }

  const double step = (hi - lo) / (mu_grid_size - 1);
  int best_k = 0;
  double best_val = kInf;
  for (int k = 0; k < mu_grid_size; ++k) {
    const double mu = lo + step * k;
    const double val = profile(mu).first;
    if (val < best_val) {
      best_val = val;
      best_k = k;
    }
  }
  const double bracket_lo = lo + step * std::max(0, best_k - 1);
  const double bracket_hi = lo + step * std::min(mu_grid_size - 1, best_k + 1);
  const auto refined = golden_section(
      [&](double mu) { return profile(mu).first; }, bracket_lo, bracket_hi, 1e-6);
  const double mu_hat =
      refined.value < best_val ? refined.x : lo + step * best_k;

  auto [val, rule] = profile(mu_hat);
  result.rule = rule;
  result.objective = val;
  result.estimates = apply_semi(data, rule);
  result.diagnostics.grid_points = mu_grid_size;
  result.diagnostics.refine_evaluations = refined.evaluations;
  return result;
}

FitResult fit_semi_grand(const Dataset& data) {
  const Eigen::Index p = data.size();
  const double ybar = compensated_mean(data.y);
  const double scale = 1.0 - 1.0 / static_cast<double>(p);

  MonotoneProblem problem;
  problem.weights = (data.y.array() - ybar).square().matrix();
  problem.linear = scale * data.variance_terms();
  problem.tau = data.tau;

  SemiRule rule{solve_monotone(problem), ybar};
  FitResult result;
  result.objective = ure_grand(data, rule.b);
  result.estimates = apply_semi(data, rule);
  result.rule = std::move(rule);
  return result;
}

FitResult fit_param(const Dataset& data) {
  const auto [lo, hi] = mu_bounds(data);
  const double ybar = compensated_mean(data.y);

  // For fixed gamma the objective is quadratic in mu; the constrained
  // minimizer is the clipped weighted mean with weights b_i^2.
  const auto profile_mu = [&](double gamma) {
    if (gamma == 0.0) return clamp(ybar, lo, hi);
    double num = 0.0, den = 0.0;
    for (Eigen::Index i = 0; i < data.size(); ++i) {
      const double b = std::isinf(gamma) ? 1.0 : gamma / (data.tau[i] + gamma);
      num += b * b * data.y[i];
      den += b * b;
    }
    return clamp(num / den, lo, hi);
  };
  const auto objective = [&](double gamma) {
    return ure_param(data, ParamRule{gamma, profile_mu(gamma)});
  };

  const GammaScan scan = scan_gamma(objective);
  ParamRule rule{scan.gamma, profile_mu(scan.gamma)};
  FitResult result;
  result.objective = ure_param(data, rule);
  result.estimates = apply_param(data, rule);
  result.rule = rule;
  result.diagnostics.grid_points = 1001;
  result.diagnostics.refine_evaluations = scan.evaluations;
  return result;
}

FitResult fit_param_grand(const Dataset& data) {
  const double ybar = compensated_mean(data.y);
  const GammaScan scan =
      scan_gamma([&](double gamma) { return ure_param_grand(data, gamma); });
  ParamRule rule{scan.gamma, ybar};
  FitResult result;
  result.objective = ure_param_grand(data, rule.gamma);
  result.estimates = apply_param(data, rule);
  result.rule = rule;
  result.diagnostics.grid_points = 1001;
  result.diagnostics.refine_evaluations = scan.evaluations;
  return result;
}

FitResult fit_eb_mm(const Dataset& data) {
  const Eigen::Index p = data.size();
  const double ybar = compensated_mean(data.y);
  double gamma = 0.0;

  switch (data.family.tag()) {
    case FamilyTag::kBinomial: {
      CompensatedSum num_sum, den_sum;
      for (Eigen::Index i = 0; i < p; ++i) {
        num_sum.add(1.0 - 1.0 / data.tau[i]);
        den_sum.add(data.y[i] * data.y[i] - ybar / data.tau[i] -
                    ybar * ybar * (1.0 - 1.0 / data.tau[i]));
      }
      const double num = ybar * (1.0 - ybar) * num_sum.value();
      const double den = den_sum.value();
      gamma = den > 0 ? std::max(num / den, 0.0) : kInf;
      break;
    }
    case FamilyTag::kPoisson: {
      CompensatedSum den_sum;
      for (Eigen::Index i = 0; i < p; ++i) {
        den_sum.add(data.y[i] * data.y[i] - ybar / data.tau[i] - ybar * ybar);
      }
      const double den = den_sum.value();
      const double num = static_cast<double>(p) * ybar;
      // num = den = 0 (all-zero counts) shares the den -> 0+ limit.
      gamma = den > 0 ? std::max(num / den, 0.0) : kInf;
      break;
    }
    default:
      throw unsupported_family_error("fit_eb_mm: requires binomial or poisson, got " +
                                     data.family.name());
  }

  ParamRule rule{gamma, ybar};
  FitResult result;
  result.estimates = apply_param(data, rule);
  result.rule = rule;
  return result;
}

namespace {

// Marginal log likelihood evaluators. Both exploit integer counts
// k_i = tau_i * y_i when present: log Gamma(a+k) - log Gamma(a) collapses to
// sum_j log(a+j), and tallying how many observations exceed each j turns the
// whole sum over i into a few short passes over count tables. The slow path
// keeps the lgamma form for non-integral data.
struct BetaBinomialLikelihood {
  // tally[j] = #{i : count_i > j}
  std::vector<double> hits, misses, trials;
  bool fast = false;
  VectorXd k, m, tau;  // slow path

  explicit BetaBinomialLikelihood(const Dataset& data) {
    const Eigen::Index p = data.size();
    k.resize(p);
    m.resize(p);
    tau = data.tau;
    bool integral = true;
    double max_tau = 0;
    for (Eigen::Index i = 0; i < p; ++i) {
      k[i] = data.y[i] * data.tau[i];
      m[i] = data.tau[i] - k[i];
      integral = integral && std::abs(k[i] - std::round(k[i])) < 1e-9;
      max_tau = std::max(max_tau, data.tau[i]);
    }
    fast = integral && max_tau <= 65536;
    if (!fast) return;
    const auto tally = [](std::vector<double>& t, double v) {
      for (int j = 0; j < static_cast<int>(std::lround(v)); ++j) t[j] += 1.0;
    };
    const auto n = static_cast<std::size_t>(std::lround(max_tau));
    hits.assign(n, 0.0);
    misses.assign(n, 0.0);
    trials.assign(n, 0.0);
    for (Eigen::Index i = 0; i < p; ++i) {
      tally(hits, std::round(k[i]));
      tally(misses, std::round(m[i]));
      tally(trials, std::round(tau[i]));
    }
  }

  double operator()(double gamma, double mu) const {
    const double a = gamma * mu;
    const double b = gamma * (1.0 - mu);
    if (!(a > 0) || !(b > 0)) return -kInf;
    double ll = 0.0;
    if (fast) {
      for (std::size_t j = 0; j < hits.size(); ++j) {
        const double dj = static_cast<double>(j);
        if (hits[j] > 0) ll += hits[j] * std::log(a + dj);
        if (misses[j] > 0) ll += misses[j] * std::log(b + dj);
        if (trials[j] > 0) ll -= trials[j] * std::log(gamma + dj);
      }
      return ll;
    }
    for (Eigen::Index i = 0; i < k.size(); ++i) {
      if (!(a + k[i] > 0) || !(b + m[i] > 0)) return -kInf;
      ll += log_gamma(a + k[i]) + log_gamma(b + m[i]) + log_gamma(gamma) -
            log_gamma(gamma + tau[i]) - log_gamma(a) - log_gamma(b);
    }
    return ll;
  }
};

struct PoissonGammaLikelihood {
  std::vector<double> counts;                  // tally as above
  std::vector<std::pair<double, double>> taus; // (tau, multiplicity)
  double total_count = 0.0;
  std::vector<double> count_by_tau;            // sum of k within each tau group
  bool fast = false;
  VectorXd k, tau;

  explicit PoissonGammaLikelihood(const Dataset& data) {
    const Eigen::Index p = data.size();
    k.resize(p);
    tau = data.tau;
    bool integral = true;
    double max_k = 0;
    for (Eigen::Index i = 0; i < p; ++i) {
      k[i] = data.y[i] * data.tau[i];
      integral = integral && std::abs(k[i] - std::round(k[i])) < 1e-9 && k[i] >= 0;
      max_k = std::max(max_k, k[i]);
    }
    fast = integral && max_k <= 65536;
    if (!fast) return;
    counts.assign(static_cast<std::size_t>(std::lround(max_k)), 0.0);
    std::vector<double> sorted_tau(tau.data(), tau.data() + p);
    std::sort(sorted_tau.begin(), sorted_tau.end());
    sorted_tau.erase(std::unique(sorted_tau.begin(), sorted_tau.end()),
                     sorted_tau.end());
    taus.reserve(sorted_tau.size());
    for (double t : sorted_tau) taus.emplace_back(t, 0.0);
    count_by_tau.assign(taus.size(), 0.0);
    for (Eigen::Index i = 0; i < p; ++i) {
      const double ki = std::round(k[i]);
      for (int j = 0; j < static_cast<int>(std::lround(ki)); ++j) counts[j] += 1.0;
      const auto it = std::lower_bound(
          taus.begin(), taus.end(), tau[i],
          [](const auto& a, double b) { return a.first < b; });
      it->second += 1.0;
      count_by_tau[static_cast<std::size_t>(it - taus.begin())] += ki;
      total_count += ki;
    }
  }

  double operator()(double gamma, double mu) const {
    const double a = gamma * mu;
    if (!(a > 0) || !(gamma > 0)) return -kInf;
    double ll = 0.0;
    if (fast) {
      const double p = static_cast<double>(k.size());
      ll += p * a * std::log(gamma);
      for (std::size_t g = 0; g < taus.size(); ++g) {
        ll -= (count_by_tau[g] + taus[g].second * a) * std::log(taus[g].first + gamma);
      }
      for (std::size_t j = 0; j < counts.size(); ++j) {
        if (counts[j] > 0) ll += counts[j] * std::log(a + static_cast<double>(j));
      }
      return ll;
    }
    for (Eigen::Index i = 0; i < k.size(); ++i) {
      if (!(a + k[i] > 0)) return -kInf;
      ll += a * std::log(gamma) - (k[i] + a) * std::log(tau[i] + gamma) +
            log_gamma(a + k[i]) - log_gamma(a);
    }
    return ll;
  }
};

}  // namespace

FitResult fit_eb_ml(const Dataset& data) {
  const bool binomial = data.family.tag() == FamilyTag::kBinomial;
  if (!binomial && data.family.tag() != FamilyTag::kPoisson) {
    throw unsupported_family_error("fit_eb_ml: requires binomial or poisson, got " +
                                   data.family.name());
  }

  // Transformed coordinates keep the search unconstrained: x = (log gamma,
  // logit mu) for binomial, (log gamma, log mu) for Poisson.
  const auto mu_from = [&](double x) {
    return binomial ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x);
  };
  const auto mu_to = [&](double mu) {
    return binomial ? std::log(mu / (1.0 - mu)) : std::log(mu);
  };

  std::optional<BetaBinomialLikelihood> bb_lik;
  std::optional<PoissonGammaLikelihood> pg_lik;
  if (binomial) {
    bb_lik.emplace(data);
  } else {
    pg_lik.emplace(data);
  }
  const auto loglik = [&](double g, double m) {
    return binomial ? (*bb_lik)(g, m) : (*pg_lik)(g, m);
  };

  const auto negloglik = [&](const std::array<double, 2>& x) {
    if (std::abs(x[0]) > 50 || std::abs(x[1]) > 50) return kInf;
    return -loglik(std::exp(x[0]), mu_from(x[1]));
  };

  // Deterministic starts: gamma in {0.5, 5}, mu at a moment value and at the
  // median, both clamped into the interior of the mean domain.
  const double eps = 1e-6;
  const double ybar = compensated_mean(data.y);
  VectorXd sorted = data.y;
  std::sort(sorted.data(), sorted.data() + sorted.size());
  const double median = sorted[sorted.size() / 2];
  const double mu_hi = binomial ? 1.0 - eps : kInf;
  const double m0 = clamp(ybar, eps, mu_hi);
  const double q0 = clamp(median, eps, mu_hi);

  FitResult result;
  double best = kInf;
  std::array<double, 2> best_x{};
  for (const double g0 : {0.5, 5.0}) {
    for (const double mu0 : {m0, q0}) {
      const SimplexResult run =
          nelder_mead2(negloglik, {std::log(g0), mu_to(mu0)}, 1e-8, 2000);
      result.diagnostics.nm_iterations += run.iterations;
      ++result.diagnostics.nm_starts;
      if (run.value < best) {
        best = run.value;
        best_x = run.x;
      }
    }
  }
  if (!std::isfinite(best)) {
    throw std::runtime_error("fit_eb_ml: no start found a finite likelihood");
  }

  ParamRule rule{std::exp(best_x[0]), mu_from(best_x[1])};
  result.estimates = apply_param(data, rule);
  result.rule = rule;
  return result;
}

FitResult fit_james_stein(const Dataset& data, bool literal_form) {
  const Eigen::Index p = data.size();
  if (p < 4) throw std::invalid_argument("fit_james_stein: needs p >= 4");

  CompensatedSum wsum, wssum;
  for (Eigen::Index i = 0; i < p; ++i) {
    wsum.add(data.tau[i] * data.y[i]);  // y_i / A_i with A_i = 1/tau_i
    wssum.add(data.tau[i]);
  }
  const double mu = wsum.value() / wssum.value();
  CompensatedSum dev;
  for (Eigen::Index i = 0; i < p; ++i) {
    const double d = data.y[i] - mu;
    dev.add(data.tau[i] * d * d);
  }
  const double denom = dev.value();
  const double c =
      denom > 0 ? std::max(0.0, 1.0 - static_cast<double>(p - 3) / denom) : 0.0;

  FitResult result;
  if (literal_form) {
    // As printed: mu + c * y_i, shrinking y itself.
    result.estimates.resize(p);
    for (Eigen::Index i = 0; i < p; ++i) result.estimates[i] = mu + c * data.y[i];
    return result;
  }
  SemiRule rule{VectorXd::Constant(p, 1.0 - c), mu};
  result.estimates = apply_semi(data, rule);
  result.rule = std::move(rule);
  return result;
}

FitResult fit_naive(const Dataset& data) {
  FitResult result;
  result.estimates = data.y;
  return result;
}

FitResult fit_grand_mean(const Dataset& data) {
  SemiRule rule{VectorXd::Ones(data.size()), compensated_mean(data.y)};
  FitResult result;
  result.estimates = apply_semi(data, rule);
  result.rule = std::move(rule);
  return result;
}

double oracle_risk(const Dataset& data, const VectorXd& truth,
                   const ParamRule& rule) {
  if (truth.size() != data.size()) {
    throw std::invalid_argument("oracle_risk: truth length mismatch");
  }
  const Eigen::Index p = data.size();
  CompensatedSum acc;
  for (Eigen::Index i = 0; i < p; ++i) {
    const double v = variance_function(data.family, truth[i]);
    const double dev = rule.mu - truth[i];
    if (std::isinf(rule.gamma)) {
      acc.add(dev * dev);
    } else {
      const double keep = data.tau[i] / (data.tau[i] + rule.gamma);
      const double b = rule.gamma / (data.tau[i] + rule.gamma);
      acc.add(keep * keep * v / data.tau[i] + b * b * dev * dev);
    }
  }
  return acc.value() / static_cast<double>(p);
}

FitResult fit_oracle(const Dataset& data, const VectorXd& truth) {
  if (truth.size() != data.size()) {
    throw std::invalid_argument("fit_oracle: truth length mismatch");
  }
  const double theta_bar = compensated_mean(truth);
  const auto profile_mu = [&](double gamma) {
    if (gamma == 0.0) return theta_bar;
    if (std::isinf(gamma)) return theta_bar;
    double num = 0.0, den = 0.0;
    for (Eigen::Index i = 0; i < data.size(); ++i) {
      const double b = gamma / (data.tau[i] + gamma);
      num += b * b * truth[i];
      den += b * b;
    }
    return num / den;
  };
  const auto objective = [&](double gamma) {
    return oracle_risk(data, truth, ParamRule{gamma, profile_mu(gamma)});
  };

  const GammaScan scan = scan_gamma(objective);
  ParamRule rule{scan.gamma, profile_mu(scan.gamma)};
  FitResult result;
  result.objective = oracle_risk(data, truth, rule);
  result.estimates = apply_param(data, rule);
  result.rule = rule;
  result.diagnostics.grid_points = 1001;
  result.diagnostics.refine_evaluations = scan.evaluations;
  return result;
}

}  // namespace qvshrink
