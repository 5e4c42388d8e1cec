#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

#include "qvshrink/rng.hpp"

namespace qvshrink {

using Eigen::VectorXd;

struct unsupported_family_error : std::domain_error {
  using std::domain_error::domain_error;
};

/// Coefficients of the quadratic variance function V(t) = nu0 + nu1*t + nu2*t^2.
struct QvfCoefficients {
  double nu0 = 0.0;
  double nu1 = 0.0;
  double nu2 = 0.0;

  double operator()(double theta) const {
    return nu0 + theta * (nu1 + nu2 * theta);
  }
};

enum class FamilyTag {
  kBinomial,
  kPoisson,
  kNegBinomial,
  kGamma,
  kGhs,
  kNormal,
  kLaplace,
  kLogistic,
  kStudentT,
  kUniformLs,
};

/// A distribution family with quadratic variance: the exponential families
/// of this kind plus location-scale families (where only nu0 is nonzero).
/// Value type; cheap to copy.
class Family {
 public:
  static Family binomial();
  static Family poisson();
  static Family neg_binomial();
  static Family gamma(double alpha);
  static Family ghs(double alpha);
  static Family normal();
  static Family laplace();
  static Family logistic();
  static Family student_t(double df);
  static Family uniform_ls(double sigma);

  /// Accepts "binomial", "poisson", "neg-binomial", "gamma:<alpha>",
  /// "ghs:<alpha>", "normal", "laplace", "logistic", "t:<df>",
  /// "uniform-ls:<sigma>". Throws std::invalid_argument otherwise.
  static Family parse(const std::string& text);

  FamilyTag tag() const { return tag_; }
  const QvfCoefficients& coefficients() const { return coeff_; }
  /// alpha for gamma/GHS, df for Student t, sigma for uniform-ls.
  double shape() const { return shape_; }
  std::string name() const;

  bool is_location_scale() const;
  bool requires_integer_tau() const;

  /// Closed mean-parameter domain: [0,1] binomial, [0,inf) Poisson and
  /// negative-binomial, (0,inf) gamma, all reals otherwise. The boundary 0
  /// is admitted for the counting families because the degenerate point
  /// mass is well defined there.
  bool contains_theta(double theta) const;
  double theta_lower() const;
  double theta_upper() const;

 private:
  Family(FamilyTag tag, QvfCoefficients coeff, double shape)
      : tag_(tag), coeff_(coeff), shape_(shape) {}

  FamilyTag tag_;
  QvfCoefficients coeff_;
  double shape_;
};

/// One (theta, tau) pair: mean parameter and convolution parameter
/// (within-group sample size). A = 1/tau is (essentially) the variance.
struct ParamPoint {
  double theta = 0.0;
  double tau = 1.0;
};

/// V(theta), checking theta against the family's mean domain.
double variance_function(const Family& family, double theta);

/// V(y) / (tau + nu2), the data-only term whose expectation is V(theta)/tau.
/// Throws std::domain_error when tau + nu2 <= 0 (e.g. binomial with n = 1).
double unbiased_variance_term(const Family& family, double y, double tau);

/// One draw with mean theta and variance V(theta)/tau. GHS sampling is not
/// supported and throws unsupported_family_error.
double sample(const Family& family, const ParamPoint& point, Philox& rng);

/// Observations y with matching convolution parameters tau. Validated on
/// construction: sizes agree, p >= 1, tau positive and finite, y finite,
/// and for the integer-count families tau (and y*tau for binomial) integral
/// to 1e-9.
struct Dataset {
  VectorXd y;
  VectorXd tau;
  Family family;

  Dataset(VectorXd y_in, VectorXd tau_in, Family family_in);

  Eigen::Index size() const { return y.size(); }

  /// unbiased_variance_term for every index.
  VectorXd variance_terms() const;
};

struct RegularityCheck {
  std::string condition;
  bool pass = true;
  std::vector<Eigen::Index> offenders;
};

/// Advisory diagnostics mirroring the per-family regularity conditions.
/// Conditions stated on the unknown means use y as a proxy. A failing check
/// never blocks estimation.
struct RegularityReport {
  std::vector<RegularityCheck> checks;

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

RegularityReport check_regularity(const Dataset& data);

}  // namespace qvshrink
