#include "qvshrink/families.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace qvshrink {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kIntegerTol = 1e-9;

bool is_integral(double x) { return std::abs(x - std::round(x)) <= kIntegerTol; }

double parse_shape(const std::string& text, const std::string& name) {
  const auto pos = text.find(':');
  if (pos == std::string::npos || pos + 1 >= text.size()) {
    throw std::invalid_argument("family '" + name + "' needs a parameter, e.g. '" +
                                name + ":2.5'");
  }
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text.substr(pos + 1), &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("bad parameter in family spec '" + text + "'");
  }
  if (used != text.size() - pos - 1) {
    throw std::invalid_argument("bad parameter in family spec '" + text + "'");
  }
  return value;
}

}  // namespace

Family Family::binomial() { return Family(FamilyTag::kBinomial, {0, 1, -1}, 0); }
Family Family::poisson() { return Family(FamilyTag::kPoisson, {0, 1, 0}, 0); }
Family Family::neg_binomial() {
  return Family(FamilyTag::kNegBinomial, {0, 1, 1}, 0);
}

Family Family::gamma(double alpha) {
  if (!(alpha > 0)) throw std::invalid_argument("gamma family: alpha must be > 0");
  return Family(FamilyTag::kGamma, {0, 0, 1.0 / alpha}, alpha);
}

Family Family::ghs(double alpha) {
  if (!(alpha > 0)) throw std::invalid_argument("ghs family: alpha must be > 0");
  return Family(FamilyTag::kGhs, {alpha, 0, 1.0 / alpha}, alpha);
}

Family Family::normal() { return Family(FamilyTag::kNormal, {1, 0, 0}, 0); }
Family Family::laplace() { return Family(FamilyTag::kLaplace, {2, 0, 0}, 0); }

Family Family::logistic() {
  return Family(FamilyTag::kLogistic, {M_PI * M_PI / 3.0, 0, 0}, 0);
}

Family Family::student_t(double df) {
  // df > 4 keeps the tail condition of the location-scale theory satisfied.
  if (!(df > 4)) throw std::invalid_argument("student_t family: df must be > 4");
  return Family(FamilyTag::kStudentT, {df / (df - 2.0), 0, 0}, df);
}

Family Family::uniform_ls(double sigma) {
  if (!(sigma > 0)) {
    throw std::invalid_argument("uniform_ls family: sigma must be > 0");
  }
  return Family(FamilyTag::kUniformLs, {sigma * sigma, 0, 0}, sigma);
}

Family Family::parse(const std::string& text) {
  const std::string head = text.substr(0, text.find(':'));
  if (head == "binomial") return binomial();
  if (head == "poisson") return poisson();
  if (head == "neg-binomial" || head == "negbinomial") return neg_binomial();
  if (head == "gamma") return gamma(parse_shape(text, head));
  if (head == "ghs") return ghs(parse_shape(text, head));
  if (head == "normal") return normal();
  if (head == "laplace") return laplace();
  if (head == "logistic") return logistic();
  if (head == "t" || head == "student-t") return student_t(parse_shape(text, head));
  if (head == "uniform-ls") return uniform_ls(parse_shape(text, head));
  throw std::invalid_argument(
      "unknown family '" + text +
      "' (expected binomial, poisson, neg-binomial, gamma:<alpha>, ghs:<alpha>, "
      "normal, laplace, logistic, t:<df>, uniform-ls:<sigma>)");
}

std::string Family::name() const {
  std::ostringstream out;
  switch (tag_) {
    case FamilyTag::kBinomial: return "binomial";
    case FamilyTag::kPoisson: return "poisson";
    case FamilyTag::kNegBinomial: return "neg-binomial";
    case FamilyTag::kGamma: out << "gamma:" << shape_; return out.str();
    case FamilyTag::kGhs: out << "ghs:" << shape_; return out.str();
    case FamilyTag::kNormal: return "normal";
    case FamilyTag::kLaplace: return "laplace";
    case FamilyTag::kLogistic: return "logistic";
    case FamilyTag::kStudentT: out << "t:" << shape_; return out.str();
    case FamilyTag::kUniformLs: out << "uniform-ls:" << shape_; return out.str();
  }
  return "?";
}

bool Family::is_location_scale() const {
  switch (tag_) {
    case FamilyTag::kNormal:
    case FamilyTag::kLaplace:
    case FamilyTag::kLogistic:
    case FamilyTag::kStudentT:
    case FamilyTag::kUniformLs:
      return true;
    default:
      return false;
  }
}

bool Family::requires_integer_tau() const {
  return tag_ == FamilyTag::kBinomial || tag_ == FamilyTag::kNegBinomial;
}

double Family::theta_lower() const {
  switch (tag_) {
    case FamilyTag::kBinomial:
    case FamilyTag::kPoisson:
    case FamilyTag::kNegBinomial:
    case FamilyTag::kGamma:
      return 0.0;
    default:
      return -kInf;
  }
}

double Family::theta_upper() const {
  return tag_ == FamilyTag::kBinomial ? 1.0 : kInf;
}

bool Family::contains_theta(double theta) const {
  if (!std::isfinite(theta)) return false;
  if (tag_ == FamilyTag::kGamma) return theta > 0.0;  // scale must be positive
  return theta >= theta_lower() && theta <= theta_upper();
}

double variance_function(const Family& family, double theta) {
  if (!family.contains_theta(theta)) {
    throw std::domain_error("variance_function: theta=" + std::to_string(theta) +
                            " outside the mean domain of " + family.name());
  }
  return family.coefficients()(theta);
}

double unbiased_variance_term(const Family& family, double y, double tau) {
  const double denom = tau + family.coefficients().nu2;
  if (!(denom > 0)) {
    // Binomial with n = 1 lands here: tau + nu2 = 0.
    throw std::domain_error("unbiased_variance_term: tau + nu2 must be positive for " +
                            family.name());
  }
  return family.coefficients()(y) / denom;
}

namespace {

void validate_point(const Family& family, const ParamPoint& pt) {
  if (!(pt.tau > 0) || !std::isfinite(pt.tau)) {
    throw std::invalid_argument("sample: tau must be positive and finite");
  }
  if (family.requires_integer_tau() && (!is_integral(pt.tau) || pt.tau < 1)) {
    throw std::invalid_argument("sample: " + family.name() +
                                " needs a positive integer tau");
  }
  if (!family.contains_theta(pt.theta)) {
    throw std::domain_error("sample: theta outside the mean domain of " +
                            family.name());
  }
}

double sample_standard_variate(const Family& family, Philox& rng) {
  switch (family.tag()) {
    case FamilyTag::kNormal: {
      std::normal_distribution<double> dist(0.0, 1.0);
      return dist(rng);
    }
    case FamilyTag::kLaplace: {
      const double v = uniform01(rng) - 0.5;
      return (v < 0 ? 1.0 : -1.0) * std::log(1.0 - 2.0 * std::abs(v));
    }
    case FamilyTag::kLogistic: {
      const double u = uniform01(rng);
      return std::log(u / (1.0 - u));
    }
    case FamilyTag::kStudentT: {
      std::student_t_distribution<double> dist(family.shape());
      return dist(rng);
    }
    default:
      throw std::logic_error("not a location-scale standard variate");
  }
}

}  // namespace

double sample(const Family& family, const ParamPoint& point, Philox& rng) {
  validate_point(family, point);
  const double theta = point.theta;
  const double tau = point.tau;
  switch (family.tag()) {
    case FamilyTag::kBinomial: {
      const long n = std::lround(tau);
      std::binomial_distribution<long> dist(n, theta);
      return static_cast<double>(dist(rng)) / static_cast<double>(n);
    }
    case FamilyTag::kPoisson: {
      const double mean = tau * theta;
      if (mean == 0.0) return 0.0;  // Poisson(0) is a point mass
      std::poisson_distribution<long> dist(mean);
      return static_cast<double>(dist(rng)) / tau;
    }
    case FamilyTag::kNegBinomial: {
      // Successes before the n-th failure with success probability
      // p = theta/(1+theta); std counts failures before the k-th success,
      // so swap the roles.
      const long n = std::lround(tau);
      if (theta == 0.0) return 0.0;
      std::negative_binomial_distribution<long> dist(n, 1.0 / (1.0 + theta));
      return static_cast<double>(dist(rng)) / static_cast<double>(n);
    }
    case FamilyTag::kGamma: {
      const double alpha = family.shape();
      std::gamma_distribution<double> dist(tau * alpha, theta / alpha);
      return dist(rng) / tau;
    }
    case FamilyTag::kGhs:
      throw unsupported_family_error("sample: GHS sampling is not supported");
    case FamilyTag::kUniformLs: {
      const double half = std::sqrt(3.0 / tau) * family.shape();
      std::uniform_real_distribution<double> dist(theta - half, theta + half);
      return dist(rng);
    }
    default:
      return theta + sample_standard_variate(family, rng) / std::sqrt(tau);
  }
}

Dataset::Dataset(VectorXd y_in, VectorXd tau_in, Family family_in)
    : y(std::move(y_in)), tau(std::move(tau_in)), family(family_in) {
  if (y.size() != tau.size()) {
    throw std::invalid_argument("Dataset: y and tau lengths differ");
  }
  if (y.size() < 1) throw std::invalid_argument("Dataset: need p >= 1");
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (!std::isfinite(y[i])) {
      throw std::invalid_argument("Dataset: y[" + std::to_string(i) +
                                  "] is not finite");
    }
    if (!(tau[i] > 0) || !std::isfinite(tau[i])) {
      throw std::invalid_argument("Dataset: tau[" + std::to_string(i) +
                                  "] must be positive and finite");
    }
    if (family.requires_integer_tau() && (!is_integral(tau[i]) || tau[i] < 1)) {
      throw std::invalid_argument("Dataset: " + family.name() + " tau[" +
                                  std::to_string(i) +
                                  "] must be a positive integer");
    }
    if (family.tag() == FamilyTag::kBinomial) {
      if (y[i] < 0 || y[i] > 1) {
        throw std::invalid_argument("Dataset: binomial y[" + std::to_string(i) +
                                    "] outside [0,1]");
      }
      if (!is_integral(y[i] * tau[i])) {
        throw std::invalid_argument("Dataset: binomial y[" + std::to_string(i) +
                                    "]*tau is not an integer count");
      }
    }
  }
}

VectorXd Dataset::variance_terms() const {
  VectorXd out(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    out[i] = unbiased_variance_term(family, y[i], tau[i]);
  }
  return out;
}

RegularityReport check_regularity(const Dataset& data) {
  RegularityReport report;
  const auto offenders_where = [&](auto&& pred) {
    std::vector<Eigen::Index> out;
    for (Eigen::Index i = 0; i < data.size(); ++i) {
      if (pred(i)) out.push_back(i);
    }
    return out;
  };
  const auto add = [&](std::string cond, std::vector<Eigen::Index> off) {
    report.checks.push_back({std::move(cond), off.empty(), std::move(off)});
  };

  switch (data.family.tag()) {
    case FamilyTag::kBinomial:
      add("binomial: tau_i >= 2 for all i",
          offenders_where([&](Eigen::Index i) { return data.tau[i] < 2; }));
      break;
    case FamilyTag::kPoisson:
      add("poisson: tau_i * theta_i > 0 for all i (y used as theta proxy)",
          offenders_where(
              [&](Eigen::Index i) { return !(data.tau[i] * data.y[i] > 0); }));
      break;
    case FamilyTag::kNegBinomial:
      add("neg-binomial: tau_i * p_i > 0 for all i (y used as theta proxy)",
          offenders_where([&](Eigen::Index i) { return !(data.y[i] > 0); }));
      break;
    case FamilyTag::kGamma:
    case FamilyTag::kGhs:
      add(data.family.name() + ": inf tau_i > 0", {});
      break;
    case FamilyTag::kStudentT: {
      RegularityCheck c;
      c.condition = "location-scale tail bound P(|Z|>t) <= D t^-alpha, alpha > 4";
      c.pass = data.family.shape() > 4;  // enforced at construction
      report.checks.push_back(std::move(c));
      break;
    }
    default:
      // Remaining location-scale variates have bounded or exponential tails.
      add("location-scale tail bound P(|Z|>t) <= D t^-alpha, alpha > 4", {});
      break;
  }
  return report;
}

}  // namespace qvshrink
