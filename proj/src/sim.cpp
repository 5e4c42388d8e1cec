#include "qvshrink/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "qvshrink/compensated.hpp"

namespace qvshrink {

std::string estimator_name(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::kNaive: return "naive";
    case EstimatorKind::kGrandMean: return "grand-mean";
    case EstimatorKind::kJamesStein: return "js";
    case EstimatorKind::kSemi: return "sm";
    case EstimatorKind::kSemiGrand: return "sg";
    case EstimatorKind::kParam: return "pm";
    case EstimatorKind::kParamGrand: return "pg";
    case EstimatorKind::kEbMl: return "eb-ml";
    case EstimatorKind::kEbMm: return "eb-mm";
    case EstimatorKind::kOracle: return "oracle";
  }
  return "?";
}

EstimatorKind parse_estimator(const std::string& name) {
  static const std::vector<EstimatorKind> all = {
      EstimatorKind::kNaive,      EstimatorKind::kGrandMean,
      EstimatorKind::kJamesStein, EstimatorKind::kSemi,
      EstimatorKind::kSemiGrand,  EstimatorKind::kParam,
      EstimatorKind::kParamGrand, EstimatorKind::kEbMl,
      EstimatorKind::kEbMm,       EstimatorKind::kOracle};
  for (EstimatorKind kind : all) {
    if (estimator_name(kind) == name) return kind;
  }
  std::string valid;
  for (EstimatorKind kind : all) {
    if (!valid.empty()) valid += ", ";
    valid += estimator_name(kind);
  }
  throw std::invalid_argument("unknown estimator '" + name + "' (valid: " + valid +
                              ")");
}

FitResult run_estimator(EstimatorKind kind, const Dataset& data,
                        const VectorXd* truth) {
  switch (kind) {
    case EstimatorKind::kNaive: return fit_naive(data);
    case EstimatorKind::kGrandMean: return fit_grand_mean(data);
    case EstimatorKind::kJamesStein: return fit_james_stein(data);
    case EstimatorKind::kSemi: return fit_semi(data);
    case EstimatorKind::kSemiGrand: return fit_semi_grand(data);
    case EstimatorKind::kParam: return fit_param(data);
    case EstimatorKind::kParamGrand: return fit_param_grand(data);
    case EstimatorKind::kEbMl: return fit_eb_ml(data);
    case EstimatorKind::kEbMm: return fit_eb_mm(data);
    case EstimatorKind::kOracle:
      if (truth == nullptr) {
        throw std::invalid_argument("oracle estimator needs the true means");
      }
      return fit_oracle(data, *truth);
  }
  throw std::logic_error("run_estimator: bad kind");
}

namespace {

const std::vector<ScenarioSpec>& all_scenarios() {
  static const std::vector<ScenarioSpec> table = [] {
    std::vector<ScenarioSpec> out;
    const std::pair<std::string, Family> loc_families[] = {
        {"laplace", Family::laplace()},
        {"logistic", Family::logistic()},
        {"t7", Family::student_t(7)},
    };
    for (const auto& [name, family] : loc_families) {
      for (int v = 1; v <= 4; ++v) {
        out.push_back({name + "-" + std::to_string(v),
                       ScenarioSpec::Kind::kLocScale, family, v});
      }
    }
    for (int v = 1; v <= 4; ++v) {
      out.push_back({"binomial-ex" + std::to_string(v),
                     ScenarioSpec::Kind::kBetaBinomial, Family::binomial(), v});
    }
    for (int v = 5; v <= 8; ++v) {
      out.push_back({"poisson-ex" + std::to_string(v),
                     ScenarioSpec::Kind::kPoissonGamma, Family::poisson(), v});
    }
    return out;
  }();
  return table;
}

double draw_beta(double a, double b, Philox& rng) {
  std::gamma_distribution<double> ga(a, 1.0), gb(b, 1.0);
  const double x = ga(rng);
  const double y = gb(rng);
  return x / (x + y);
}

double draw_uniform(double lo, double hi, Philox& rng) {
  return lo + (hi - lo) * uniform01(rng);
}

long draw_poisson(double mean, Philox& rng) {
  std::poisson_distribution<long> dist(mean);
  return dist(rng);
}

}  // namespace

const std::vector<std::string>& scenario_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> out;
    for (const auto& spec : all_scenarios()) out.push_back(spec.id);
    return out;
  }();
  return ids;
}

ScenarioSpec make_scenario(const std::string& id) {
  for (const auto& spec : all_scenarios()) {
    if (spec.id == id) return spec;
  }
  std::string valid;
  for (const auto& s : scenario_ids()) {
    if (!valid.empty()) valid += ", ";
    valid += s;
  }
  throw std::invalid_argument("unknown scenario '" + id + "' (valid: " + valid + ")");
}

std::vector<EstimatorKind> default_estimators(const ScenarioSpec& spec) {
  if (spec.kind == ScenarioSpec::Kind::kLocScale) {
    return {EstimatorKind::kNaive, EstimatorKind::kJamesStein, EstimatorKind::kSemi};
  }
  return {EstimatorKind::kEbMm, EstimatorKind::kEbMl, EstimatorKind::kParam,
          EstimatorKind::kSemi, EstimatorKind::kOracle};
}

Replication draw_replication(const ScenarioSpec& spec, int p, Philox& rng) {
  Replication rep;
  rep.theta.resize(p);
  rep.tau.resize(p);
  rep.y.resize(p);

  switch (spec.kind) {
    case ScenarioSpec::Kind::kLocScale: {
      // The scenarios state the variance A of each observation; with a
      // standard variate of variance nu0 that means tau = nu0 / A.
      const double nu0 = spec.nominal.coefficients().nu0;
      Family sample_family = spec.nominal;
      if (spec.variant == 4) {
        sample_family = Family::uniform_ls(std::sqrt(nu0));
      }
      std::normal_distribution<double> stdnorm(0.0, 1.0);
      for (int i = 0; i < p; ++i) {
        double a = 0.0, theta = 0.0;
        switch (spec.variant) {
          case 1:
            a = draw_uniform(0.1, 1.0, rng);
            theta = stdnorm(rng);
            break;
          case 2:
          case 4:
            a = draw_uniform(0.1, 1.0, rng);
            theta = a;
            break;
          case 3:
            if (uniform01(rng) < 0.5) {
              a = 0.1;
              theta = 2.0 + std::sqrt(0.1) * stdnorm(rng);
            } else {
              a = 0.5;
              theta = std::sqrt(0.5) * stdnorm(rng);
            }
            break;
          default:
            throw std::logic_error("bad location-scale variant");
        }
        rep.theta[i] = theta;
        rep.tau[i] = nu0 / a;
        rep.y[i] = sample(sample_family, {theta, rep.tau[i]}, rng);
      }
      break;
    }
    case ScenarioSpec::Kind::kBetaBinomial: {
      for (int i = 0; i < p; ++i) {
        double tau = 0.0, theta = 0.0;
        switch (spec.variant) {
          case 1:
            tau = static_cast<double>(draw_poisson(3.0, rng) + 2);
            theta = draw_beta(1, 1, rng);
            break;
          case 2:
            tau = static_cast<double>(draw_poisson(3.0, rng) + 2);
            theta = uniform01(rng) < 0.5 ? draw_beta(1, 3, rng) : draw_beta(3, 1, rng);
            break;
          case 3:
            tau = static_cast<double>(draw_poisson(3.0, rng) + 2);
            theta = 1.0 / tau;
            break;
          case 4: {
            const bool group = uniform01(rng) < 0.5;
            tau = static_cast<double>(draw_poisson(group ? 10.0 : 1.0, rng) + 2);
            theta = group ? draw_beta(1, 3, rng) : draw_beta(3, 1, rng);
            break;
          }
          default:
            throw std::logic_error("bad beta-binomial variant");
        }
        rep.theta[i] = theta;
        rep.tau[i] = tau;
        rep.y[i] = sample(spec.nominal, {theta, tau}, rng);
      }
      break;
    }
    case ScenarioSpec::Kind::kPoissonGamma: {
      for (int i = 0; i < p; ++i) {
        double tau = 0.0, theta = 0.0;
        switch (spec.variant) {
          case 5: {
            tau = static_cast<double>(draw_poisson(3.0, rng) + 2);
            std::gamma_distribution<double> g(1.0, 1.0);
            theta = g(rng);
            break;
          }
          case 6:
            tau = static_cast<double>(draw_poisson(3.0, rng) + 2);
            theta = draw_uniform(0.1, 1.0, rng);
            break;
          case 7:
            tau = static_cast<double>(draw_poisson(3.0, rng) + 2);
            theta = 1.0 / tau;
            break;
          case 8: {
            const bool group = uniform01(rng) < 0.5;
            tau = static_cast<double>(draw_poisson(group ? 10.0 : 1.0, rng) + 2);
            std::gamma_distribution<double> g(group ? 1.0 : 5.0, 1.0);
            theta = g(rng);
            break;
          }
          default:
            throw std::logic_error("bad poisson-gamma variant");
        }
        rep.theta[i] = theta;
        rep.tau[i] = tau;
        rep.y[i] = sample(spec.nominal, {theta, tau}, rng);
      }
      break;
    }
  }
  return rep;
}

Philox replication_stream(const ScenarioSpec& spec, std::uint64_t seed, int p,
                          int rep) {
  return Philox(seed, fnv1a32(spec.id), static_cast<std::uint32_t>(p),
                static_cast<std::uint32_t>(rep));
}

namespace {

Family dataset_family(const ScenarioSpec& spec) {
  if (spec.kind == ScenarioSpec::Kind::kLocScale && spec.variant == 4) {
    return Family::uniform_ls(std::sqrt(spec.nominal.coefficients().nu0));
  }
  return spec.nominal;
}

}  // namespace

RiskReport run_scenario(const ScenarioSpec& spec, const std::vector<int>& p_list,
                        int n_reps, std::uint64_t seed,
                        const std::vector<EstimatorKind>& estimators,
                        int threads, bool keep_losses) {
  if (p_list.empty()) throw std::invalid_argument("run_scenario: empty p list");
  if (n_reps < 1) throw std::invalid_argument("run_scenario: need n_reps >= 1");
  if (estimators.empty() && keep_losses) {
    throw std::invalid_argument("run_scenario: no estimators to keep losses for");
  }
  for (int p : p_list) {
    if (p < 1) throw std::invalid_argument("run_scenario: p must be >= 1");
  }
  if (spec.kind == ScenarioSpec::Kind::kLocScale) {
    for (EstimatorKind kind : estimators) {
      if (kind == EstimatorKind::kEbMl || kind == EstimatorKind::kEbMm) {
        throw std::invalid_argument("estimator " + estimator_name(kind) +
                                    " needs a binomial or poisson scenario");
      }
    }
  }
  threads = std::max(1, threads);

  const Family family = dataset_family(spec);
  const auto n_est = static_cast<Eigen::Index>(estimators.size());

  RiskReport report;
  report.scenario = spec.id;
  report.seed = seed;
  report.n_reps = n_reps;
  report.p_values = p_list;
  report.estimators = estimators;
  report.risk.resize(static_cast<Eigen::Index>(p_list.size()), n_est);
  report.se.resize(static_cast<Eigen::Index>(p_list.size()), n_est);

  for (std::size_t ip = 0; ip < p_list.size(); ++ip) {
    const int p = p_list[ip];
    Eigen::MatrixXd losses(n_reps, std::max<Eigen::Index>(n_est, 1));

    const auto work = [&](int first_rep) {
      for (int rep = first_rep; rep < n_reps; rep += threads) {
        Philox rng = replication_stream(spec, seed, p, rep);
        const Replication draw = draw_replication(spec, p, rng);
        const Dataset data(draw.y, draw.tau, family);
        for (Eigen::Index ie = 0; ie < n_est; ++ie) {
          const FitResult fit = run_estimator(estimators[ie], data, &draw.theta);
          CompensatedSum sq;
          for (int i = 0; i < p; ++i) {
            const double d = fit.estimates[i] - draw.theta[i];
            sq.add(d * d);
          }
          losses(rep, ie) = sq.value() / p;
        }
      }
    };
    if (threads == 1) {
      work(0);
    } else {
      std::vector<std::thread> pool;
      pool.reserve(threads);
      for (int t = 0; t < threads; ++t) pool.emplace_back(work, t);
      for (auto& th : pool) th.join();
    }

    for (Eigen::Index ie = 0; ie < n_est; ++ie) {
      const double mean = compensated_mean(losses.col(ie));
      CompensatedSum var;
      for (int rep = 0; rep < n_reps; ++rep) {
        const double d = losses(rep, ie) - mean;
        var.add(d * d);
      }
      report.risk(static_cast<Eigen::Index>(ip), ie) = mean;
      report.se(static_cast<Eigen::Index>(ip), ie) =
          n_reps > 1 ? std::sqrt(var.value() / (n_reps - 1)) / std::sqrt(n_reps)
                     : 0.0;
    }
    if (keep_losses) report.losses.push_back(std::move(losses));
  }
  return report;
}

void emit_csv(const RiskReport& report, std::ostream& out) {
  out << "scenario,p,estimator,risk,se,n_reps,seed\n";
  char buf[160];
  for (std::size_t ip = 0; ip < report.p_values.size(); ++ip) {
    for (std::size_t ie = 0; ie < report.estimators.size(); ++ie) {
      std::snprintf(buf, sizeof buf, "%s,%d,%s,%.10g,%.10g,%d,%llu\n",
                    report.scenario.c_str(), report.p_values[ip],
                    estimator_name(report.estimators[ie]).c_str(),
                    report.risk(static_cast<Eigen::Index>(ip),
                                static_cast<Eigen::Index>(ie)),
                    report.se(static_cast<Eigen::Index>(ip),
                              static_cast<Eigen::Index>(ie)),
                    report.n_reps,
                    static_cast<unsigned long long>(report.seed));
      out << buf;
    }
  }
}

void emit_csv(const RiskReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("emit_csv: cannot open '" + path + "'");
  emit_csv(report, out);
  out.flush();
  if (!out) throw std::runtime_error("emit_csv: write failed for '" + path + "'");
}

}  // namespace qvshrink
