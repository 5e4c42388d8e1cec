#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qvshrink/estimators.hpp"
#include "qvshrink/families.hpp"

namespace qvshrink {

enum class EstimatorKind {
  kNaive,
  kGrandMean,
  kJamesStein,
  kSemi,
  kSemiGrand,
  kParam,
  kParamGrand,
  kEbMl,
  kEbMm,
  kOracle,
};

std::string estimator_name(EstimatorKind kind);
/// Parses the CLI spelling ("naive", "grand-mean", "js", "sm", "sg", "pm",
/// "pg", "eb-ml", "eb-mm", "oracle"); throws std::invalid_argument listing
/// the valid names otherwise.
EstimatorKind parse_estimator(const std::string& name);

/// Dispatch a fit. truth is required by the oracle and ignored otherwise.
FitResult run_estimator(EstimatorKind kind, const Dataset& data,
                        const VectorXd* truth = nullptr);

/// One simulation setting: how (theta_i, tau_i) pairs are drawn and which
/// family the observations come from.
struct ScenarioSpec {
  enum class Kind { kLocScale, kBetaBinomial, kPoissonGamma };

  std::string id;
  Kind kind;
  Family nominal;  // estimation family; uniform-ls carries the nominal sigma
  int variant;     // 1..4 for location-scale and binomial, 5..8 for Poisson
};

const std::vector<std::string>& scenario_ids();
ScenarioSpec make_scenario(const std::string& id);
std::vector<EstimatorKind> default_estimators(const ScenarioSpec& spec);

/// Draw one replication of size p into (theta, tau) and observations y.
/// Deterministic given the stream; every replication owns its own stream.
struct Replication {
  VectorXd theta;
  VectorXd tau;
  VectorXd y;
};
Replication draw_replication(const ScenarioSpec& spec, int p, Philox& rng);

/// Stream for replication `rep` of scenario `spec` at size p under `seed`.
Philox replication_stream(const ScenarioSpec& spec, std::uint64_t seed, int p,
                          int rep);

/// Monte Carlo risk estimates: mean squared-error loss and its standard
/// error per (p, estimator) cell, plus the raw per-replication losses when
/// requested (column rep, laid out reps x estimators per p).
struct RiskReport {
  std::string scenario;
  std::uint64_t seed = 0;
  int n_reps = 0;
  std::vector<int> p_values;
  std::vector<EstimatorKind> estimators;
  Eigen::MatrixXd risk;  // p_values.size() x estimators.size()
  Eigen::MatrixXd se;
  std::vector<Eigen::MatrixXd> losses;  // kept only when requested
};

RiskReport run_scenario(const ScenarioSpec& spec, const std::vector<int>& p_list,
                        int n_reps, std::uint64_t seed,
                        const std::vector<EstimatorKind>& estimators,
                        int threads = 1, bool keep_losses = false);

/// Fixed schema: scenario,p,estimator,risk,se,n_reps,seed with 10
/// significant digits; byte-identical across reruns of the same request.
void emit_csv(const RiskReport& report, std::ostream& out);
void emit_csv(const RiskReport& report, const std::string& path);

}  // namespace qvshrink
