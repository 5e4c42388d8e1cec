#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qvshrink/families.hpp"
#include "qvshrink/sim.hpp"

namespace qvshrink {

/// One player's half-season batting record: hits H and at-bats N per half.
struct PlayerRecord {
  std::string player;
  bool pitcher = false;
  int h1 = 0, n1 = 0;
  int h2 = 0, n2 = 0;
};

/// CSV with header player,pitcher,H1,N1,H2,N2. Parse failures name the
/// line; invariant violations (H > N, negatives) name the player.
std::vector<PlayerRecord> load_records(const std::string& path);
std::vector<PlayerRecord> load_records(std::istream& in);

/// arcsin sqrt((h + 1/4) / (n + 1/2)), mapping counts into (0, pi/2); the
/// transformed value is approximately N(arcsin sqrt(p), 1/(4n)).
double arcsin_transform(int h, int n);

/// First-half data prepared for estimation plus the second-half evaluation
/// targets, restricted to players with n1 >= min_n1. eval_mask marks the
/// subset also meeting n2 >= min_n1, which is what TSE sums over.
struct HalfSeasonData {
  std::vector<std::string> players;
  Dataset binomial;  // y = H1/N1, tau = N1
  Dataset normal;    // y = arcsin transform of half 1, tau = 4 N1
  std::vector<bool> eval_mask;
  VectorXd x2;  // arcsin transform of half 2, aligned with players
  VectorXd n2;
};

HalfSeasonData transform_records(const std::vector<PlayerRecord>& records,
                                 int min_n1 = 11);

/// Total squared prediction error against the transformed second half,
/// corrected for its sampling variance: sum (x2 - est)^2 - sum 1/(4 n2).
/// Inputs are aligned over the evaluation subset. May be negative.
double tse(const VectorXd& estimates, const VectorXd& x2, const VectorXd& n2);

/// TSE of estimates given for every fitted player, masked to the
/// evaluation subset.
double tse(const VectorXd& estimates_all, const HalfSeasonData& data);

enum class PlayerGroup { kAll, kPitchers, kNonPitchers };
std::string group_name(PlayerGroup group);
PlayerGroup parse_group(const std::string& name);

struct TseRow {
  PlayerGroup group;
  EstimatorKind estimator;
  double tse_value = 0.0;
  double ratio = 0.0;  // TSE relative to the naive predictor
};

/// Run the half-season protocol per group. Binomial-domain estimators (the
/// URE and EB fits) run on the raw counts and are mapped through
/// arcsin sqrt before scoring; naive, grand-mean and James-Stein run on the
/// transformed data directly.
std::vector<TseRow> evaluate(const std::vector<PlayerRecord>& records,
                             const std::vector<PlayerGroup>& groups,
                             const std::vector<EstimatorKind>& estimators,
                             int min_n1 = 11, int mu_grid_size = 201);

/// Columns group,estimator,tse_ratio with ratios to three decimals.
void write_tse_csv(const std::vector<TseRow>& rows, std::ostream& out);

}  // namespace qvshrink
