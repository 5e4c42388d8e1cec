#include "qvshrink/baseball.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "qvshrink/compensated.hpp"
#include "qvshrink/csv.hpp"

namespace qvshrink {

std::vector<PlayerRecord> load_records(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("player file: empty input");
  }
  if (csv::split(line) !=
      std::vector<std::string>{"player", "pitcher", "H1", "N1", "H2", "N2"}) {
    throw std::runtime_error("player file: expected header player,pitcher,H1,N1,H2,N2");
  }
  std::vector<PlayerRecord> records;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = csv::split(line);
    if (fields.size() != 6) {
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": expected 6 fields, got " +
                               std::to_string(fields.size()));
    }
    PlayerRecord rec;
    rec.player = fields[0];
    const long pitcher = csv::parse_long(fields[1], line_no);
    if (pitcher != 0 && pitcher != 1) {
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": pitcher flag must be 0 or 1");
    }
    rec.pitcher = pitcher == 1;
    rec.h1 = static_cast<int>(csv::parse_long(fields[2], line_no));
    rec.n1 = static_cast<int>(csv::parse_long(fields[3], line_no));
    rec.h2 = static_cast<int>(csv::parse_long(fields[4], line_no));
    rec.n2 = static_cast<int>(csv::parse_long(fields[5], line_no));
    if (rec.h1 < 0 || rec.n1 < 0 || rec.h1 > rec.n1 || rec.h2 < 0 ||
        rec.n2 < 0 || rec.h2 > rec.n2) {
      throw std::runtime_error("player " + rec.player +
                               ": hits must satisfy 0 <= H <= N in both halves");
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<PlayerRecord> load_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open player file '" + path + "'");
  return load_records(in);
}

double arcsin_transform(int h, int n) {
  return std::asin(std::sqrt((h + 0.25) / (n + 0.5)));
}

HalfSeasonData transform_records(const std::vector<PlayerRecord>& records,
                                 int min_n1) {
  std::vector<const PlayerRecord*> kept;
  for (const auto& rec : records) {
    if (rec.n1 >= min_n1) kept.push_back(&rec);
  }
  if (kept.empty()) {
    throw std::runtime_error("no players with N1 >= " + std::to_string(min_n1));
  }
  const auto p = static_cast<Eigen::Index>(kept.size());
  VectorXd yb(p), taub(p), x1(p), taun(p), x2(p), n2(p);
  std::vector<std::string> players(kept.size());
  std::vector<bool> eval_mask(kept.size());
  for (Eigen::Index j = 0; j < p; ++j) {
    const PlayerRecord& rec = *kept[j];
    players[j] = rec.player;
    yb[j] = static_cast<double>(rec.h1) / rec.n1;
    taub[j] = rec.n1;
    x1[j] = arcsin_transform(rec.h1, rec.n1);
    taun[j] = 4.0 * rec.n1;
    x2[j] = arcsin_transform(rec.h2, rec.n2);
    n2[j] = rec.n2;
    eval_mask[j] = rec.n2 >= min_n1;
  }
  return HalfSeasonData{std::move(players),
                        Dataset(yb, taub, Family::binomial()),
                        Dataset(x1, taun, Family::normal()),
                        std::move(eval_mask),
                        std::move(x2),
                        std::move(n2)};
}

double tse(const VectorXd& estimates, const VectorXd& x2, const VectorXd& n2) {
  if (estimates.size() != x2.size() || x2.size() != n2.size()) {
    throw std::invalid_argument("tse: estimate/evaluation lengths differ");
  }
  CompensatedSum acc;
  for (Eigen::Index j = 0; j < x2.size(); ++j) {
    const double d = x2[j] - estimates[j];
    acc.add(d * d - 1.0 / (4.0 * n2[j]));
  }
  return acc.value();
}

double tse(const VectorXd& estimates_all, const HalfSeasonData& data) {
  if (estimates_all.size() != static_cast<Eigen::Index>(data.eval_mask.size())) {
    throw std::invalid_argument("tse: estimates not aligned with fitted players");
  }
  std::vector<double> est, x2, n2;
  for (std::size_t j = 0; j < data.eval_mask.size(); ++j) {
    if (!data.eval_mask[j]) continue;
    est.push_back(estimates_all[static_cast<Eigen::Index>(j)]);
    x2.push_back(data.x2[static_cast<Eigen::Index>(j)]);
    n2.push_back(data.n2[static_cast<Eigen::Index>(j)]);
  }
  const auto wrap = [](const std::vector<double>& v) {
    return Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  };
  return tse(wrap(est), wrap(x2), wrap(n2));
}

std::string group_name(PlayerGroup group) {
  switch (group) {
    case PlayerGroup::kAll: return "all";
    case PlayerGroup::kPitchers: return "pitchers";
    case PlayerGroup::kNonPitchers: return "nonpitchers";
  }
  return "?";
}

PlayerGroup parse_group(const std::string& name) {
  if (name == "all") return PlayerGroup::kAll;
  if (name == "pitchers") return PlayerGroup::kPitchers;
  if (name == "nonpitchers") return PlayerGroup::kNonPitchers;
  throw std::invalid_argument("unknown group '" + name +
                              "' (valid: all, pitchers, nonpitchers)");
}

namespace {

bool fits_on_counts(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::kSemi:
    case EstimatorKind::kSemiGrand:
    case EstimatorKind::kParam:
    case EstimatorKind::kParamGrand:
    case EstimatorKind::kEbMl:
    case EstimatorKind::kEbMm:
      return true;
    default:
      return false;
  }
}

VectorXd estimate_group(EstimatorKind kind, const HalfSeasonData& data,
                        int mu_grid_size) {
  if (kind == EstimatorKind::kOracle) {
    throw std::invalid_argument("oracle estimator is simulation-only");
  }
  if (!fits_on_counts(kind)) {
    return run_estimator(kind, data.normal).estimates;
  }
  FitResult fit;
  switch (kind) {
    case EstimatorKind::kSemi: fit = fit_semi(data.binomial, mu_grid_size); break;
    default: fit = run_estimator(kind, data.binomial); break;
  }
  VectorXd mapped(fit.estimates.size());
  for (Eigen::Index j = 0; j < fit.estimates.size(); ++j) {
    mapped[j] = std::asin(std::sqrt(fit.estimates[j]));
  }
  return mapped;
}

}  // namespace

std::vector<TseRow> evaluate(const std::vector<PlayerRecord>& records,
                             const std::vector<PlayerGroup>& groups,
                             const std::vector<EstimatorKind>& estimators,
                             int min_n1, int mu_grid_size) {
  std::vector<TseRow> rows;
  for (PlayerGroup group : groups) {
    std::vector<PlayerRecord> subset;
    for (const auto& rec : records) {
      const bool in_group = group == PlayerGroup::kAll ||
                            (group == PlayerGroup::kPitchers) == rec.pitcher;
      if (in_group) subset.push_back(rec);
    }
    const HalfSeasonData data = transform_records(subset, min_n1);
    const double naive_tse = tse(data.normal.y, data);
    for (EstimatorKind kind : estimators) {
      const double value =
          kind == EstimatorKind::kNaive
              ? naive_tse
              : tse(estimate_group(kind, data, mu_grid_size), data);
      rows.push_back({group, kind, value, value / naive_tse});
    }
  }
  return rows;
}

void write_tse_csv(const std::vector<TseRow>& rows, std::ostream& out) {
  out << "group,estimator,tse_ratio\n";
  char buf[96];
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof buf, "%s,%s,%.3f\n", group_name(row.group).c_str(),
                  estimator_name(row.estimator).c_str(), row.ratio);
    out << buf;
  }
}

}  // namespace qvshrink
