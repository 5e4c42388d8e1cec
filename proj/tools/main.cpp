#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "qvshrink/baseball.hpp"
#include "qvshrink/csv.hpp"
#include "qvshrink/estimators.hpp"
#include "qvshrink/families.hpp"
#include "qvshrink/sim.hpp"

namespace {

using namespace qvshrink;

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require_readable(const std::string& path) {
  if (!std::filesystem::exists(path)) {
    throw UsageError("input file '" + path + "' does not exist");
  }
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
  return out;
}

std::vector<int> parse_p_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw UsageError("bad p value '" + item + "'");
    }
  }
  if (out.empty()) throw UsageError("empty p list");
  return out;
}

std::vector<EstimatorKind> parse_estimator_list(const std::string& text) {
  std::vector<EstimatorKind> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_estimator(item));
  return out;
}

int default_threads() {
  if (const char* env = std::getenv("SHRINKAGE_URE_THREADS")) {
    try {
      return std::max(1, std::stoi(env));
    } catch (const std::exception&) {
      throw UsageError("SHRINKAGE_URE_THREADS is not an integer");
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

Dataset load_ytau(const std::string& path, const Family& family) {
  require_readable(path);
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line) ||
      csv::split(line) != std::vector<std::string>{"y", "tau"}) {
    throw UsageError("input '" + path + "' must start with header y,tau");
  }
  std::vector<double> y, tau;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = csv::split(line);
    if (fields.size() != 2) {
      throw UsageError("line " + std::to_string(line_no) + ": expected y,tau");
    }
    y.push_back(csv::parse_double(fields[0], line_no));
    tau.push_back(csv::parse_double(fields[1], line_no));
  }
  if (y.empty()) throw UsageError("input '" + path + "' has no data rows");
  const auto n = static_cast<Eigen::Index>(y.size());
  return Dataset(Eigen::Map<VectorXd>(y.data(), n),
                 Eigen::Map<VectorXd>(tau.data(), n), family);
}

struct SimulateArgs {
  std::string scenario;
  std::string p_list = "500";
  int reps = 10000;
  std::uint64_t seed = 0;
  std::string estimators;
  std::string out;
  int threads = 0;
};

int run_simulate(const SimulateArgs& args) {
  const ScenarioSpec spec = make_scenario(args.scenario);
  const auto p_list = parse_p_list(args.p_list);
  const auto kinds = args.estimators.empty() ? default_estimators(spec)
                                             : parse_estimator_list(args.estimators);
  const int threads = args.threads > 0 ? args.threads : default_threads();
  const RiskReport report =
      run_scenario(spec, p_list, args.reps, args.seed, kinds, threads);
  if (args.out.empty() || args.out == "-") {
    emit_csv(report, std::cout);
  } else {
    emit_csv(report, args.out);
  }
  return 0;
}

struct FitArgs {
  std::string input;
  std::string family;
  std::string method = "sm";
  int mu_grid = 201;
  bool js_literal = false;
  std::string out;
};

int run_fit(const FitArgs& args) {
  const Family family = Family::parse(args.family);
  const Dataset data = load_ytau(args.input, family);

  FitResult fit;
  if (args.method == "js" && args.js_literal) {
    fit = fit_james_stein(data, true);
  } else {
    const EstimatorKind kind = parse_estimator(args.method);
    if (kind == EstimatorKind::kOracle) {
      throw UsageError("oracle estimator needs the true means; simulation-only");
    }
    fit = kind == EstimatorKind::kSemi ? fit_semi(data, args.mu_grid)
                                       : run_estimator(kind, data);
  }

  std::ostringstream body;
  char buf[256];
  body << "# method=" << args.method << " family=" << family.name() << " p="
       << data.size() << "\n";
  if (const ParamRule* rule = fit.param_rule()) {
    std::snprintf(buf, sizeof buf, "# gamma=%.17g mu=%.17g\n", rule->gamma,
                  rule->mu);
    body << buf;
  } else if (const SemiRule* rule = fit.semi_rule()) {
    std::snprintf(buf, sizeof buf, "# mu=%.17g\n", rule->mu);
    body << buf;
  }
  if (fit.objective) {
    std::snprintf(buf, sizeof buf, "# ure=%.17g\n", *fit.objective);
    body << buf;
  }
  body << "index,y,tau,b,theta_hat\n";
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    std::string b_field;
    if (const ParamRule* rule = fit.param_rule()) {
      std::snprintf(buf, sizeof buf, "%.17g", rule->shrink(data.tau[i]));
      b_field = buf;
    } else if (const SemiRule* rule = fit.semi_rule()) {
      std::snprintf(buf, sizeof buf, "%.17g", rule->b[i]);
      b_field = buf;
    }
    std::snprintf(buf, sizeof buf, "%lld,%.17g,%.17g,%s,%.17g\n",
                  static_cast<long long>(i), data.y[i], data.tau[i],
                  b_field.c_str(), fit.estimates[i]);
    body << buf;
  }

  if (args.out.empty() || args.out == "-") {
    std::cout << body.str();
  } else {
    auto out = open_output(args.out);
    out << body.str();
  }
  return 0;
}

struct BaseballArgs {
  std::string input;
  int min_n1 = 11;
  std::string groups = "all,pitchers,nonpitchers";
  std::string estimators = "naive,grand-mean,js,pg,pm,sg,sm";
  int mu_grid = 201;
  std::string out;
};

int run_eval_baseball(const BaseballArgs& args) {
  require_readable(args.input);
  const auto records = load_records(args.input);

  std::vector<PlayerGroup> groups;
  {
    std::stringstream ss(args.groups);
    std::string item;
    while (std::getline(ss, item, ',')) groups.push_back(parse_group(item));
  }
  const auto kinds = parse_estimator_list(args.estimators);
  const auto rows = evaluate(records, groups, kinds, args.min_n1, args.mu_grid);
  if (args.out.empty() || args.out == "-") {
    write_tse_csv(rows, std::cout);
  } else {
    auto out = open_output(args.out);
    write_tse_csv(rows, out);
  }
  return 0;
}

struct CheckArgs {
  std::string input;
  std::string family;
};

int run_check(const CheckArgs& args) {
  const Family family = Family::parse(args.family);
  const Dataset data = load_ytau(args.input, family);
  const RegularityReport report = check_regularity(data);
  for (const auto& check : report.checks) {
    if (check.pass) {
      std::cout << "PASS " << check.condition << "\n";
    } else {
      std::cout << "FAIL " << check.condition << " (offending indices:";
      for (std::size_t k = 0; k < check.offenders.size() && k < 20; ++k) {
        std::cout << ' ' << check.offenders[k];
      }
      if (check.offenders.size() > 20) std::cout << " ...";
      std::cout << ")\n";
    }
  }
  if (!report.all_pass()) {
    std::cout << "warning: diagnostics failed; estimators still run on such "
                 "data but the asymptotic guarantees may not apply\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shrinkage estimation of means in quadratic-variance families"};
  app.require_subcommand(1);

  SimulateArgs sim_args;
  CLI::App* sim = app.add_subcommand("simulate", "Run a Monte Carlo risk scenario");
  sim->add_option("--scenario", sim_args.scenario, "Scenario id (see --list)")
      ->required();
  sim->add_option("--p", sim_args.p_list, "Comma-separated sample sizes");
  sim->add_option("--reps", sim_args.reps, "Replications per p")
      ->check(CLI::PositiveNumber);
  sim->add_option("--seed", sim_args.seed, "Master seed");
  sim->add_option("--estimators", sim_args.estimators,
                  "Comma-separated estimator names (default per scenario)");
  sim->add_option("--out", sim_args.out, "Output CSV path ('-' = stdout)");
  sim->add_option("--threads", sim_args.threads,
                  "Worker threads (default: SHRINKAGE_URE_THREADS or all cores)");

  FitArgs fit_args;
  CLI::App* fit = app.add_subcommand("fit", "Fit an estimator to y,tau data");
  fit->add_option("--input", fit_args.input, "CSV with header y,tau")->required();
  fit->add_option("--family", fit_args.family,
                  "binomial|poisson|neg-binomial|gamma:<a>|ghs:<a>|normal|"
                  "laplace|logistic|t:<df>|uniform-ls:<s>")
      ->required();
  fit->add_option("--method", fit_args.method,
                  "naive|grand-mean|js|sm|sg|pm|pg|eb-ml|eb-mm");
  fit->add_option("--mu-grid", fit_args.mu_grid, "Grid size for the sm mu search")
      ->check(CLI::Range(2, 1000000));
  fit->add_flag("--js-literal", fit_args.js_literal,
                "With --method js: use the non-equivariant printed form");
  fit->add_option("--out", fit_args.out, "Output path ('-' = stdout)");

  BaseballArgs bb_args;
  CLI::App* bb = app.add_subcommand("eval-baseball",
                                    "Half-season prediction protocol");
  bb->add_option("--input", bb_args.input, "CSV player,pitcher,H1,N1,H2,N2")
      ->required();
  bb->add_option("--min-n1", bb_args.min_n1, "At-bat eligibility threshold")
      ->check(CLI::PositiveNumber);
  bb->add_option("--groups", bb_args.groups, "all,pitchers,nonpitchers subset");
  bb->add_option("--estimators", bb_args.estimators, "Estimators to score");
  bb->add_option("--mu-grid", bb_args.mu_grid, "Grid size for the sm mu search");
  bb->add_option("--out", bb_args.out, "Output path ('-' = stdout)");

  CheckArgs check_args;
  CLI::App* chk = app.add_subcommand("check", "Regularity diagnostics for a dataset");
  chk->add_option("--input", check_args.input, "CSV with header y,tau")->required();
  chk->add_option("--family", check_args.family, "Family spec (see fit)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (sim->parsed()) return run_simulate(sim_args);
    if (fit->parsed()) return run_fit(fit_args);
    if (bb->parsed()) return run_eval_baseball(bb_args);
    if (chk->parsed()) return run_check(check_args);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
