#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "qvshrink/baseball.hpp"

using namespace qvshrink;

namespace {

std::vector<PlayerRecord> parse(const std::string& text) {
  std::istringstream in(text);
  return load_records(in);
}

const char* kHeader = "player,pitcher,H1,N1,H2,N2\n";

}  // namespace

TEST_CASE("arcsin transform values and bounds") {
  // direct evaluation: arcsin sqrt(25.25/100.5) = 0.5250337833616429
  CHECK(arcsin_transform(25, 100) == doctest::Approx(0.5250337833616429).epsilon(1e-12));
  CHECK(arcsin_transform(0, 11) > 0.0);
  CHECK(arcsin_transform(11, 11) < M_PI / 2.0);
  // strictly increasing in hits for fixed at-bats
  for (int h = 1; h <= 50; ++h) {
    CHECK(arcsin_transform(h, 50) > arcsin_transform(h - 1, 50));
  }
}

TEST_CASE("record loading") {
  SUBCASE("three clean rows parse") {
    const auto recs = parse(std::string(kHeader) +
                            "a,0,10,40,12,35\n"
                            "b,1,3,20,2,15\n"
                            "c,0,25,100,30,110\n");
    REQUIRE(recs.size() == 3);
    CHECK(recs[0].player == "a");
    CHECK(recs[1].pitcher);
    CHECK(recs[2].n2 == 110);
  }
  SUBCASE("hits above at-bats name the player") {
    CHECK_THROWS_WITH_AS(parse(std::string(kHeader) + "bad,0,41,40,0,0\n"),
                         doctest::Contains("bad"), std::runtime_error);
  }
  SUBCASE("parse errors name the line") {
    CHECK_THROWS_WITH_AS(parse(std::string(kHeader) + "a,0,x,40,0,0\n"),
                         doctest::Contains("line 2"), std::runtime_error);
    CHECK_THROWS_AS(parse("nope,pitcher,H1,N1,H2,N2\na,0,1,2,3,4\n"),
                    std::runtime_error);
    CHECK_THROWS_AS(parse(std::string(kHeader) + "a,0,1,2\n"), std::runtime_error);
  }
}

TEST_CASE("transform_records filters and builds both datasets") {
  const auto recs = parse(std::string(kHeader) +
                          "keep,0,30,100,20,80\n"
                          "small,0,2,5,1,9\n"
                          "noeval,0,10,40,1,5\n");
  const HalfSeasonData data = transform_records(recs, 11);
  REQUIRE(data.players.size() == 2);  // "small" dropped: N1 = 5 < 11
  CHECK(data.players[0] == "keep");
  CHECK(data.players[1] == "noeval");
  CHECK(data.eval_mask[0]);
  CHECK_FALSE(data.eval_mask[1]);  // N2 = 5 < 11
  CHECK(data.binomial.y[0] == doctest::Approx(0.30));
  CHECK(data.binomial.tau[0] == 100.0);
  CHECK(data.normal.y[0] == doctest::Approx(arcsin_transform(30, 100)));
  CHECK(data.normal.tau[0] == 400.0);
  for (Eigen::Index j = 0; j < 2; ++j) {
    CHECK(data.normal.y[j] > 0.0);
    CHECK(data.normal.y[j] < M_PI / 2.0);
  }
  CHECK_THROWS_WITH_AS(transform_records(recs, 1000), doctest::Contains("N1"),
                       std::runtime_error);
}

TEST_CASE("tse algebra") {
  SUBCASE("perfect prediction leaves only the negative correction") {
    VectorXd x2(3), n2(3);
    x2 << 0.5, 0.6, 0.7;
    n2 << 20, 30, 40;
    const double value = tse(x2, x2, n2);
    CHECK(value ==
          doctest::Approx(-(1.0 / 80 + 1.0 / 120 + 1.0 / 160)).epsilon(1e-12));
    CHECK(value < 0.0);
  }
  SUBCASE("single player displacement") {
    VectorXd est(1), x2(1), n2(1);
    est << 0.55;
    x2 << 0.5;
    n2 << 25;
    const double d = 0.05;
    CHECK(tse(est, x2, n2) ==
          doctest::Approx(d * d - 1.0 / 100.0).epsilon(1e-10));
  }
  SUBCASE("misaligned lengths are rejected") {
    VectorXd a(2), b(3);
    a << 1, 2;
    b << 1, 2, 3;
    CHECK_THROWS_AS(tse(a, b, b), std::invalid_argument);
  }
}

TEST_CASE("evaluate: naive self-ratio is one and grand mean matches hand math") {
  const auto recs = parse(std::string(kHeader) +
                          "a,0,30,100,20,80\n"
                          "b,0,25,90,30,100\n"
                          "c,0,10,50,5,40\n"
                          "d,0,3,12,1,5\n");
  const auto rows =
      evaluate(recs, {PlayerGroup::kAll},
               {EstimatorKind::kNaive, EstimatorKind::kGrandMean}, 11);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].ratio == doctest::Approx(1.0).epsilon(1e-15));

  // hand computation: all four players pass N1 >= 11; d is excluded from
  // evaluation (N2 = 5). Grand mean over the fitted players' X1.
  const double x1a = arcsin_transform(30, 100), x1b = arcsin_transform(25, 90),
               x1c = arcsin_transform(10, 50), x1d = arcsin_transform(3, 12);
  const double gm = (x1a + x1b + x1c + x1d) / 4.0;
  const double x2a = arcsin_transform(20, 80), x2b = arcsin_transform(30, 100),
               x2c = arcsin_transform(5, 40);
  const double corr = 1.0 / (4 * 80.0) + 1.0 / (4 * 100.0) + 1.0 / (4 * 40.0);
  const double tse_gm = (x2a - gm) * (x2a - gm) + (x2b - gm) * (x2b - gm) +
                        (x2c - gm) * (x2c - gm) - corr;
  const double tse_naive = (x2a - x1a) * (x2a - x1a) + (x2b - x1b) * (x2b - x1b) +
                           (x2c - x1c) * (x2c - x1c) - corr;
  CHECK(rows[1].ratio == doctest::Approx(tse_gm / tse_naive).epsilon(1e-12));
}

TEST_CASE("evaluate: group filtering and determinism") {
  const auto recs = parse(std::string(kHeader) +
                          "p1,1,10,60,12,55\n"
                          "p2,1,8,50,6,45\n"
                          "p3,1,12,70,10,65\n"
                          "p4,1,15,80,14,75\n"
                          "n1,0,30,100,28,95\n"
                          "n2,0,22,85,25,90\n"
                          "n3,0,28,95,30,105\n"
                          "n4,0,35,120,32,110\n");
  const std::vector<EstimatorKind> kinds = {EstimatorKind::kNaive,
                                            EstimatorKind::kSemiGrand};
  const auto all = evaluate(recs, {PlayerGroup::kAll}, kinds, 11);
  const auto pitchers = evaluate(recs, {PlayerGroup::kPitchers}, kinds, 11);
  const auto nonpitchers = evaluate(recs, {PlayerGroup::kNonPitchers}, kinds, 11);
  CHECK(all.size() == 2);
  CHECK(pitchers.size() == 2);
  CHECK(nonpitchers.size() == 2);
  // pitcher and nonpitcher rows come from disjoint data
  CHECK(pitchers[1].tse_value != nonpitchers[1].tse_value);

  const auto again = evaluate(recs, {PlayerGroup::kAll}, kinds, 11);
  CHECK(all[1].tse_value == again[1].tse_value);
  CHECK(all[1].ratio == again[1].ratio);

  CHECK_THROWS_AS(
      evaluate(recs, {PlayerGroup::kAll}, {EstimatorKind::kOracle}, 11),
      std::invalid_argument);
}

TEST_CASE("synthetic fixture reproduces its golden ratio table") {
  const std::string dir(QVSHRINK_TEST_DIR);
  const auto recs = load_records(dir + "/fixtures/players_synthetic.csv");
  REQUIRE(recs.size() == 50);
  const auto rows = evaluate(
      recs,
      {PlayerGroup::kAll, PlayerGroup::kPitchers, PlayerGroup::kNonPitchers},
      {EstimatorKind::kNaive, EstimatorKind::kGrandMean, EstimatorKind::kJamesStein,
       EstimatorKind::kParamGrand, EstimatorKind::kParam,
       EstimatorKind::kSemiGrand, EstimatorKind::kSemi},
      11);
  std::ostringstream out;
  write_tse_csv(rows, out);

  std::ifstream golden(dir + "/golden/baseball_synthetic.csv", std::ios::binary);
  REQUIRE(golden.good());
  std::stringstream want;
  want << golden.rdbuf();
  CHECK(out.str() == want.str());
}
