#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "helpers.hpp"
#include "umsa/errors.hpp"
#include "umsa/estimator.hpp"
#include "umsa/io.hpp"
#include "umsa/sir.hpp"

using namespace umsa;
using umsa::testing::ConstantGradientModel;

namespace {

UmsaConfig elliptic_umsa(int l_min, int l_max, int p_max) {
  UmsaConfig c;
  c.level_law = LevelLaw(l_min, l_max, 0.5);
  c.p_law = PLaw(p_max);
  c.schedule = StepSchedule(2000.0, 1000.0, 1.0);
  c.theta0 = Theta::Constant(1, 100.0);
  c.pcn = PcnParams::isotropic(0.95, 4.0, 2);
  return c;
}

struct Moments {
  double mean = 0.0;
  double se = 0.0;
};

Moments moments(const std::vector<double>& xs) {
  double m = 0.0;
  for (double x : xs) m += x;
  m /= static_cast<double>(xs.size());
  double v = 0.0;
  for (double x : xs) v += (x - m) * (x - m);
  v /= static_cast<double>(xs.size() - 1);
  return {m, std::sqrt(v / static_cast<double>(xs.size()))};
}

}  // namespace

TEST_CASE("base level with p = 0 is the one-step iterate over its weight") {
  const auto model = umsa::testing::elliptic_fixture();
  const UmsaConfig c = elliptic_umsa(3, 6, 5);
  Rng a{8};
  Rng b{8};
  const EstimateRecord rec = single_term_estimate_at(model, c, 3, 0, a);
  const MsaRun run = run_msa(model, c.msa_config(3, 1, 0), b);
  CHECK(rec.estimate(0) == doctest::Approx(run.theta(0) / (c.p_law.pmf(0) * c.level_law.pmf(3))).epsilon(1e-15));
  CHECK(rec.cost == doctest::Approx(run.cost));
}

TEST_CASE("degenerate laws with zero step return theta0") {
  const auto model = umsa::testing::elliptic_fixture();
  UmsaConfig c = elliptic_umsa(4, 4, 0);
  c.schedule = StepSchedule::zero();
  Rng rng{1};
  const EstimateRecord rec = single_term_estimate(model, c, rng);
  CHECK(rec.level == 4);
  CHECK(rec.p == 0);
  CHECK(rec.estimate(0) == 100.0);
}

TEST_CASE("weights reproduce the telescoping sum in a deterministic setting") {
  const ConstantGradientModel model(2.0);
  UmsaConfig c;
  c.level_law = LevelLaw(1, 3, 0.5);
  c.p_law = PLaw(3);
  c.schedule = StepSchedule(1.0, 0.0, 1.0);
  c.theta0 = Theta::Constant(1, 5.0);
  c.pcn = PcnParams::isotropic(0.5, 4.0, 2);
  double total = 0.0;
  for (int l = 1; l <= 3; ++l) {
    for (int p = 0; p <= 3; ++p) {
      Rng rng{static_cast<std::uint64_t>(10 * l + p)};
      const double w = c.level_law.pmf(l) * c.p_law.pmf(p);
      total += w * single_term_estimate_at(model, c, l, p, rng).estimate(0);
    }
  }
  double harmonic = 0.0;
  for (int n = 1; n <= 8; ++n) harmonic += 1.0 / n;
  CHECK(total == doctest::Approx(5.0 + 2.0 * harmonic).epsilon(1e-13));
}

TEST_CASE("branch costs") {
  const auto model = umsa::testing::elliptic_fixture();
  const UmsaConfig c = elliptic_umsa(3, 6, 5);
  Rng rng{2};
  const EstimateRecord coupled = single_term_estimate_at(model, c, 5, 3, rng);
  CHECK(coupled.cost == doctest::Approx(8.0 * (1.0 / model.mesh(5) + 1.0 / model.mesh(4))));
  const EstimateRecord base = single_term_estimate_at(model, c, 3, 3, rng);
  CHECK(base.cost == doctest::Approx(8.0 / model.mesh(3)));
  CHECK_THROWS_AS(single_term_estimate_at(model, c, 7, 0, rng), ConfigError);
}

TEST_CASE("base-level telescope matches direct runs in expectation") {
  const auto model = umsa::testing::elliptic_fixture();
  const UmsaConfig c = elliptic_umsa(5, 5, 4);
  const int n = 10'000;
  std::vector<double> single;
  std::vector<double> direct;
  for (int i = 0; i < n; ++i) {
    Rng rng = SeedPlan{71}.stream(static_cast<std::uint64_t>(i));
    single.push_back(single_term_estimate(model, c, rng).estimate(0));
    Rng other = SeedPlan{72}.stream(static_cast<std::uint64_t>(i));
    direct.push_back(run_msa(model, c.msa_config(5, iterations(4), 0), other).theta(0));
  }
  const Moments a = moments(single);
  const Moments b = moments(direct);
  CHECK(std::abs(a.mean - b.mean) < 3.0 * std::hypot(a.se, b.se));
}

TEST_CASE("averaged estimate reduction and determinism") {
  const auto model = umsa::testing::elliptic_fixture();
  const UmsaConfig c = elliptic_umsa(3, 7, 6);
  const auto one = averaged_estimate(model, c, 1, 5);
  CHECK(one.mean == one.records.front().estimate);
  const auto serial = averaged_estimate(model, c, 24, 5, 1);
  const auto threaded = averaged_estimate(model, c, 24, 5, 3);
  CHECK(serial.mean == threaded.mean);
  double cost = 0.0;
  Theta sum = Theta::Zero(1);
  for (std::size_t i = 0; i < serial.records.size(); ++i) {
    CHECK(serial.records[i].replicate == i);
    CHECK(serial.records[i].estimate == threaded.records[i].estimate);
    cost += serial.records[i].cost;
    sum += serial.records[i].estimate;
  }
  CHECK(serial.total_cost == doctest::Approx(cost));
  CHECK(serial.mean(0) == doctest::Approx(sum(0) / 24.0));
  Rng rng = SeedPlan{5}.stream(7);
  CHECK(single_term_estimate(model, c, rng).estimate == serial.records[7].estimate);
  CHECK_THROWS_AS(averaged_estimate(model, c, 0, 5), ConfigError);
}

TEST_CASE("failed replicates abort the average") {
  SirOptions opt;
  opt.observations = 5;
  opt.observation_offset = 10;
  const SirModel model(Eigen::VectorXd::Constant(5, 1.0), opt);  // y above any G: never admissible
  UmsaConfig c;
  c.level_law = LevelLaw(1, 2, 0.5);
  c.p_law = PLaw(2);
  c.schedule = StepSchedule(0.1, 10.0, 1.0);
  c.theta0 = (Theta(2) << 1.0, 0.2).finished();
  c.pcn = PcnParams::isotropic(0.9, 1.0, 3);
  c.max_init_retries = 5;
  CHECK_THROWS_AS(averaged_estimate(model, c, 3, 1), RunError);
}

TEST_CASE("records csv layout") {
  EstimateRecord r;
  r.estimate = (Theta(2) << 1.0 / 3.0, -2.5).finished();
  r.level = 4;
  r.p = 2;
  r.cost = 12.5;
  r.seconds = 0.25;
  r.replicate = 3;
  r.seed = 99;
  std::ostringstream out;
  write_records_csv(out, {r});
  std::istringstream in(out.str());
  const CsvTable t = read_csv(in);
  CHECK(t.header == std::vector<std::string>{"replicate", "seed", "l", "p", "cost", "seconds", "theta_1", "theta_2"});
  REQUIRE(t.rows.size() == 1);
  CHECK(std::stod(t.rows[0][t.column("theta_1")]) == 1.0 / 3.0);
  CHECK(t.rows[0][t.column("l")] == "4");
}
