#include <doctest.h>

#include <cmath>
#include <map>
#include <numeric>

#include "umsa/errors.hpp"
#include "umsa/laws.hpp"

using namespace umsa;

TEST_CASE("step schedule values") {
  const StepSchedule s(1.0, 0.0, 1.0);
  CHECK(s(1) == doctest::Approx(1.0));
  CHECK(s(10) == doctest::Approx(0.1));
  const StepSchedule t(0.5, 0.0, 0.6);
  CHECK(t(100) == doctest::Approx(0.5 * std::pow(100.0, -0.6)).epsilon(1e-14));
  CHECK(t(100) == doctest::Approx(0.03154786722400966).epsilon(1e-12));
  const StepSchedule shifted(2.0, 3.0, 1.0);
  CHECK(shifted(1) == doctest::Approx(0.5));
  CHECK(StepSchedule::zero()(7) == 0.0);
  CHECK(step_size(s, 4) == doctest::Approx(0.25));
}

TEST_CASE("step schedule rejects invalid parameters") {
  CHECK_THROWS_AS(StepSchedule(0.0, 0.0, 1.0), ConfigError);
  CHECK_THROWS_AS(StepSchedule(1.0, -1.0, 1.0), ConfigError);
  CHECK_THROWS_AS(StepSchedule(1.0, 0.0, 0.5), ConfigError);
  CHECK_THROWS_AS(StepSchedule(1.0, 0.0, 1.2), ConfigError);
}

TEST_CASE("step schedule sums diverge while squares converge") {
  const StepSchedule s(1.0, 0.0, 0.75);
  double sum = 0.0;
  double sq = 0.0;
  for (std::int64_t n = 1; n <= 1'000'000; ++n) {
    sum += s(n);
    sq += s(n) * s(n);
  }
  CHECK(sum > 100.0);
  CHECK(sq < 4.0);
}

TEST_CASE("level law ratios") {
  const LevelLaw law(2, 9, 0.5);
  double total = 0.0;
  for (int l = 2; l <= 9; ++l) total += law.pmf(l);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
  for (int l = 2; l < 9; ++l) CHECK(law.pmf(l + 1) / law.pmf(l) == doctest::Approx(std::pow(2.0, -0.5)));
  CHECK(law.pmf(1) == 0.0);
  CHECK(law.pmf(10) == 0.0);
  const LevelLaw scaled(2, 9, 0.5, 2.0 * M_PI);
  for (int l = 2; l <= 9; ++l) CHECK(scaled.pmf(l) == doctest::Approx(law.pmf(l)));
  const LevelLaw single(4, 4, 0.5);
  CHECK(single.pmf(4) == 1.0);
  CHECK_THROWS_AS(LevelLaw(5, 4, 0.5), ConfigError);
}

TEST_CASE("iteration law weights") {
  const PLaw law(12);
  auto w = [](int p) { return std::pow(2.0, -p) * (p + 1) * std::pow(std::log2(p + 2.0), 2); };
  double z = 0.0;
  for (int p = 0; p <= 12; ++p) z += w(p);
  CHECK(law.pmf(2) == doctest::Approx(w(2) / z).epsilon(1e-14));
  CHECK(w(2) == doctest::Approx(0.75 * 4.0));
  for (int p = 0; p <= 12; ++p) CHECK(PLaw::unnormalized_weight(p) == doctest::Approx(w(p)));
  CHECK(law.pmf(13) == 0.0);
  CHECK(iterations(0) == 1);
  CHECK(iterations(10) == 1024);
  CHECK_THROWS_AS(PLaw(-1), ConfigError);
  CHECK_THROWS_AS(PLaw(PLaw::kMaxSupported + 1), ConfigError);
}

TEST_CASE("categorical sampling frequencies") {
  const std::vector<double> pmf{0.1, 0.2, 0.3, 0.4};
  Rng rng{42};
  std::vector<int> counts(4, 0);
  const int n = 200'000;
  for (int i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(sample_categorical(pmf, rng))];
  for (std::size_t k = 0; k < 4; ++k) {
    const double se = std::sqrt(pmf[k] * (1 - pmf[k]) / n);
    CHECK(std::abs(counts[k] / static_cast<double>(n) - pmf[k]) < 4 * se);
  }
  Rng a{5};
  Rng b{5};
  for (int i = 0; i < 100; ++i) CHECK(sample_categorical(pmf, a, 3) == sample_categorical(pmf, b, 3));
  CHECK_THROWS_AS(sample_categorical(std::vector<double>{0.5, 0.4}, rng), ConfigError);
  CHECK_THROWS_AS(sample_categorical(std::vector<double>{1.5, -0.5}, rng), ConfigError);
}

TEST_CASE("discrete law sampler matches its pmf") {
  const DiscreteLaw law(3, {1.0, 3.0, 0.0001, 4.0});
  CHECK(law.pmf(3) == doctest::Approx(1.0 / 8.0001));
  CHECK(law.pmf(7) == 0.0);
  CHECK(law.min() == 3);
  CHECK(law.max() == 6);
  Rng rng{9};
  std::map<int, int> counts;
  for (int i = 0; i < 80'000; ++i) ++counts[law.sample(rng)];
  CHECK(counts.count(7) == 0);
  CHECK(counts[6] / 80'000.0 == doctest::Approx(0.5).epsilon(0.02));
  CHECK_THROWS_AS(DiscreteLaw(0, {1.0, 0.0}), ConfigError);
}

TEST_CASE("cost ledger accumulates") {
  CostLedger a;
  a.add(1.5);
  CostLedger b;
  b.add(2.0);
  a.add(b);
  CHECK(a.units() == 3.5);
  CHECK_THROWS(a.add(-1.0));
}

TEST_CASE("rng streams are reproducible and split independently") {
  Rng a{11, 2};
  Rng b{11, 2};
  for (int i = 0; i < 10; ++i) CHECK(a.normal() == b.normal());
  Rng c{11, 3};
  CHECK(a.uniform() != c.uniform());
  Rng d{7};
  Rng e{7};
  Rng s = d.split(1);
  (void)s.uniform();
  CHECK(d.uniform() == e.uniform());
  const SeedPlan plan{123};
  Rng r0 = plan.stream(0);
  Rng r0b = plan.stream(0);
  CHECK(r0.uniform() == r0b.uniform());
  CHECK(plan.child_seed(4, 1) != plan.child_seed(4, 2));
  CHECK(plan.child_seed(4, 1) == SeedPlan{123}.child_seed(4, 1));
}
