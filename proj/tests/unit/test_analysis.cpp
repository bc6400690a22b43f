#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "support.hpp"
#include "tailsearch/analysis.hpp"
#include "tailsearch/errors.hpp"
#include "tailsearch/verify.hpp"

using namespace tailsearch;
using testutil::random_distribution;

namespace {

const SuccessDistribution kTable1{{0.8, 0.1, 0.05, 0.03, 0.02}};

Selection d1_twice() { return Selection(5, 2, {{0, 0}, {1, 0}}); }
Selection d1_d2() { return Selection(5, 2, {{0, 0}, {0, 1}}); }

Selection random_valid_selection(std::size_t n, std::size_t r, std::mt19937_64& rng) {
  std::vector<std::size_t> counts(n);
  for (auto& c : counts) c = rng() % (r + 1);
  return selection_from_counts(counts, r);
}

}  // namespace

TEST_CASE("table 1 values") {
  CHECK(std::abs(sp_closed_form(kTable1, d1_twice(), 0.05).value - 0.798) <= 1e-12);
  CHECK(std::abs(sp_closed_form(kTable1, d1_d2(), 0.05).value - 0.855) <= 1e-12);
  CHECK(std::abs(sp_closed_form(kTable1, d1_twice(), 0.2).value - 0.768) <= 1e-12);
  CHECK(std::abs(sp_closed_form(kTable1, d1_d2(), 0.2).value - 0.72) <= 1e-12);
  CHECK(sp_closed_form(kTable1, d1_d2(), 0.05).method == SpMethod::ClosedForm);
}

TEST_CASE("closed form boundaries and errors") {
  auto s = Selection(5, 3, {{0, 0}, {1, 0}, {0, 2}});
  CHECK(sp_closed_form(kTable1, s, 0.0).value == doctest::Approx(0.85));
  CHECK(sp_closed_form(kTable1, s, 1.0).value == 0.0);
  CHECK_THROWS_AS(sp_closed_form(kTable1, Selection(5, 2, {{1, 0}}), 0.1), InvalidSelectionError);
  CHECK_THROWS_AS(sp_closed_form(kTable1, Selection(4, 2, {{0, 0}}), 0.1), InvalidSelectionError);
}

TEST_CASE("closed form equals the per-shard form") {
  std::mt19937_64 rng(77);
  for (int i = 0; i < 2000; ++i) {
    const std::size_t n = 1 + rng() % 10, r = 1 + rng() % 4;
    auto d = random_distribution(n, rng);
    auto s = random_valid_selection(n, r, rng);
    const double f = std::uniform_real_distribution<double>(0, 1)(rng);
    const auto counts = s.replica_counts();
    CHECK(std::abs(sp_closed_form(d, s, f).value - sp_per_shard(d, counts, f)) <= 1e-12);
  }
}

TEST_CASE("closed form is monotone") {
  std::mt19937_64 rng(78);
  for (int i = 0; i < 300; ++i) {
    const std::size_t n = 1 + rng() % 8, r = 1 + rng() % 3;
    auto d = random_distribution(n, rng);
    auto s = random_valid_selection(n, r, rng);
    double prev = 2.0;
    for (int k = 0; k <= 20; ++k) {
      const double v = sp_closed_form(d, s, 0.05 * k).value;
      CHECK(v <= prev + 1e-15);
      prev = v;
    }
    // growing the selection never lowers SP
    auto counts = s.replica_counts();
    const std::size_t j = rng() % n;
    if (counts[j] < r) {
      const double before = sp_per_shard(d, counts, 0.3);
      counts[j]++;
      CHECK(sp_per_shard(d, counts, 0.3) >= before);
    }
  }
}

TEST_CASE("monte carlo edge cases") {
  std::vector<SuccessDistribution> dists = {kTable1};
  auto s = d1_d2();
  auto zero = sp_monte_carlo(dists, s, 0.0, DeploymentKind::Replication, 1000, 3);
  CHECK(zero.method == SpMethod::MonteCarlo);
  CHECK(zero.trials == 1000);
  CHECK(zero.value == doctest::Approx(0.9).epsilon(0.05));
  CHECK(sp_monte_carlo(dists, s, 1.0, DeploymentKind::Replication, 1000, 3).value == 0.0);

  // f = 0 and a distribution with all mass selected: every trial succeeds
  std::vector<SuccessDistribution> point = {{{1.0, 0.0}}};
  CHECK(sp_monte_carlo(point, Selection(2, 1, {{0, 0}}), 0.0, DeploymentKind::Replication, 500, 1)
            .value == 1.0);

  auto a = sp_monte_carlo(dists, s, 0.3, DeploymentKind::Replication, 20000, 5);
  auto b = sp_monte_carlo(dists, s, 0.3, DeploymentKind::Replication, 20000, 5);
  CHECK(a.value == b.value);
  CHECK(a.standard_error == doctest::Approx(std::sqrt(a.value * (1 - a.value) / 20000)));
}

TEST_CASE("monte carlo agrees with the closed form") {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 20; ++i) {
    const std::size_t n = 2 + rng() % 6, r = 1 + rng() % 3;
    std::vector<SuccessDistribution> d = {random_distribution(n, rng)};
    auto s = random_valid_selection(n, r, rng);
    const double f = std::uniform_real_distribution<double>(0, 0.9)(rng);
    auto mc = sp_monte_carlo(d, s, f, DeploymentKind::Replication, 50000, i);
    const double cf = sp_closed_form(d[0], s, f).value;
    const double se = std::max(mc.standard_error, std::sqrt(cf * (1 - cf) / 50000));
    CHECK(std::abs(mc.value - cf) <= 4 * se + 1e-12);
  }
}

TEST_CASE("repartition monte carlo with one partition matches replication") {
  std::vector<SuccessDistribution> d = {kTable1};
  auto s = Selection(5, 1, {{0, 0}, {0, 1}});
  auto mc = sp_monte_carlo(d, s, 0.1, DeploymentKind::Repartition, 50000, 2);
  CHECK(std::abs(mc.value - 0.81) <= 4 * mc.standard_error);
}

TEST_CASE("brute force finds the table 1 optimum") {
  auto a = brute_force_best_selection(kTable1, 0.05, 2, 2);
  CHECK(a.selection.replica_counts() == std::vector<std::size_t>{1, 1, 0, 0, 0});
  CHECK(a.sp.value == doctest::Approx(0.855).epsilon(1e-12));
  auto b = brute_force_best_selection(kTable1, 0.2, 2, 2);
  CHECK(b.selection.replica_counts() == std::vector<std::size_t>{2, 0, 0, 0, 0});
  CHECK(b.sp.value == doctest::Approx(0.768).epsilon(1e-12));
  auto c = brute_force_best_selection({{0.8, 0.2}}, 0.5, 2, 2);
  CHECK(c.selection.replica_counts() == std::vector<std::size_t>{2, 0});
  CHECK(c.sp.value == doctest::Approx(0.6));

  CHECK_THROWS_AS(brute_force_best_selection(uniform_distribution(40), 0.1, 3, 30),
                  InstanceTooLargeError);
  CHECK(binomial_coefficient(5, 2) == 10.0);
  CHECK(binomial_coefficient(3, 5) == 0.0);
}

TEST_CASE("rSmartRed reaches the brute-force optimum") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = 1 + rng() % 6, r = 1 + rng() % 3;
    auto d = random_distribution(n, rng);
    const double f = 0.05 * static_cast<double>(rng() % 20);
    for (std::size_t budget = 1; budget <= n * r; ++budget) {
      const double best = brute_force_best_selection(d, f, r, budget).sp.value;
      const double smart = sp_closed_form(d, select_rsmartred(d, f, r, budget), f).value;
      CHECK(std::abs(best - smart) <= 1e-12);
    }
  }
}

TEST_CASE("replication versus repartition") {
  auto [rep1, part1] = compare_replication_repartition(kTable1, 0.2, 1, 3, 50000, 4);
  CHECK(std::abs(rep1.value - part1.value) <= 4 * part1.standard_error);

  auto [rep0, part0] = compare_replication_repartition(kTable1, 0.0, 3, 6, 20000, 4);
  CHECK(part0.value >= rep0.value - 1e-12);

  for (double f : {0.05, 0.1, 0.2}) {
    auto [rep, part] = compare_replication_repartition(kTable1, f, 3, 6, 50000, 9);
    CHECK(part.value >= rep.value - 3 * part.standard_error);
  }
}

TEST_CASE("quick verification passes and the fault is caught") {
  auto options = VerifyOptions::quick();
  auto reports = run_verification(options);
  REQUIRE(reports.size() == 4);
  for (const auto& r : reports) {
    CHECK_MESSAGE(r.passed, r.name << ": " << r.counterexample);
    CHECK(r.cases > 0);
  }
  options.inject_exponent_fault = true;
  auto faulty = verify_optimality(options);
  CHECK_FALSE(faulty.passed);
  CHECK_FALSE(faulty.counterexample.empty());
  std::ostringstream out;
  print_report(out, {faulty});
  CHECK(out.str().find("FAIL") != std::string::npos);
}
