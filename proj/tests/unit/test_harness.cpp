#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "support.hpp"
#include "tailsearch/errors.hpp"
#include "tailsearch/harness.hpp"

using namespace tailsearch;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  SyntheticCorpusParams s;
  s.n_docs = 1200;
  s.vocab_size = 800;
  c.synthetic = s;
  c.n_queries = 30;
  c.k = 3;
  c.r = 2;
  c.t = {2};
  c.f = {0.0, 0.2};
  c.schemes = {Scheme::NoRed, Scheme::RFullRed, Scheme::RSmartRed, Scheme::PTop,
               Scheme::PSmartRed};
  c.deployments = {DeploymentKind::Replication, DeploymentKind::Repartition};
  c.m = 20;
  c.k_per_shard = 20;
  c.gamma = 100;
  c.seed = 3;
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("strata") {
  std::vector<SuccessDistribution> d = {{{0.92, 0.08}}, {{0.3, 0.7}}, {{0.6, 0.4}}, {{0.2, 0.8}}};
  d[1] = {{0.3, 0.3, 0.4}};
  auto m = stratify_queries(d);
  CHECK(m.at("Whole") == std::vector<std::size_t>{0, 1, 2, 3});
  CHECK(m.at("Skewed") == std::vector<std::size_t>{0, 2, 3});
  CHECK(m.at("MostSkewed") == std::vector<std::size_t>{0});

  std::vector<QueryStratum> zero = {{"Zero", 0.0}};
  CHECK(stratify_queries(d, zero).at("Zero").size() == d.size());

  std::mt19937_64 rng(4);
  std::vector<SuccessDistribution> many;
  for (int i = 0; i < 300; ++i) many.push_back(testutil::random_distribution(1 + rng() % 6, rng));
  auto s = stratify_queries(many);
  for (auto q : s.at("MostSkewed")) {
    CHECK(std::binary_search(s.at("Skewed").begin(), s.at("Skewed").end(), q));
  }
  CHECK(s.at("Whole").size() == many.size());
}

TEST_CASE("profile") {
  std::vector<SuccessDistribution> u(10, uniform_distribution(32));
  for (double v : profile_distribution(u, 5)) CHECK(v == doctest::Approx(1.0 / 32));
  std::vector<SuccessDistribution> one = {{{0.1, 0.6, 0.3}}};
  auto p = profile_distribution(one, 3);
  CHECK(p[0] == doctest::Approx(0.6));
  CHECK(p[1] == doctest::Approx(0.3));
  CHECK(p[2] == doctest::Approx(0.1));
  CHECK(profile_distribution(one, 5)[4] == 0.0);
  CHECK_THROWS_AS(profile_distribution(one, 0), Error);

  std::mt19937_64 rng(5);
  std::vector<SuccessDistribution> many;
  for (int i = 0; i < 100; ++i) many.push_back(testutil::random_distribution(8, rng));
  auto prof = profile_distribution(many, 8);
  for (std::size_t k = 1; k < prof.size(); ++k) CHECK(prof[k] <= prof[k - 1]);
}

TEST_CASE("experiment grid validation") {
  auto c = small_config();
  CHECK_NOTHROW(c.validate());
  auto bad = c;
  bad.t = {5};  // NoRed with t*r > n
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = c;
  bad.deployments = {DeploymentKind::Replication};  // pTop needs repartition
  try {
    bad.validate();
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "schemes");
  }
  bad = c;
  bad.schemes = {Scheme::RSmartRed};
  bad.t = {9};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = c;
  bad.f = {1.5};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = c;
  bad.synthetic.reset();
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("full-budget rSmartRed without misses is exact") {
  auto c = small_config();
  c.r = 1;
  c.t = {8};
  c.f = {0.0};
  c.schemes = {Scheme::RSmartRed};
  c.deployments = {DeploymentKind::Replication};
  auto table = run_experiment(c);
  REQUIRE(table.rows.size() == 1);
  CHECK(table.rows[0].recall_mean == 1.0);
  CHECK(table.rows[0].n_queries == 30);
}

TEST_CASE("experiment output is deterministic across thread counts") {
  auto c = small_config();
  std::ostringstream a, b, detail_a, detail_b;
  auto t1 = run_experiment(c);
  c.threads = 3;
  auto t3 = run_experiment(c);
  t1.write_csv(a);
  t3.write_csv(b);
  t1.write_detail_csv(detail_a);
  t3.write_detail_csv(detail_b);
  CHECK(a.str() == b.str());
  CHECK(detail_a.str() == detail_b.str());
  CHECK(a.str().rfind("scheme,deployment,f,t,r,budget,recall_mean,recall_std,n_queries,seed\n", 0) ==
        0);
  // NoRed, rFullRed and rSmartRed on both deployments, pTop and pSmartRed on one
  CHECK(t1.rows.size() == (3 * 2 + 2) * 2);
  CHECK(t1.find(Scheme::PTop, DeploymentKind::Replication, 0.0, 2) == nullptr);
  CHECK(t1.find(Scheme::PTop, DeploymentKind::Repartition, 0.2, 2) != nullptr);
}

TEST_CASE("figure suite") {
  auto c = small_config();
  Workbench bench(c);
  FigureSuiteOptions opt;
  opt.f_sweep = {0.0, 0.25, 0.5};
  opt.f_sweep_t = 2;
  opt.t_sweep = {1, 2, 4};
  opt.low_f_sweep = {0.0, 0.1};
  auto figs = run_figure_suite(bench, opt);
  std::vector<std::string> names;
  for (const auto& f : figs) names.push_back(f.name);
  CHECK(names == std::vector<std::string>{"fig4_profile", "fig5_uniform", "fig5_crcs",
                                          "fig6_profile", "fig7_whole", "fig7_skewed",
                                          "fig7_mostskewed", "fig8_uniform", "fig8_crcs",
                                          "fig9_f", "fig9_t"});
  for (const auto& f : figs) {
    for (const auto& row : f.table.rows) CHECK(row.figure == f.name);
  }
  // NoRed only where t*r <= n
  for (const auto& row : figs[8].table.rows) {
    if (row.scheme == Scheme::NoRed) CHECK(row.t * row.r <= 8);
  }

  const auto base = fs::temp_directory_path() / "tailsearch_harness_test";
  fs::remove_all(base);
  write_figure_suite(figs, base / "a");
  write_figure_suite(run_figure_suite(Workbench(c), opt), base / "b");
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(base / "a")) {
    ++files;
    CHECK(slurp(entry.path()) == slurp(base / "b" / entry.path().filename()));
  }
  CHECK(files == 11 + 9);
  CHECK(slurp(base / "a" / "fig5_crcs.csv").rfind("figure,scheme,", 0) == 0);
  CHECK(slurp(base / "a" / "fig9_f_plot.csv").rfind("f,rFullRed/replication,", 0) == 0);
  fs::remove_all(base);

  auto single = c;
  single.deployments = {DeploymentKind::Replication};
  single.schemes = {Scheme::NoRed};
  CHECK_THROWS_AS(run_figure_suite(Workbench(single), opt), ConfigError);
}
