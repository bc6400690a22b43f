#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tailsearch/cli/commands.hpp"
#include "tailsearch/cli/config.hpp"
#include "tailsearch/errors.hpp"

using namespace tailsearch;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name) << text;
    return path / name;
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kSmallConfig = R"({
  "seed": 4,
  "synthetic": {"n_docs": 800, "vocab_size": 600},
  "n_queries": 20, "k": 3, "r": 2, "t": 2, "f": [0, 0.3],
  "schemes": ["NoRed", "rSmartRed", "pSmartRed"],
  "deployments": ["replication", "repartition"],
  "m": 20, "k_per_shard": 20, "gamma": 100,
  "output_dir": "out"
})";

}  // namespace

TEST_CASE("sp prints the closed form") {
  CHECK(run({"sp", "--p", "0.8,0.1", "--select", "D1,D2", "--f", "0.05"}).out == "0.855000\n");
  CHECK(run({"sp", "--p", "0.8", "--select", "D1x2", "--f", "0.2"}).out == "0.768000\n");
  CHECK(run({"sp", "--p", "0.8,0.1", "--select", "R1D1,R2D1", "--f", "0.05"}).out ==
        "0.798000\n");
  CHECK(run({"sp", "--p", "0.5,0.5", "--select", "D1x2,D2", "--f", "1"}).out == "0.000000\n");

  TempDir tmp("tailsearch_cli_sp");
  auto pf = tmp.write("p.txt", "0.8\n0.1\n0.05\n0.03\n0.02\n");
  CHECK(run({"sp", "--p-file", pf.string(), "--select", "D1,D2", "--f", "0.2"}).out ==
        "0.720000\n");
}

TEST_CASE("sp diagnostics") {
  auto gap = run({"sp", "--p", "0.8,0.2", "--select", "R2D1", "--f", "0.1"});
  CHECK(gap.code == cli::kExitUsage);
  CHECK(gap.out.empty());
  CHECK(gap.err.find("containment") != std::string::npos);

  CHECK(run({"sp", "--p", "0.8,0.3", "--select", "D1", "--f", "0.1"}).code == cli::kExitUsage);
  CHECK(run({"sp", "--p", "0.8", "--select", "D3", "--f", "0.1"}).code == cli::kExitUsage);
  CHECK(run({"sp", "--p", "0.8", "--select", "Q1", "--f", "0.1"}).code == cli::kExitUsage);
  CHECK(run({"sp", "--p", "0.8", "--select", "D1", "--f", "2"}).code == cli::kExitUsage);
  CHECK(run({}).code == cli::kExitUsage);
  CHECK(run({"bogus"}).code == cli::kExitUsage);
  CHECK(run({"--help"}).code == cli::kExitOk);
}

TEST_CASE("config parsing") {
  auto c = cli::parse_config(kSmallConfig, "/base");
  CHECK(c.seed == 4);
  CHECK(c.synthetic->seed == 4);
  CHECK(c.synthetic->n_docs == 800);
  CHECK(c.t == std::vector<std::size_t>{2});
  CHECK(c.output_dir == fs::path("/base/out"));
  CHECK(c.deployments.size() == 2);

  try {
    cli::parse_config(R"({"synthetic": {}, "colour": 1})", "");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "colour");
  }
  CHECK_THROWS_AS(cli::parse_config(R"({"k": "four"})", ""), ConfigError);
  CHECK_THROWS_AS(cli::parse_config(R"({"schemes": ["Fast"]})", ""), ConfigError);
  CHECK_THROWS_AS(cli::parse_config("{", ""), ConfigError);
  CHECK_THROWS_AS(cli::load_config("/no/such/config.json"), ConfigError);
}

TEST_CASE("experiment writes deterministic csv") {
  TempDir tmp("tailsearch_cli_experiment");
  auto cfg = tmp.write("config.json", kSmallConfig);
  auto first = run({"experiment", cfg.string(), "--detail"});
  REQUIRE_MESSAGE(first.code == 0, first.err);
  const auto csv = slurp(tmp.path / "out" / "metrics.csv");
  CHECK(csv.rfind("scheme,deployment,f,t,r,budget,recall_mean,recall_std,n_queries,seed\n", 0) == 0);
  CHECK(fs::exists(tmp.path / "out" / "detail.csv"));

  auto again = run({"experiment", cfg.string(), "--threads", "3", "--out",
                    (tmp.path / "again").string()});
  REQUIRE(again.code == 0);
  CHECK(slurp(tmp.path / "again" / "metrics.csv") == csv);

  setenv(cli::kOutputDirEnv, (tmp.path / "env").c_str(), 1);
  auto env = run({"experiment", cfg.string()});
  unsetenv(cli::kOutputDirEnv);
  REQUIRE(env.code == 0);
  CHECK(slurp(tmp.path / "env" / "metrics.csv") == csv);
}

TEST_CASE("experiment with an empty query file still writes a header") {
  TempDir tmp("tailsearch_cli_empty");
  tmp.write("corpus.jsonl", "{\"id\":\"a\",\"text\":\"red fish\"}\n{\"id\":\"b\",\"text\":\"blue fish\"}\n");
  tmp.write("queries.jsonl", "");
  auto cfg = tmp.write("config.json", R"({"corpus": "corpus.jsonl", "queries": "queries.jsonl",
      "k": 1, "r": 1, "t": 1, "f": 0, "schemes": ["NoRed"]})");
  auto res = run({"experiment", cfg.string(), "--out", (tmp.path / "o").string()});
  REQUIRE_MESSAGE(res.code == 0, res.err);
  const auto csv = slurp(tmp.path / "o" / "metrics.csv");
  CHECK(csv.rfind("scheme,", 0) == 0);
  CHECK(csv.find("NoRed,replication,0,1,1,1,") != std::string::npos);
}

TEST_CASE("experiment errors name the problem") {
  TempDir tmp("tailsearch_cli_errors");
  auto missing = tmp.write("missing.json", R"({"corpus": "nowhere.jsonl"})");
  auto res = run({"experiment", missing.string()});
  CHECK(res.code == cli::kExitUsage);
  CHECK(res.err.find("nowhere.jsonl") != std::string::npos);

  auto bad = tmp.write("bad.json", R"({"synthetic": {}, "k": 2, "r": 3, "t": 2})");
  res = run({"experiment", bad.string()});
  CHECK(res.code == cli::kExitUsage);
  CHECK(res.err.find("t:") != std::string::npos);

  res = run({"experiment", (tmp.path / "absent.json").string()});
  CHECK(res.code == cli::kExitUsage);
  CHECK(res.err.find("absent.json") != std::string::npos);
}

TEST_CASE("suite run writes figure files") {
  TempDir tmp("tailsearch_cli_suite");
  auto cfg = tmp.write("config.json", R"({"seed": 2, "synthetic": {"n_docs": 600, "vocab_size": 500},
      "n_queries": 10, "k": 4, "r": 3, "t": 3, "f": 0, "schemes": ["rSmartRed"],
      "m": 10, "k_per_shard": 10, "gamma": 50})");
  auto res = run({"experiment", cfg.string(), "--suite", "--out", (tmp.path / "o").string()});
  REQUIRE_MESSAGE(res.code == 0, res.err);
  CHECK(fs::exists(tmp.path / "o" / "fig9_t.csv"));
  CHECK(fs::exists(tmp.path / "o" / "fig4_profile_plot.csv"));
}

TEST_CASE("verify exit codes") {
  auto ok = run({"verify", "--level", "quick"});
  CHECK(ok.code == cli::kExitOk);
  CHECK(ok.out.find("all properties hold") != std::string::npos);
  auto broken = run({"verify", "--level", "quick", "--inject-fault"});
  CHECK(broken.code == cli::kExitVerifyFailed);
  CHECK(broken.out.find("counterexample") != std::string::npos);
  CHECK(run({"verify", "--level", "huge"}).code == cli::kExitUsage);
}

TEST_CASE("partition dump and profile") {
  TempDir tmp("tailsearch_cli_dump");
  auto cfg = tmp.write("config.json", kSmallConfig);
  auto dump = run({"partition-dump", cfg.string(), "--deployment", "replication"});
  REQUIRE(dump.code == 0);
  std::size_t lines = 0;
  for (char ch : dump.out) lines += ch == '\n';
  CHECK(lines == 800 * 2);

  auto to_file = run({"partition-dump", cfg.string(), "-o", (tmp.path / "d.csv").string()});
  REQUIRE(to_file.code == 0);
  CHECK(slurp(tmp.path / "d.csv").size() > 0);

  auto prof = run({"profile-dist", cfg.string(), "--top-k", "3"});
  REQUIRE_MESSAGE(prof.code == 0, prof.err);
  CHECK(prof.out.rfind("stratum,n_queries,p1,p2,p3\nWhole,20,", 0) == 0);
}
