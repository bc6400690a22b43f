#include "tailsearch/cli/commands.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <regex>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/core.h>
#include <fmt/ostream.h>

#include "tailsearch/analysis.hpp"
#include "tailsearch/cli/config.hpp"
#include "tailsearch/errors.hpp"
#include "tailsearch/harness.hpp"
#include "tailsearch/verify.hpp"

namespace tailsearch::cli {

namespace {

std::vector<double> parse_probabilities(const std::string& text) {
  std::vector<double> p;
  std::string token;
  std::istringstream in(text);
  while (in >> std::ws && !in.eof()) {
    char c = static_cast<char>(in.peek());
    if (c == ',' || c == '/' || c == ';') {
      in.get();
      continue;
    }
    double x;
    if (!(in >> x)) throw ConfigError("p", "cannot parse probability list '" + text + "'");
    if (x < 0.0) throw ConfigError("p", "probabilities must be nonnegative");
    p.push_back(x);
  }
  if (p.empty()) throw ConfigError("p", "empty probability list");
  return p;
}

// Tokens: D<j> (one more replica of shard j), D<j>x<c> (c replicas), or
// R<i>D<j> (explicit replica i of shard j). Indexes are 1-based.
std::vector<Cell> parse_selection(const std::string& text, std::size_t& max_replica) {
  static const std::regex token_re(R"(^\s*(?:[Rr](\d+))?[Dd](\d+)(?:[xX*](\d+))?\s*$)");
  std::vector<Cell> cells;
  std::vector<std::size_t> next_replica;
  std::stringstream ss(text);
  std::string token;
  max_replica = 0;
  while (std::getline(ss, token, ',')) {
    if (token.find_first_not_of(" \t") == std::string::npos) continue;
    std::smatch m;
    if (!std::regex_match(token, m, token_re))
      throw ConfigError("select", "cannot parse selection token '" + token + "'");
    const std::size_t shard = std::stoul(m[2].str());
    if (shard < 1) throw ConfigError("select", "shard indexes are 1-based");
    if (next_replica.size() < shard) next_replica.resize(shard, 0);
    if (m[1].matched) {
      if (m[3].matched) throw ConfigError("select", "R<i>D<j> cannot carry a count");
      const std::size_t replica = std::stoul(m[1].str());
      if (replica < 1) throw ConfigError("select", "replica indexes are 1-based");
      cells.push_back({replica - 1, shard - 1});
      max_replica = std::max(max_replica, replica);
    } else {
      const std::size_t count = m[3].matched ? std::stoul(m[3].str()) : 1;
      for (std::size_t c = 0; c < count; ++c) {
        cells.push_back({next_replica[shard - 1]++, shard - 1});
        max_replica = std::max(max_replica, next_replica[shard - 1]);
      }
    }
  }
  if (cells.empty()) throw ConfigError("select", "empty selection");
  return cells;
}

void apply_output_override(ExperimentConfig& config, const std::string& cli_out) {
  if (!cli_out.empty()) {
    config.output_dir = cli_out;
  } else if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') {
    config.output_dir = env;
  }
}

void write_file(const std::filesystem::path& path,
                const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  body(out);
}

int cmd_experiment(const std::string& config_path, std::size_t threads, bool suite, bool detail,
                   const std::string& out_dir, std::ostream& out) {
  auto config = load_config(config_path);
  if (threads > 0) config.threads = threads;
  config.suite = config.suite || suite;
  config.detail = config.detail || detail;
  apply_output_override(config, out_dir);
  if (config.suite) {
    for (auto kind : {DeploymentKind::Replication, DeploymentKind::Repartition}) {
      if (std::find(config.deployments.begin(), config.deployments.end(), kind) ==
          config.deployments.end())
        config.deployments.push_back(kind);
    }
  }
  config.validate();

  Workbench bench(config);
  std::filesystem::create_directories(config.output_dir);
  const auto table = bench.run(grid_from_config(config));
  const auto metrics = config.output_dir / "metrics.csv";
  write_file(metrics, [&](std::ostream& os) { table.write_csv(os); });
  out << "wrote " << metrics.string() << '\n';
  if (config.detail) {
    const auto path = config.output_dir / "detail.csv";
    write_file(path, [&](std::ostream& os) { table.write_detail_csv(os); });
    out << "wrote " << path.string() << '\n';
  }
  if (config.suite) {
    const auto figures = run_figure_suite(bench);
    write_figure_suite(figures, config.output_dir);
    for (const auto& f : figures) out << "wrote figure " << f.name << '\n';
  }
  return kExitOk;
}

int cmd_verify(const std::string& level, std::uint64_t seed, bool seed_given, bool inject,
               std::ostream& out) {
  auto options = level == "full" ? VerifyOptions::full() : VerifyOptions::quick();
  if (seed_given) options.seed = seed;
  options.inject_exponent_fault = inject;
  const auto reports = run_verification(options);
  print_report(out, reports);
  const bool ok =
      std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.passed; });
  out << (ok ? "all properties hold\n" : "verification FAILED\n");
  return ok ? kExitOk : kExitVerifyFailed;
}

int cmd_sp(const std::string& p_text, const std::string& p_file, const std::string& select,
           double f, std::size_t r_opt, std::ostream& out) {
  std::string text = p_text;
  if (!p_file.empty()) {
    std::ifstream in(p_file);
    if (!in) throw ConfigError("p-file", "cannot read '" + p_file + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    text = buffer.str();
  }
  if (text.empty()) throw ConfigError("p", "give --p or --p-file");
  auto p = parse_probabilities(text);
  double sum = 0.0;
  for (double x : p) sum += x;
  if (sum > 1.0 + 1e-9) throw ConfigError("p", fmt::format("probabilities sum to {} > 1", sum));
  // Unlisted shards share the leftover mass; they are never selected.
  if (sum < 1.0 - 1e-9) p.push_back(1.0 - sum);
  SuccessDistribution dist{p};

  std::size_t max_replica = 0;
  auto cells = parse_selection(select, max_replica);
  for (const auto& c : cells) {
    if (c.shard >= p.size())
      throw ConfigError("select", fmt::format("shard D{} is not in the distribution", c.shard + 1));
  }
  const std::size_t r = std::max(r_opt, max_replica);
  const Selection selection(dist.n(), r, std::move(cells));
  fmt::print(out, "{:.6f}\n", sp_closed_form(dist, selection, f).value);
  return kExitOk;
}

int cmd_partition_dump(const std::string& config_path, const std::string& deployment,
                       const std::string& out_path, std::ostream& out) {
  auto config = load_config(config_path);
  // Only the corpus and partitioning settings matter here.
  config.deployments = {parse_deployment_kind(deployment)};
  config.schemes = {Scheme::RSmartRed};
  config.t = {1};
  config.validate();
  auto corpus = config.corpus_path ? load_corpus(*config.corpus_path)
                                   : generate_synthetic_corpus(*config.synthetic);
  const auto stats = build_corpus_stats(corpus, config.stopwords);
  auto docs = std::make_shared<const std::vector<WeightedDocument>>(
      weight_corpus(corpus, stats, config.stopwords));
  const auto d = config.deployments.front() == DeploymentKind::Replication
                     ? build_replication(docs, config.r, config.k, lsh_seed(config),
                                         config.hash_dim)
                     : build_repartition(docs, config.r, config.k, lsh_seed(config),
                                         config.hash_dim);
  if (out_path.empty() || out_path == "-") {
    write_partition_dump(out, d);
  } else {
    write_file(out_path, [&](std::ostream& os) { write_partition_dump(os, d); });
  }
  return kExitOk;
}

int cmd_profile_dist(const std::string& config_path, std::size_t top_k, std::ostream& out) {
  auto config = load_config(config_path);
  config.deployments = {DeploymentKind::Replication};
  config.schemes = {Scheme::NoRed};
  config.t = {1};
  config.validate();
  Workbench bench(config);
  std::vector<SuccessDistribution> crcs;
  for (const auto& p : bench.prepared(DeploymentKind::Replication)) crcs.push_back(p.crcs.front());
  const auto strata = default_strata();
  const auto members = stratify_queries(crcs, strata);
  out << "stratum,n_queries";
  for (std::size_t k = 1; k <= top_k; ++k) out << ",p" << k;
  out << '\n';
  for (const auto& s : strata) {
    std::vector<SuccessDistribution> subset;
    for (auto q : members.at(s.name)) subset.push_back(crcs[q]);
    out << s.name << ',' << subset.size();
    for (double v : profile_distribution(subset, top_k)) fmt::print(out, ",{:.6f}", v);
    out << '\n';
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tail-tolerant distributed search simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::size_t threads = 0;
  bool suite = false, detail = false;
  auto* experiment = app.add_subcommand("experiment", "Run an experiment grid from a config");
  experiment->add_option("config", config_path, "JSON config file")->required();
  experiment->add_option("--threads", threads, "Worker threads (output is identical for any value)");
  experiment->add_flag("--suite", suite, "Also emit the figure-analog suite");
  experiment->add_flag("--detail", detail, "Also write per-query recall");
  experiment->add_option("--out", out_dir, "Output directory override");

  std::string level = "quick";
  std::uint64_t verify_seed = 0;
  bool inject = false;
  auto* verify = app.add_subcommand("verify", "Run the analytical property suites");
  verify->add_option("--level", level, "quick or full")->check(CLI::IsMember({"quick", "full"}));
  auto* seed_opt = verify->add_option("--seed", verify_seed, "Master seed");
  verify->add_flag("--inject-fault", inject, "Mutation smoke-check: perturb the closed form");

  std::string p_text, p_file, select;
  double f = 0.0;
  std::size_t r_opt = 1;
  auto* sp = app.add_subcommand("sp", "Closed-form success probability of a selection");
  sp->add_option("--p", p_text, "Shard probabilities, e.g. 0.8,0.1");
  sp->add_option("--p-file", p_file, "File with shard probabilities");
  sp->add_option("--select", select, "Selection, e.g. D1,D2 or D1x2 or R2D1")->required();
  sp->add_option("--f", f, "Miss probability")->required()->check(CLI::Range(0.0, 1.0));
  sp->add_option("--r", r_opt, "Replication factor (defaults to the highest replica used)");

  std::string dump_deployment = "repartition", dump_out;
  auto* dump = app.add_subcommand("partition-dump", "Write doc_id,partition,shard CSV");
  dump->add_option("config", config_path, "JSON config file")->required();
  dump->add_option("--deployment", dump_deployment, "replication or repartition")
      ->check(CLI::IsMember({"replication", "repartition"}));
  dump->add_option("-o,--output", dump_out, "Output file (default stdout)");

  std::size_t top_k = 5;
  auto* profile = app.add_subcommand("profile-dist", "Mean top-k CRCS shard probabilities");
  profile->add_option("config", config_path, "JSON config file")->required();
  profile->add_option("--top-k", top_k, "Rank positions")->check(CLI::PositiveNumber);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*experiment) return cmd_experiment(config_path, threads, suite, detail, out_dir, out);
    if (*verify) return cmd_verify(level, verify_seed, seed_opt->count() > 0, inject, out);
    if (*sp) return cmd_sp(p_text, p_file, select, f, r_opt, out);
    if (*dump) return cmd_partition_dump(config_path, dump_deployment, dump_out, out);
    if (*profile) return cmd_profile_dist(config_path, top_k, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace tailsearch::cli
