#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tailsearch/corpus.hpp"
#include "tailsearch/partition.hpp"
#include "tailsearch/selection.hpp"
#include "tailsearch/simulator.hpp"

namespace tailsearch {

struct ExperimentConfig {
  // Exactly one corpus source.
  std::optional<std::filesystem::path> corpus_path;
  std::optional<SyntheticCorpusParams> synthetic;

  // Query file, or else `n_queries` documents sampled from the corpus.
  std::optional<std::filesystem::path> queries_path;
  std::size_t n_queries = 200;

  StopwordSet stopwords;
  unsigned k = 4;
  std::size_t r = 3;
  std::vector<std::size_t> t = {4};
  std::vector<double> f = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
  std::vector<Scheme> schemes = {Scheme::NoRed, Scheme::RFullRed, Scheme::RSmartRed};
  std::vector<DeploymentKind> deployments = {DeploymentKind::Replication};
  DistributionSource distribution = DistributionSource::Crcs;
  std::size_t m = kDefaultM;
  std::size_t k_per_shard = kDefaultKPerShard;
  std::size_t gamma = kDefaultGamma;
  double sample_prob = kDefaultSampleProb;
  std::size_t hash_dim = kDefaultHashDim;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  std::filesystem::path output_dir = "results";
  bool suite = false;
  bool detail = false;

  std::size_t n() const noexcept { return std::size_t{1} << k; }

  // Throws ConfigError naming the offending field. Checks grid consistency
  // (budgets, scheme/deployment compatibility) before any work is done.
  void validate() const;
};

// Derived seeds; every random choice in an experiment flows from the master.
std::uint64_t lsh_seed(const ExperimentConfig& config);
std::uint64_t csi_seed(const ExperimentConfig& config);
std::uint64_t query_sample_seed(const ExperimentConfig& config);
std::uint64_t miss_seed(const ExperimentConfig& config);

struct MetricsRow {
  std::string figure;
  Scheme scheme = Scheme::NoRed;
  DeploymentKind deployment = DeploymentKind::Replication;
  double f = 0.0;
  std::size_t t = 0;
  std::size_t r = 0;
  std::size_t budget = 0;
  double recall_mean = 0.0;
  double recall_std = 0.0;
  std::size_t n_queries = 0;
  std::uint64_t seed = 0;
  // Aligned with MetricsTable::query_ids.
  std::vector<double> per_query;
};

struct MetricsTable {
  std::vector<std::string> query_ids;
  std::vector<MetricsRow> rows;

  const MetricsRow* find(Scheme scheme, DeploymentKind deployment, double f,
                         std::size_t t) const;

  // `scheme,deployment,f,t,r,budget,recall_mean,recall_std,n_queries,seed`,
  // with a leading `figure` column when with_figure is set.
  void write_csv(std::ostream& out, bool with_figure = false) const;
  // `scheme,deployment,f,t,query_id,recall`
  void write_detail_csv(std::ostream& out) const;
};

// A grid of (scheme, deployment, f, t) cells to evaluate.
struct ExperimentGrid {
  std::vector<Scheme> schemes;
  std::vector<DeploymentKind> deployments;
  std::vector<double> f;
  std::vector<std::size_t> t;
  DistributionSource distribution = DistributionSource::Crcs;
  std::string figure;
};

// The built world for one config: corpus, global statistics, centralized
// index, deployments, CSIs and every query prepared against every deployment.
class Workbench {
 public:
  explicit Workbench(const ExperimentConfig& config);

  const ExperimentConfig& config() const noexcept { return config_; }
  const std::vector<RawDocument>& corpus() const noexcept { return corpus_; }
  const CorpusStats& stats() const noexcept { return stats_; }
  const std::vector<QueryVector>& queries() const noexcept { return queries_; }
  bool has(DeploymentKind kind) const;
  const Broker& broker(DeploymentKind kind) const;
  const std::vector<PreparedQuery>& prepared(DeploymentKind kind) const;

  // Per-cell recall for every query. Grid consistency is checked first.
  MetricsTable run(const ExperimentGrid& grid) const;

 private:
  struct Lane {
    DeploymentKind kind;
    std::unique_ptr<Broker> broker;
    std::vector<PreparedQuery> prepared;
  };
  const Lane& lane(DeploymentKind kind) const;

  ExperimentConfig config_;
  std::vector<RawDocument> corpus_;
  CorpusStats stats_;
  std::vector<QueryVector> queries_;
  std::vector<Lane> lanes_;
};

void validate_grid(const ExperimentGrid& grid, std::size_t n, std::size_t r);

ExperimentGrid grid_from_config(const ExperimentConfig& config);

MetricsTable run_experiment(const ExperimentConfig& config);

double sample_std(std::span<const double> values);
double mean(std::span<const double> values);

}  // namespace tailsearch
