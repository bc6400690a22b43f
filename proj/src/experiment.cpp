#include "tailsearch/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>
#include <string>

#include <fmt/core.h>
#include <fmt/ostream.h>

#include "parallel.hpp"
#include "tailsearch/errors.hpp"
#include "tailsearch/seeding.hpp"
#include "tailsearch/shard_index.hpp"

namespace tailsearch {

namespace {

constexpr std::uint64_t kLshStream = 1;
constexpr std::uint64_t kCsiStream = 2;
constexpr std::uint64_t kQueryStream = 3;
constexpr std::uint64_t kMissStream = 4;

bool compatible(Scheme scheme, DeploymentKind kind) {
  return !requires_repartition(scheme) || kind == DeploymentKind::Repartition;
}

}  // namespace

std::uint64_t lsh_seed(const ExperimentConfig& c) { return derive_seed(c.seed, kLshStream); }
std::uint64_t csi_seed(const ExperimentConfig& c) { return derive_seed(c.seed, kCsiStream); }
std::uint64_t query_sample_seed(const ExperimentConfig& c) {
  return derive_seed(c.seed, kQueryStream);
}
std::uint64_t miss_seed(const ExperimentConfig& c) { return derive_seed(c.seed, kMissStream); }

void validate_grid(const ExperimentGrid& grid, std::size_t n, std::size_t r) {
  if (grid.schemes.empty()) throw ConfigError("schemes", "at least one scheme is required");
  if (grid.deployments.empty())
    throw ConfigError("deployments", "at least one deployment is required");
  if (grid.f.empty()) throw ConfigError("f", "at least one miss probability is required");
  if (grid.t.empty()) throw ConfigError("t", "at least one t value is required");
  for (double f : grid.f) {
    if (!(f >= 0.0 && f <= 1.0)) throw ConfigError("f", fmt::format("{} is outside [0, 1]", f));
  }
  const bool has_repartition =
      std::find(grid.deployments.begin(), grid.deployments.end(), DeploymentKind::Repartition) !=
      grid.deployments.end();
  for (auto scheme : grid.schemes) {
    if (requires_repartition(scheme) && !has_repartition) {
      throw ConfigError("schemes", std::string(to_string(scheme)) +
                                       " needs a repartition deployment (per-partition "
                                       "distributions)");
    }
  }
  for (auto t : grid.t) {
    if (t < 1) throw ConfigError("t", "t must be >= 1");
    if (t > n)
      throw ConfigError("t", fmt::format("t={} gives budget {} > n*r = {}", t, t * r, n * r));
    for (auto scheme : grid.schemes) {
      if (scheme == Scheme::NoRed && t * r > n) {
        throw ConfigError("t", fmt::format("NoRed needs t*r <= n, but t={} r={} n={}", t, r, n));
      }
    }
  }
}

void ExperimentConfig::validate() const {
  if (corpus_path.has_value() == synthetic.has_value())
    throw ConfigError("corpus", "exactly one of 'corpus' or 'synthetic' must be given");
  if (k < 1 || k > 20) throw ConfigError("k", "must be in [1, 20]");
  if (r < 1) throw ConfigError("r", "must be >= 1");
  if (m < 1) throw ConfigError("m", "must be >= 1");
  if (k_per_shard < 1) throw ConfigError("k_per_shard", "must be >= 1");
  if (gamma < 1) throw ConfigError("gamma", "must be >= 1");
  if (!(sample_prob > 0.0 && sample_prob <= 1.0))
    throw ConfigError("sample_prob", "must be in (0, 1]");
  if (hash_dim < 1) throw ConfigError("hash_dim", "must be >= 1");
  if (threads < 1) throw ConfigError("threads", "must be >= 1");
  if (synthetic) {
    if (synthetic->n_docs < 1) throw ConfigError("synthetic.n_docs", "must be >= 1");
    if (synthetic->vocab_size < 1) throw ConfigError("synthetic.vocab_size", "must be >= 1");
    if (synthetic->n_clusters < 1) throw ConfigError("synthetic.n_clusters", "must be >= 1");
    if (!(synthetic->doc_len_mean > 0.0))
      throw ConfigError("synthetic.doc_len_mean", "must be > 0");
  }
  validate_grid(grid_from_config(*this), n(), r);
}

ExperimentGrid grid_from_config(const ExperimentConfig& config) {
  return {config.schemes, config.deployments, config.f, config.t, config.distribution, ""};
}

double mean(std::span<const double> values) {
  if (values.empty()) return std::nan("");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double sample_std(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double mu = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - mu) * (v - mu);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

const MetricsRow* MetricsTable::find(Scheme scheme, DeploymentKind deployment, double f,
                                     std::size_t t) const {
  for (const auto& row : rows) {
    if (row.scheme == scheme && row.deployment == deployment && row.f == f && row.t == t)
      return &row;
  }
  return nullptr;
}

void MetricsTable::write_csv(std::ostream& out, bool with_figure) const {
  if (with_figure) out << "figure,";
  out << "scheme,deployment,f,t,r,budget,recall_mean,recall_std,n_queries,seed\n";
  for (const auto& row : rows) {
    if (with_figure) out << row.figure << ',';
    fmt::print(out, "{},{},{},{},{},{},{:.6f},{:.6f},{},{}\n", to_string(row.scheme),
               to_string(row.deployment), row.f, row.t, row.r, row.budget, row.recall_mean,
               row.recall_std, row.n_queries, row.seed);
  }
}

void MetricsTable::write_detail_csv(std::ostream& out) const {
  out << "scheme,deployment,f,t,query_id,recall\n";
  for (const auto& row : rows) {
    for (std::size_t q = 0; q < row.per_query.size(); ++q) {
      fmt::print(out, "{},{},{},{},{},{:.6f}\n", to_string(row.scheme), to_string(row.deployment),
                 row.f, row.t, query_ids[q], row.per_query[q]);
    }
  }
}

Workbench::Workbench(const ExperimentConfig& config) : config_(config) {
  config_.validate();

  corpus_ = config_.corpus_path ? load_corpus(*config_.corpus_path)
                                : generate_synthetic_corpus(*config_.synthetic);
  stats_ = build_corpus_stats(corpus_, config_.stopwords);
  auto documents = std::make_shared<const std::vector<WeightedDocument>>(
      weight_corpus(corpus_, stats_, config_.stopwords));
  auto centralized = std::make_shared<const InvertedIndex>(*documents);

  std::vector<RawDocument> raw_queries;
  if (config_.queries_path) {
    raw_queries = load_corpus(*config_.queries_path);
  } else {
    std::vector<std::size_t> picks(corpus_.size());
    std::iota(picks.begin(), picks.end(), 0);
    std::mt19937_64 rng(query_sample_seed(config_));
    std::vector<std::size_t> chosen;
    std::sample(picks.begin(), picks.end(), std::back_inserter(chosen),
                std::min(config_.n_queries, corpus_.size()), rng);
    for (auto d : chosen) raw_queries.push_back({"q-" + corpus_[d].id, corpus_[d].text});
  }
  for (const auto& q : raw_queries) queries_.push_back(weight_query(q, stats_, config_.stopwords));

  const BrokerOptions options{config_.k_per_shard, config_.m, config_.gamma};
  std::vector<DeploymentKind> kinds = config_.deployments;
  std::sort(kinds.begin(), kinds.end());
  kinds.erase(std::unique(kinds.begin(), kinds.end()), kinds.end());
  for (auto kind : kinds) {
    auto deployment = std::make_shared<const Deployment>(
        kind == DeploymentKind::Replication
            ? build_replication(documents, config_.r, config_.k, lsh_seed(config_),
                                config_.hash_dim)
            : build_repartition(documents, config_.r, config_.k, lsh_seed(config_),
                                config_.hash_dim));
    auto csi = sample_csi(*deployment, config_.sample_prob, csi_seed(config_));
    Lane lane{kind, std::make_unique<Broker>(deployment, std::move(csi), centralized, options),
              {}};
    lane.prepared.resize(queries_.size());
    detail::parallel_for(queries_.size(), config_.threads, [&](std::size_t q) {
      lane.prepared[q] = lane.broker->prepare(queries_[q]);
    });
    lanes_.push_back(std::move(lane));
  }
}

bool Workbench::has(DeploymentKind kind) const {
  return std::any_of(lanes_.begin(), lanes_.end(), [&](const Lane& l) { return l.kind == kind; });
}

const Workbench::Lane& Workbench::lane(DeploymentKind kind) const {
  for (const auto& l : lanes_) {
    if (l.kind == kind) return l;
  }
  throw Error("deployment '" + std::string(to_string(kind)) + "' was not built");
}

const Broker& Workbench::broker(DeploymentKind kind) const { return *lane(kind).broker; }

const std::vector<PreparedQuery>& Workbench::prepared(DeploymentKind kind) const {
  return lane(kind).prepared;
}

MetricsTable Workbench::run(const ExperimentGrid& grid) const {
  validate_grid(grid, config_.n(), config_.r);
  for (auto kind : grid.deployments) {
    if (!has(kind))
      throw ConfigError("deployments", "'" + std::string(to_string(kind)) + "' was not built");
  }

  MetricsTable table;
  for (const auto& q : queries_) table.query_ids.push_back(q.id);
  const std::uint64_t misses_seed = miss_seed(config_);

  for (auto scheme : grid.schemes) {
    for (auto kind : grid.deployments) {
      if (!compatible(scheme, kind)) continue;
      const auto& l = lane(kind);
      for (double f : grid.f) {
        for (auto t : grid.t) {
          MetricsRow row;
          row.figure = grid.figure;
          row.scheme = scheme;
          row.deployment = kind;
          row.f = f;
          row.t = t;
          row.r = config_.r;
          row.budget = t * config_.r;
          row.seed = config_.seed;
          row.per_query.resize(queries_.size());
          const MissModel misses{f, misses_seed};
          detail::parallel_for(queries_.size(), config_.threads, [&](std::size_t q) {
            row.per_query[q] =
                l.broker->run(l.prepared[q], scheme, t, grid.distribution, misses).recall_at_m;
          });
          row.n_queries = row.per_query.size();
          row.recall_mean = row.per_query.empty() ? 0.0 : mean(row.per_query);
          row.recall_std = sample_std(row.per_query);
          table.rows.push_back(std::move(row));
        }
      }
    }
  }
  return table;
}

MetricsTable run_experiment(const ExperimentConfig& config) {
  return Workbench(config).run(grid_from_config(config));
}

}  // namespace tailsearch
