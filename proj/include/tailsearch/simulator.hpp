#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "tailsearch/partition.hpp"
#include "tailsearch/retrieval.hpp"
#include "tailsearch/selection.hpp"
#include "tailsearch/shard_index.hpp"

namespace tailsearch {

inline constexpr std::size_t kDefaultKPerShard = 100;
inline constexpr std::size_t kDefaultM = 100;

// Independent Bernoulli(f) response misses. The draw for a cell depends only
// on (seed, query id, partition, shard), never on evaluation order.
struct MissModel {
  double f = 0.0;
  std::uint64_t seed = 0;

  bool missed(const std::string& query_id, std::size_t partition, std::size_t shard) const;
};

struct QueryOutcome {
  std::string query_id;
  Selection selection;
  std::vector<Cell> responded;
  std::vector<std::string> merged;
  double recall_at_m = 0.0;
};

/// |centralized ∩ merged| / |centralized|. An empty centralized list means
/// there was nothing to find; recall is 1 in that case.
double recall_at_m(std::span<const std::string> centralized, std::span<const std::string> merged);

/// Union of result lists, duplicates dropped by doc id, ranked by
/// (score desc, doc id asc), truncated to m.
std::vector<std::string> merge_results(std::span<const std::vector<ScoredResult>* const> lists,
                                       std::size_t m);

enum class DistributionSource { Uniform, Crcs };

struct BrokerOptions {
  std::size_t k_per_shard = kDefaultKPerShard;
  std::size_t m = kDefaultM;
  std::size_t gamma = kDefaultGamma;
};

// Everything about one query that does not depend on the scheme, f or t.
struct PreparedQuery {
  QueryVector query;
  std::vector<std::string> centralized;
  // One CRCS estimate per partition (empty when no CSI was supplied).
  std::vector<SuccessDistribution> crcs;
  // Local top-k per [distinct partition][shard].
  std::vector<std::vector<std::vector<ScoredResult>>> shard_results;
};

// Broker-side query processing over one deployment.
class Broker {
 public:
  // `csi` may be empty, in which case only DistributionSource::Uniform is
  // usable. The centralized index must cover the whole corpus.
  Broker(std::shared_ptr<const Deployment> deployment,
         std::vector<std::shared_ptr<const Csi>> csi,
         std::shared_ptr<const InvertedIndex> centralized, BrokerOptions options = {});

  const Deployment& deployment() const noexcept { return *deployment_; }
  const BrokerOptions& options() const noexcept { return options_; }

  PreparedQuery prepare(const QueryVector& query) const;

  std::vector<SuccessDistribution> distributions(const PreparedQuery& prepared,
                                                 DistributionSource source) const;

  /// Selection for `scheme` under budget t*r. Throws InvalidSelectionError
  /// for schemes incompatible with the deployment or budget.
  /// `seed` only feeds the Random scheme.
  Selection select(const PreparedQuery& prepared, Scheme scheme, std::size_t t,
                   DistributionSource source, double f, std::uint64_t seed = 0) const;

  QueryOutcome run(const PreparedQuery& prepared, Scheme scheme, std::size_t t,
                   DistributionSource source, const MissModel& misses) const;

  // Convenience: prepare + run.
  QueryOutcome run_query(const QueryVector& query, Scheme scheme, std::size_t t,
                         DistributionSource source, const MissModel& misses) const;

 private:
  std::shared_ptr<const Deployment> deployment_;
  std::vector<std::shared_ptr<const Csi>> csi_;
  std::shared_ptr<const InvertedIndex> centralized_;
  BrokerOptions options_;
  // distinct_[i] indexes PreparedQuery::shard_results for partition i.
  std::vector<std::size_t> distinct_;
  std::size_t n_distinct_ = 0;
};

struct TTestResult {
  double t_statistic = 0.0;
  bool significant = false;
  // Differences have zero spread but nonzero mean; t is +-infinity.
  bool degenerate = false;
  double mean_difference = 0.0;
};

/// Two-sided paired t-test on a - b with N - 1 degrees of freedom.
/// All-zero differences give t = 0, not significant. Throws Error when the
/// samples differ in length or have fewer than two entries.
TTestResult paired_ttest(std::span<const double> a, std::span<const double> b,
                         double alpha = 0.05);

}  // namespace tailsearch
