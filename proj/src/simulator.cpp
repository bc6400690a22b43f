#include "tailsearch/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_set>

#include <boost/math/distributions/students_t.hpp>

#include "tailsearch/errors.hpp"
#include "tailsearch/seeding.hpp"

namespace tailsearch {

bool MissModel::missed(const std::string& query_id, std::size_t partition,
                       std::size_t shard) const {
  if (f <= 0.0) return false;
  if (f >= 1.0) return true;
  const auto bits = derive_seed(seed, hash_string(query_id), partition, shard);
  return to_unit_interval(bits) < f;
}

double recall_at_m(std::span<const std::string> centralized, std::span<const std::string> merged) {
  if (centralized.empty()) return 1.0;
  std::unordered_set<std::string_view> got(merged.begin(), merged.end());
  std::size_t hit = 0;
  for (const auto& id : centralized) hit += got.contains(id) ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(centralized.size());
}

std::vector<std::string> merge_results(std::span<const std::vector<ScoredResult>* const> lists,
                                       std::size_t m) {
  std::vector<const ScoredResult*> pool;
  std::unordered_set<std::string_view> seen;
  for (const auto* list : lists) {
    for (const auto& r : *list) {
      if (seen.insert(r.doc_id).second) pool.push_back(&r);
    }
  }
  const std::size_t take = std::min(m, pool.size());
  std::partial_sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(take), pool.end(),
                    [](const auto* a, const auto* b) { return ranks_before(*a, *b); });
  std::vector<std::string> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.push_back(pool[i]->doc_id);
  return out;
}

Broker::Broker(std::shared_ptr<const Deployment> deployment,
               std::vector<std::shared_ptr<const Csi>> csi,
               std::shared_ptr<const InvertedIndex> centralized, BrokerOptions options)
    : deployment_(std::move(deployment)),
      csi_(std::move(csi)),
      centralized_(std::move(centralized)),
      options_(options) {
  if (!deployment_ || deployment_->r() == 0) throw Error("broker needs a deployment");
  if (!centralized_) throw Error("broker needs the centralized index");
  if (!csi_.empty() && csi_.size() != deployment_->r())
    throw Error("broker needs one CSI per partition");
  if (options_.k_per_shard < 1 || options_.m < 1 || options_.gamma < 1)
    throw Error("k_per_shard, m and gamma must be >= 1");
  const auto& parts = deployment_->partitions;
  distinct_.resize(parts.size());
  for (std::size_t i = 0; i < parts.size(); ++i) {
    auto same = std::find(parts.begin(), parts.begin() + static_cast<std::ptrdiff_t>(i), parts[i]);
    if (same == parts.begin() + static_cast<std::ptrdiff_t>(i)) {
      distinct_[i] = n_distinct_++;
    } else {
      distinct_[i] = distinct_[static_cast<std::size_t>(same - parts.begin())];
    }
  }
}

PreparedQuery Broker::prepare(const QueryVector& query) const {
  PreparedQuery out;
  out.query = query;
  out.centralized = centralized_topm(*centralized_, query, options_.m);

  const auto& parts = deployment_->partitions;
  out.shard_results.resize(n_distinct_);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    auto& slot = out.shard_results[distinct_[i]];
    if (!slot.empty()) continue;
    for (const auto& shard : parts[i]->shards)
      slot.push_back(shard->search(query, options_.k_per_shard));
  }

  if (!csi_.empty()) {
    const Csi* previous = nullptr;
    for (const auto& csi : csi_) {
      if (csi.get() == previous) {
        out.crcs.push_back(out.crcs.back());
      } else {
        out.crcs.push_back(estimate_distribution(*csi, query, options_.gamma));
      }
      previous = csi.get();
    }
  }
  return out;
}

std::vector<SuccessDistribution> Broker::distributions(const PreparedQuery& prepared,
                                                       DistributionSource source) const {
  if (source == DistributionSource::Uniform)
    return std::vector<SuccessDistribution>(deployment_->r(),
                                            uniform_distribution(deployment_->n()));
  if (prepared.crcs.empty()) throw Error("CRCS distributions requested but no CSI was supplied");
  return prepared.crcs;
}

Selection Broker::select(const PreparedQuery& prepared, Scheme scheme, std::size_t t,
                         DistributionSource source, double f, std::uint64_t seed) const {
  const std::size_t r = deployment_->r();
  const std::size_t n = deployment_->n();
  const std::size_t budget = t * r;
  if (requires_repartition(scheme) && deployment_->kind != DeploymentKind::Repartition) {
    throw InvalidSelectionError(std::string(to_string(scheme)) +
                                " requires a Repartition deployment");
  }
  const auto dists = distributions(prepared, source);
  switch (scheme) {
    case Scheme::Random:
      return select_random(n, r, budget,
                           derive_seed(seed, hash_string(prepared.query.id), 0x72616e64ULL));
    case Scheme::NoRed: return select_nored(dists[0], budget, r);
    case Scheme::RFullRed: return select_rfullred(dists[0], t, r);
    case Scheme::RSmartRed: return select_rsmartred(dists[0], f, r, budget);
    case Scheme::PTop: return select_ptop(dists, t);
    case Scheme::PSmartRed: return select_psmartred(dists, f, budget);
  }
  throw Error("unknown scheme");
}

QueryOutcome Broker::run(const PreparedQuery& prepared, Scheme scheme, std::size_t t,
                         DistributionSource source, const MissModel& misses) const {
  QueryOutcome out;
  out.query_id = prepared.query.id;
  out.selection = select(prepared, scheme, t, source, misses.f, misses.seed);

  // Replicas of one shard return identical lists, so survivors collapse to
  // distinct (distinct partition, shard) pairs before merging.
  std::vector<std::pair<std::size_t, std::size_t>> sources;
  for (const auto& cell : out.selection.cells()) {
    if (misses.missed(prepared.query.id, cell.partition, cell.shard)) continue;
    out.responded.push_back(cell);
    sources.emplace_back(distinct_[cell.partition], cell.shard);
  }
  std::sort(sources.begin(), sources.end());
  sources.erase(std::unique(sources.begin(), sources.end()), sources.end());

  std::vector<const std::vector<ScoredResult>*> lists;
  lists.reserve(sources.size());
  for (const auto& [d, j] : sources) lists.push_back(&prepared.shard_results[d][j]);
  out.merged = merge_results(lists, options_.m);
  out.recall_at_m = recall_at_m(prepared.centralized, out.merged);
  return out;
}

QueryOutcome Broker::run_query(const QueryVector& query, Scheme scheme, std::size_t t,
                               DistributionSource source, const MissModel& misses) const {
  return run(prepare(query), scheme, t, source, misses);
}

TTestResult paired_ttest(std::span<const double> a, std::span<const double> b, double alpha) {
  if (a.size() != b.size()) throw Error("paired t-test needs samples of equal length");
  if (a.size() < 2) throw Error("paired t-test needs at least two pairs");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error("alpha must be in (0, 1)");
  const std::size_t n = a.size();
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = a[i] - b[i];
  const double mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double x : d) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));

  TTestResult res;
  res.mean_difference = mean;
  if (sd == 0.0) {
    if (mean == 0.0) return res;
    res.degenerate = true;
    res.significant = true;
    res.t_statistic = mean > 0 ? std::numeric_limits<double>::infinity()
                               : -std::numeric_limits<double>::infinity();
    return res;
  }
  res.t_statistic = mean / (sd / std::sqrt(static_cast<double>(n)));
  boost::math::students_t dist(static_cast<double>(n - 1));
  const double critical = boost::math::quantile(boost::math::complement(dist, alpha / 2.0));
  res.significant = std::abs(res.t_statistic) > critical;
  return res;
}

}  // namespace tailsearch
