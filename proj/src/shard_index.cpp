#include "tailsearch/shard_index.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tailsearch/errors.hpp"
#include "tailsearch/seeding.hpp"

namespace tailsearch {

double SuccessDistribution::top() const {
  return p.empty() ? 0.0 : *std::max_element(p.begin(), p.end());
}

void SuccessDistribution::validate() const {
  if (p.empty()) throw Error("success distribution is empty");
  double sum = 0.0;
  for (double x : p) {
    if (!(x >= 0.0)) throw Error("success distribution has a negative entry");
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw Error("success distribution does not sum to 1");
}

SuccessDistribution uniform_distribution(std::size_t n) {
  if (n < 1) throw Error("uniform distribution needs n >= 1");
  return {std::vector<double>(n, 1.0 / static_cast<double>(n))};
}

namespace {

Csi sample_partition(const Deployment& deployment, std::size_t partition_index,
                     double sample_prob, std::uint64_t seed) {
  const auto& docs = *deployment.documents;
  const auto& partition = *deployment.partitions[partition_index];
  const std::uint64_t stream = derive_seed(seed, partition_index);

  Csi csi;
  csi.partition = partition_index;
  csi.n_shards = partition.n;
  csi.sample_prob = sample_prob;
  std::vector<WeightedDocument> sampled;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    if (to_unit_interval(derive_seed(stream, d)) < sample_prob) {
      sampled.push_back(docs[d]);
      csi.origin.emplace(docs[d].id, partition.assignment[d]);
    }
  }
  csi.index = InvertedIndex(sampled);
  return csi;
}

}  // namespace

std::vector<std::shared_ptr<const Csi>> sample_csi(const Deployment& deployment,
                                                   double sample_prob, std::uint64_t seed) {
  if (!(sample_prob > 0.0 && sample_prob <= 1.0))
    throw Error("sample_prob must be in (0, 1]");
  std::vector<std::shared_ptr<const Csi>> out;
  if (deployment.kind == DeploymentKind::Replication) {
    auto shared = std::make_shared<const Csi>(sample_partition(deployment, 0, sample_prob, seed));
    out.assign(deployment.r(), shared);
    return out;
  }
  for (std::size_t i = 0; i < deployment.r(); ++i) {
    out.push_back(std::make_shared<const Csi>(sample_partition(deployment, i, sample_prob, seed)));
  }
  return out;
}

SuccessDistribution crcs_linear(std::span<const ShardId> ranked_shards, std::size_t gamma,
                                std::size_t n_shards) {
  if (gamma < 1) throw Error("gamma must be >= 1");
  std::vector<double> score(n_shards, 0.0);
  const std::size_t count = std::min(gamma, ranked_shards.size());
  for (std::size_t rank = 1; rank <= count; ++rank) {
    score[ranked_shards[rank - 1]] += static_cast<double>(gamma - rank);
  }
  const double total = std::accumulate(score.begin(), score.end(), 0.0);
  if (total <= 0.0) return uniform_distribution(n_shards);
  for (auto& s : score) s /= total;
  return {std::move(score)};
}

SuccessDistribution estimate_distribution(const Csi& csi, const QueryVector& query,
                                          std::size_t gamma) {
  if (gamma < 1) throw Error("gamma must be >= 1");
  std::vector<ShardId> tags;
  for (const auto& r : csi.index.search(query, gamma)) tags.push_back(csi.origin.at(r.doc_id));
  return crcs_linear(tags, gamma, csi.n_shards);
}

}  // namespace tailsearch
