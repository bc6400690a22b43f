#include "tailsearch/partition.hpp"

#include <algorithm>
#include <cctype>
#include <ostream>
#include <random>
#include <string>

#include "tailsearch/errors.hpp"
#include "tailsearch/seeding.hpp"

namespace tailsearch {

LshFunction sample_lsh(unsigned k, std::size_t dim, std::uint64_t seed) {
  if (k < 1 || k > 30) throw Error("LSH bit count k must be in [1, 30]");
  if (dim < 1) throw Error("LSH hashing dimension must be >= 1");
  LshFunction lsh{k, dim, seed, {}};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  lsh.hyperplanes.assign(k, std::vector<double>(dim));
  for (auto& plane : lsh.hyperplanes)
    for (auto& x : plane) x = normal(rng);
  return lsh;
}

std::vector<double> embed(const WeightedDocument& doc, std::size_t dim) {
  std::vector<double> v(dim, 0.0);
  for (const auto& tw : doc.weights) v[hash_string(tw.term) % dim] += tw.weight;
  return v;
}

ShardId assign(const LshFunction& lsh, const WeightedDocument& doc) {
  const auto v = embed(doc, lsh.dim);
  ShardId bucket = 0;
  for (unsigned i = 0; i < lsh.k; ++i) {
    const auto& plane = lsh.hyperplanes[i];
    double dot = 0.0;
    for (std::size_t d = 0; d < lsh.dim; ++d) dot += plane[d] * v[d];
    if (dot >= 0.0) bucket |= ShardId{1} << i;
  }
  return bucket;
}

std::vector<std::size_t> Partition::shard_sizes() const {
  std::vector<std::size_t> sizes(n, 0);
  for (auto s : assignment) ++sizes[s];
  return sizes;
}

Partition build_partition(std::span<const WeightedDocument> docs, const LshFunction& lsh) {
  if (docs.empty()) throw Error("cannot partition an empty corpus");
  Partition p;
  p.n = lsh.n_buckets();
  p.lsh_seed = lsh.seed;
  p.assignment.reserve(docs.size());
  std::vector<std::vector<WeightedDocument>> members(p.n);
  for (const auto& doc : docs) {
    const ShardId s = assign(lsh, doc);
    p.assignment.push_back(s);
    members[s].push_back(doc);
  }
  p.shards.reserve(p.n);
  for (const auto& m : members) p.shards.push_back(std::make_shared<const InvertedIndex>(m));
  return p;
}

std::string_view to_string(DeploymentKind kind) {
  return kind == DeploymentKind::Replication ? "replication" : "repartition";
}

DeploymentKind parse_deployment_kind(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "replication") return DeploymentKind::Replication;
  if (lower == "repartition") return DeploymentKind::Repartition;
  throw Error("unknown deployment kind '" + std::string(name) + "'");
}

std::uint64_t partition_seed(std::uint64_t seed, std::size_t partition_index) {
  return derive_seed(seed, 0x6c7368ULL, partition_index);
}

Deployment build_replication(std::shared_ptr<const Partition> partition,
                             SharedDocuments documents, std::size_t r) {
  if (r < 1) throw Error("redundancy r must be >= 1");
  if (!partition) throw Error("replication needs a partition");
  Deployment d;
  d.kind = DeploymentKind::Replication;
  d.documents = std::move(documents);
  d.partitions.assign(r, std::move(partition));
  return d;
}

Deployment build_replication(SharedDocuments documents, std::size_t r, unsigned k,
                             std::uint64_t seed, std::size_t dim) {
  auto lsh = sample_lsh(k, dim, partition_seed(seed, 0));
  auto partition = std::make_shared<const Partition>(build_partition(*documents, lsh));
  return build_replication(std::move(partition), std::move(documents), r);
}

Deployment build_repartition(SharedDocuments documents, std::size_t r, unsigned k,
                             std::uint64_t seed, std::size_t dim) {
  if (r < 1) throw Error("redundancy r must be >= 1");
  Deployment d;
  d.kind = DeploymentKind::Repartition;
  d.documents = std::move(documents);
  for (std::size_t i = 0; i < r; ++i) {
    auto lsh = sample_lsh(k, dim, partition_seed(seed, i));
    d.partitions.push_back(std::make_shared<const Partition>(build_partition(*d.documents, lsh)));
  }
  return d;
}

void write_partition_dump(std::ostream& out, const Deployment& deployment) {
  const auto& docs = *deployment.documents;
  for (std::size_t i = 0; i < deployment.r(); ++i) {
    const auto& assignment = deployment.partitions[i]->assignment;
    for (std::size_t d = 0; d < docs.size(); ++d) {
      out << docs[d].id << ',' << i << ',' << assignment[d] << '\n';
    }
  }
}

}  // namespace tailsearch
