#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "tailsearch/corpus.hpp"
#include "tailsearch/retrieval.hpp"

namespace tailsearch {

using ShardId = std::uint32_t;

inline constexpr std::size_t kDefaultHashDim = 1024;

// Random-hyperplane (cosine) LSH over a feature-hashed term space.
struct LshFunction {
  unsigned k = 0;
  std::size_t dim = 0;
  std::uint64_t seed = 0;
  std::vector<std::vector<double>> hyperplanes;  // k x dim

  std::size_t n_buckets() const noexcept { return std::size_t{1} << k; }
};

LshFunction sample_lsh(unsigned k, std::size_t dim, std::uint64_t seed);

// Dense feature-hashed embedding: each term's weight is added at
// hash(term) mod dim.
std::vector<double> embed(const WeightedDocument& doc, std::size_t dim);

// Bit i of the shard index is set iff dot(hyperplane_i, embed(doc)) >= 0.
ShardId assign(const LshFunction& lsh, const WeightedDocument& doc);

// One division of the corpus into n disjoint shards. `assignment` is aligned
// with the document sequence the partition was built from.
struct Partition {
  std::size_t n = 0;
  std::uint64_t lsh_seed = 0;
  std::vector<ShardId> assignment;
  std::vector<std::shared_ptr<const InvertedIndex>> shards;

  std::vector<std::size_t> shard_sizes() const;
};

Partition build_partition(std::span<const WeightedDocument> docs, const LshFunction& lsh);

enum class DeploymentKind { Replication, Repartition };

std::string_view to_string(DeploymentKind kind);
DeploymentKind parse_deployment_kind(std::string_view name);

// r partitions of the same corpus. Under Replication all r entries point to
// the same Partition object.
struct Deployment {
  DeploymentKind kind = DeploymentKind::Replication;
  std::shared_ptr<const std::vector<WeightedDocument>> documents;
  std::vector<std::shared_ptr<const Partition>> partitions;

  std::size_t r() const noexcept { return partitions.size(); }
  std::size_t n() const noexcept { return partitions.empty() ? 0 : partitions.front()->n; }
  const InvertedIndex& shard(std::size_t partition, std::size_t shard) const {
    return *partitions[partition]->shards[shard];
  }
};

using SharedDocuments = std::shared_ptr<const std::vector<WeightedDocument>>;

Deployment build_replication(std::shared_ptr<const Partition> partition,
                             SharedDocuments documents, std::size_t r);

/// Replication of the partition that build_repartition would produce for
/// partition index 0 with the same seed.
Deployment build_replication(SharedDocuments documents, std::size_t r, unsigned k,
                             std::uint64_t seed, std::size_t dim = kDefaultHashDim);

/// Partition i uses an LSH function seeded with partition_seed(seed, i).
Deployment build_repartition(SharedDocuments documents, std::size_t r, unsigned k,
                             std::uint64_t seed, std::size_t dim = kDefaultHashDim);

std::uint64_t partition_seed(std::uint64_t seed, std::size_t partition_index);

// CSV lines `doc_id,partition_index,shard_index` (0-based indexes).
void write_partition_dump(std::ostream& out, const Deployment& deployment);

}  // namespace tailsearch
