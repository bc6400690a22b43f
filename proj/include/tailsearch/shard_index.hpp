#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "tailsearch/partition.hpp"
#include "tailsearch/retrieval.hpp"

namespace tailsearch {

inline constexpr std::size_t kDefaultGamma = 500;
inline constexpr double kDefaultSampleProb = 0.4;

// Per-query probability that each shard of one partition holds the relevant
// document. Entries are nonnegative and sum to 1.
struct SuccessDistribution {
  std::vector<double> p;

  std::size_t n() const noexcept { return p.size(); }
  double operator[](std::size_t j) const { return p[j]; }
  double top() const;

  // Throws Error when an entry is negative or the sum is off by more than 1e-9.
  void validate() const;
};

SuccessDistribution uniform_distribution(std::size_t n);

// Centralized sample index for one partition.
struct Csi {
  std::size_t partition = 0;
  std::size_t n_shards = 0;
  double sample_prob = 1.0;
  std::unordered_map<std::string, ShardId> origin;
  InvertedIndex index;

  std::size_t size() const noexcept { return index.size(); }
};

/// One CSI per partition. Documents are kept independently with probability
/// `sample_prob`; the draw for a document depends only on (seed, partition
/// index, document position). Under Replication one CSI is shared by all
/// entries of the returned vector.
std::vector<std::shared_ptr<const Csi>> sample_csi(const Deployment& deployment,
                                                   double sample_prob, std::uint64_t seed);

/// CRCS-Linear shard scores from a ranked list of shard tags: the result at
/// 1-based rank j credits (gamma - j) to its shard; scores are normalized.
/// Falls back to uniform when every score is zero.
SuccessDistribution crcs_linear(std::span<const ShardId> ranked_shards, std::size_t gamma,
                                std::size_t n_shards);

SuccessDistribution estimate_distribution(const Csi& csi, const QueryVector& query,
                                          std::size_t gamma = kDefaultGamma);

}  // namespace tailsearch
