#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "tailsearch/shard_index.hpp"

namespace tailsearch {

// One shard replica: `partition` is the replica (or repartition) index,
// `shard` the shard index within it. Both 0-based.
struct Cell {
  std::size_t partition = 0;
  std::size_t shard = 0;

  friend auto operator<=>(const Cell&, const Cell&) = default;
};

// A set of cells on an r x n grid, stored sorted and duplicate-free.
class Selection {
 public:
  Selection() = default;
  // Throws InvalidSelectionError on out-of-range or duplicate cells.
  Selection(std::size_t n, std::size_t r, std::vector<Cell> cells);

  std::size_t n() const noexcept { return n_; }
  std::size_t r() const noexcept { return r_; }
  std::size_t size() const noexcept { return cells_.size(); }
  const std::vector<Cell>& cells() const noexcept { return cells_; }
  bool contains(Cell c) const;

  // c_j: number of selected replicas of shard j.
  std::vector<std::size_t> replica_counts() const;

  // S_i = {j : cell (i, j) selected}, i = 0..r-1.
  std::vector<std::vector<std::size_t>> levels() const;
  std::vector<std::size_t> level_sizes() const;

  // True iff replica i of a shard is selected only when replicas 0..i-1 are.
  bool satisfies_containment() const;

  // Same replica counts, with each shard's replicas packed into 0..c_j-1.
  // Replicas of one shard are interchangeable, so this is the form used for
  // success-probability analysis.
  Selection canonical() const;

  friend bool operator==(const Selection&, const Selection&) = default;

 private:
  std::size_t n_ = 0;
  std::size_t r_ = 0;
  std::vector<Cell> cells_;
};

Selection selection_from_counts(std::span<const std::size_t> replica_counts, std::size_t r);

struct SelectionBudget {
  std::size_t t = 1;
  std::size_t r = 1;

  std::size_t budget() const noexcept { return t * r; }
};

enum class Scheme { Random, NoRed, RFullRed, RSmartRed, PTop, PSmartRed };

inline constexpr Scheme kAllSchemes[] = {Scheme::Random,    Scheme::NoRed, Scheme::RFullRed,
                                         Scheme::RSmartRed, Scheme::PTop,  Scheme::PSmartRed};

std::string_view to_string(Scheme scheme);
std::optional<Scheme> parse_scheme(std::string_view name);
// pTop and pSmartRed need a Repartition deployment.
bool requires_repartition(Scheme scheme);

// Shard indexes ordered by probability descending, then index ascending.
std::vector<std::size_t> rank_shards(const SuccessDistribution& dist);

Selection select_random(std::size_t n, std::size_t r, std::size_t budget, std::uint64_t seed);

/// The `budget` most probable shards of partition 0, one replica each.
Selection select_nored(const SuccessDistribution& dist, std::size_t budget, std::size_t r = 1);

/// Top-t shards with all r replicas.
Selection select_rfullred(const SuccessDistribution& dist, std::size_t t, std::size_t r);

/// Scores replica i (0-based) of shard j as f^i * p(j) and keeps the
/// `budget` best cells, ties broken by (replica asc, shard asc).
Selection select_rsmartred(const SuccessDistribution& dist, double f, std::size_t r,
                           std::size_t budget);

/// Top-t shards of every partition under that partition's own distribution.
Selection select_ptop(std::span<const SuccessDistribution> dists, std::size_t t);

/// Runs rSmartRed on dists[0] to obtain level sizes t_0 >= t_1 >= ..., then
/// takes the t_i most probable shards of partition i under dists[i].
Selection select_psmartred(std::span<const SuccessDistribution> dists, double f,
                           std::size_t budget);

}  // namespace tailsearch
