#include "tailsearch/selection.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <random>
#include <string>

#include "tailsearch/errors.hpp"

namespace tailsearch {

Selection::Selection(std::size_t n, std::size_t r, std::vector<Cell> cells)
    : n_(n), r_(r), cells_(std::move(cells)) {
  std::sort(cells_.begin(), cells_.end());
  for (std::size_t k = 0; k < cells_.size(); ++k) {
    const auto& c = cells_[k];
    if (c.partition >= r_ || c.shard >= n_) {
      throw InvalidSelectionError("cell (" + std::to_string(c.partition + 1) + ", D" +
                                  std::to_string(c.shard + 1) + ") is outside the " +
                                  std::to_string(r_) + "x" + std::to_string(n_) + " grid");
    }
    if (k > 0 && cells_[k - 1] == c) {
      throw InvalidSelectionError("cell (" + std::to_string(c.partition + 1) + ", D" +
                                  std::to_string(c.shard + 1) + ") selected twice");
    }
  }
}

bool Selection::contains(Cell c) const {
  return std::binary_search(cells_.begin(), cells_.end(), c);
}

std::vector<std::size_t> Selection::replica_counts() const {
  std::vector<std::size_t> counts(n_, 0);
  for (const auto& c : cells_) ++counts[c.shard];
  return counts;
}

std::vector<std::vector<std::size_t>> Selection::levels() const {
  std::vector<std::vector<std::size_t>> out(r_);
  for (const auto& c : cells_) out[c.partition].push_back(c.shard);
  return out;
}

std::vector<std::size_t> Selection::level_sizes() const {
  std::vector<std::size_t> sizes(r_, 0);
  for (const auto& c : cells_) ++sizes[c.partition];
  return sizes;
}

bool Selection::satisfies_containment() const {
  for (const auto& c : cells_) {
    if (c.partition > 0 && !contains({c.partition - 1, c.shard})) return false;
  }
  return true;
}

Selection Selection::canonical() const { return selection_from_counts(replica_counts(), r_); }

Selection selection_from_counts(std::span<const std::size_t> replica_counts, std::size_t r) {
  std::vector<Cell> cells;
  for (std::size_t j = 0; j < replica_counts.size(); ++j) {
    if (replica_counts[j] > r) {
      throw InvalidSelectionError("shard D" + std::to_string(j + 1) + " has more than r=" +
                                  std::to_string(r) + " replicas");
    }
    for (std::size_t i = 0; i < replica_counts[j]; ++i) cells.push_back({i, j});
  }
  return Selection(replica_counts.size(), r, std::move(cells));
}

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::Random: return "Random";
    case Scheme::NoRed: return "NoRed";
    case Scheme::RFullRed: return "rFullRed";
    case Scheme::RSmartRed: return "rSmartRed";
    case Scheme::PTop: return "pTop";
    case Scheme::PSmartRed: return "pSmartRed";
  }
  return "?";
}

std::optional<Scheme> parse_scheme(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (auto s : kAllSchemes) {
    std::string candidate(to_string(s));
    std::transform(candidate.begin(), candidate.end(), candidate.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (candidate == lower) return s;
  }
  return std::nullopt;
}

bool requires_repartition(Scheme scheme) {
  return scheme == Scheme::PTop || scheme == Scheme::PSmartRed;
}

std::vector<std::size_t> rank_shards(const SuccessDistribution& dist) {
  std::vector<std::size_t> order(dist.n());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dist.p[a] > dist.p[b]; });
  return order;
}

Selection select_random(std::size_t n, std::size_t r, std::size_t budget, std::uint64_t seed) {
  if (budget > n * r) throw InvalidSelectionError("budget exceeds the n*r shard grid");
  std::vector<Cell> grid;
  grid.reserve(n * r);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < n; ++j) grid.push_back({i, j});
  std::mt19937_64 rng(seed);
  // Partial Fisher-Yates: the first `budget` slots are a uniform sample.
  for (std::size_t k = 0; k < budget; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, grid.size() - 1);
    std::swap(grid[k], grid[pick(rng)]);
  }
  grid.resize(budget);
  return Selection(n, r, std::move(grid));
}

Selection select_nored(const SuccessDistribution& dist, std::size_t budget, std::size_t r) {
  if (budget > dist.n()) {
    throw InvalidSelectionError("NoRed needs budget <= n (budget " + std::to_string(budget) +
                                ", n " + std::to_string(dist.n()) + ")");
  }
  const auto order = rank_shards(dist);
  std::vector<Cell> cells;
  for (std::size_t k = 0; k < budget; ++k) cells.push_back({0, order[k]});
  return Selection(dist.n(), r, std::move(cells));
}

Selection select_rfullred(const SuccessDistribution& dist, std::size_t t, std::size_t r) {
  if (t > dist.n()) throw InvalidSelectionError("rFullRed needs t <= n");
  const auto order = rank_shards(dist);
  std::vector<Cell> cells;
  for (std::size_t k = 0; k < t; ++k)
    for (std::size_t i = 0; i < r; ++i) cells.push_back({i, order[k]});
  return Selection(dist.n(), r, std::move(cells));
}

Selection select_rsmartred(const SuccessDistribution& dist, double f, std::size_t r,
                           std::size_t budget) {
  if (f < 0.0 || f > 1.0) throw InvalidSelectionError("miss probability f must be in [0, 1]");
  const std::size_t n = dist.n();
  if (budget > n * r) throw InvalidSelectionError("budget exceeds the n*r shard grid");

  struct Scored {
    double score;
    Cell cell;
  };
  std::vector<Scored> scored;
  scored.reserve(n * r);
  for (std::size_t j = 0; j < n; ++j) {
    // Repeated multiplication keeps scores nonincreasing in the replica
    // index, which containment depends on.
    double s = dist.p[j];
    for (std::size_t i = 0; i < r; ++i) {
      scored.push_back({s, {i, j}});
      s *= f;
    }
  }
  auto better = [](const Scored& a, const Scored& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.cell < b.cell;
  };
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(budget),
                    scored.end(), better);
  std::vector<Cell> cells;
  cells.reserve(budget);
  for (std::size_t k = 0; k < budget; ++k) cells.push_back(scored[k].cell);
  return Selection(n, r, std::move(cells));
}

Selection select_ptop(std::span<const SuccessDistribution> dists, std::size_t t) {
  if (dists.empty()) throw InvalidSelectionError("pTop needs at least one partition");
  const std::size_t n = dists.front().n();
  if (t > n) throw InvalidSelectionError("pTop needs t <= n");
  std::vector<Cell> cells;
  for (std::size_t i = 0; i < dists.size(); ++i) {
    const auto order = rank_shards(dists[i]);
    for (std::size_t k = 0; k < t; ++k) cells.push_back({i, order[k]});
  }
  return Selection(n, dists.size(), std::move(cells));
}

Selection select_psmartred(std::span<const SuccessDistribution> dists, double f,
                           std::size_t budget) {
  if (dists.empty()) throw InvalidSelectionError("pSmartRed needs at least one partition");
  const std::size_t r = dists.size();
  const std::size_t n = dists.front().n();
  const auto sizes = select_rsmartred(dists.front(), f, r, budget).level_sizes();
  std::vector<Cell> cells;
  for (std::size_t i = 0; i < r; ++i) {
    const auto order = rank_shards(dists[i]);
    for (std::size_t k = 0; k < sizes[i]; ++k) cells.push_back({i, order[k]});
  }
  return Selection(n, r, std::move(cells));
}

}  // namespace tailsearch
