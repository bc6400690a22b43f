#include "tailsearch/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "tailsearch/errors.hpp"
#include "tailsearch/seeding.hpp"

namespace tailsearch {

namespace {

constexpr std::size_t kTrialsPerBlock = 4096;

void check_shape(const SuccessDistribution& dist, const Selection& selection) {
  if (selection.n() != dist.n()) {
    throw InvalidSelectionError("selection covers " + std::to_string(selection.n()) +
                                " shards but the distribution has " +
                                std::to_string(dist.n()));
  }
}

void check_f(double f) {
  if (!(f >= 0.0 && f <= 1.0)) throw Error("miss probability f must be in [0, 1]");
}

double standard_error(double v, std::size_t trials) {
  return std::sqrt(v * (1.0 - v) / static_cast<double>(trials));
}

}  // namespace

SpResult sp_closed_form(const SuccessDistribution& dist, const Selection& selection, double f) {
  check_f(f);
  check_shape(dist, selection);
  if (!selection.satisfies_containment()) {
    throw InvalidSelectionError(
        "selection violates containment: a replica is chosen without the lower ones");
  }
  double total = 0.0;
  double f_pow = 1.0;
  for (const auto& level : selection.levels()) {
    double mass = 0.0;
    for (auto j : level) mass += dist.p[j];
    total += f_pow * mass;
    f_pow *= f;
  }
  return {(1.0 - f) * total, SpMethod::ClosedForm, 0, 0.0};
}

double sp_per_shard(const SuccessDistribution& dist, std::span<const std::size_t> replica_counts,
                    double f) {
  check_f(f);
  double total = 0.0;
  for (std::size_t j = 0; j < dist.n(); ++j) {
    const auto c = j < replica_counts.size() ? replica_counts[j] : 0;
    total += dist.p[j] * (1.0 - std::pow(f, static_cast<double>(c)));
  }
  return total;
}

SpResult sp_monte_carlo(std::span<const SuccessDistribution> dists, const Selection& selection,
                        double f, DeploymentKind kind, std::size_t trials, std::uint64_t seed) {
  check_f(f);
  if (trials < 1) throw Error("Monte Carlo needs at least one trial");
  if (dists.empty()) throw Error("Monte Carlo needs a distribution");
  const std::size_t r = selection.r();
  const std::size_t n = selection.n();
  if (kind == DeploymentKind::Repartition && dists.size() < r)
    throw Error("Repartition Monte Carlo needs one distribution per partition");
  for (const auto& d : dists) check_shape(d, selection);

  // selected[i * n + j] marks cell (i, j).
  std::vector<char> selected(r * n, 0);
  for (const auto& c : selection.cells()) selected[c.partition * n + c.shard] = 1;

  std::vector<std::discrete_distribution<std::size_t>> draw;
  const std::size_t n_draws = kind == DeploymentKind::Replication ? 1 : r;
  for (std::size_t i = 0; i < n_draws; ++i) draw.emplace_back(dists[i].p.begin(), dists[i].p.end());

  std::size_t successes = 0;
  const std::size_t blocks = (trials + kTrialsPerBlock - 1) / kTrialsPerBlock;
  for (std::size_t b = 0; b < blocks; ++b) {
    std::mt19937_64 rng(derive_seed(seed, b));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t end = std::min(trials, (b + 1) * kTrialsPerBlock);
    for (std::size_t trial = b * kTrialsPerBlock; trial < end; ++trial) {
      bool found = false;
      if (kind == DeploymentKind::Replication) {
        const std::size_t j = draw[0](rng);
        for (std::size_t i = 0; i < r; ++i) {
          // Every selected cell draws its miss, even after a success, so the
          // stream consumption per trial is fixed.
          if (selected[i * n + j] && unit(rng) >= f) found = true;
        }
      } else {
        for (std::size_t i = 0; i < r; ++i) {
          const std::size_t j = draw[i](rng);
          if (selected[i * n + j] && unit(rng) >= f) found = true;
        }
      }
      successes += found ? 1 : 0;
    }
  }
  const double v = static_cast<double>(successes) / static_cast<double>(trials);
  return {v, SpMethod::MonteCarlo, trials, standard_error(v, trials)};
}

double binomial_coefficient(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  k = std::min(k, n - k);
  double c = 1.0;
  for (std::size_t i = 1; i <= k; ++i) {
    c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
  }
  return c;
}

BestSelection brute_force_best_selection(const SuccessDistribution& dist, double f,
                                         std::size_t r, std::size_t budget) {
  check_f(f);
  const std::size_t n = dist.n();
  if (r < 1) throw Error("r must be >= 1");
  if (budget < 1 || budget > n * r) throw InvalidSelectionError("budget must be in [1, n*r]");
  if (binomial_coefficient(n * r, budget) > kMaxBruteForceCandidates) {
    throw InstanceTooLargeError("C(" + std::to_string(n * r) + ", " + std::to_string(budget) +
                                ") candidate selections exceed the enumeration limit; "
                                "use property-test scale instances (n <= 6, r <= 3)");
  }

  std::vector<std::size_t> counts(n, 0);
  std::vector<std::size_t> best_counts;
  double best_value = -1.0;

  // Depth-first over shards; `left` replicas still to place.
  auto visit = [&](auto&& self, std::size_t j, std::size_t left) -> void {
    if (j == n) {
      if (left != 0) return;
      const double v = sp_closed_form(dist, selection_from_counts(counts, r), f).value;
      if (v > best_value) {
        best_value = v;
        best_counts = counts;
      }
      return;
    }
    const std::size_t remaining_capacity = (n - j - 1) * r;
    for (std::size_t c = 0; c <= std::min(r, left); ++c) {
      if (left - c > remaining_capacity) continue;
      counts[j] = c;
      self(self, j + 1, left - c);
    }
    counts[j] = 0;
  };
  visit(visit, 0, budget);

  return {selection_from_counts(best_counts, r), {best_value, SpMethod::ClosedForm, 0, 0.0}};
}

std::pair<SpResult, SpResult> compare_replication_repartition(const SuccessDistribution& dist,
                                                              double f, std::size_t r,
                                                              std::size_t budget,
                                                              std::size_t trials,
                                                              std::uint64_t seed) {
  const auto replicated = select_rsmartred(dist, f, r, budget);
  const std::vector<SuccessDistribution> dists(r, dist);
  const auto repartitioned = select_psmartred(dists, f, budget);
  return {sp_closed_form(dist, replicated, f),
          sp_monte_carlo(dists, repartitioned, f, DeploymentKind::Repartition, trials, seed)};
}

}  // namespace tailsearch
