#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>

#include "tailsearch/partition.hpp"
#include "tailsearch/selection.hpp"
#include "tailsearch/shard_index.hpp"

namespace tailsearch {

enum class SpMethod { ClosedForm, MonteCarlo };

struct SpResult {
  double value = 0.0;
  SpMethod method = SpMethod::ClosedForm;
  std::size_t trials = 0;
  // sqrt(v (1 - v) / trials) for Monte Carlo; 0 for closed form.
  double standard_error = 0.0;
};

inline constexpr std::size_t kDefaultMonteCarloTrials = 100000;

/// Success probability of a Replication selection:
///   (1 - f) * sum_i f^i * sum_{j in S_i} p(j),   i = 0..r-1.
/// Throws InvalidSelectionError when the selection violates containment or
/// does not match the distribution's shard count.
SpResult sp_closed_form(const SuccessDistribution& dist, const Selection& selection, double f);

/// sum_j p(j) * (1 - f^{c_j}). Algebraically equal to sp_closed_form.
double sp_per_shard(const SuccessDistribution& dist, std::span<const std::size_t> replica_counts,
                    double f);

/// Simulates the miss model directly.
///
/// Replication: the relevant document's shard j is drawn once from dists[0];
/// a trial succeeds iff some selected replica of j responds.
/// Repartition: the document's shard is drawn independently in every
/// partition i from dists[i]; a trial succeeds iff some selected responding
/// cell (i, j_i) holds it.
///
/// Trials run in fixed-size blocks whose random streams derive from
/// (seed, block), so the result does not depend on scheduling.
SpResult sp_monte_carlo(std::span<const SuccessDistribution> dists, const Selection& selection,
                        double f, DeploymentKind kind,
                        std::size_t trials = kDefaultMonteCarloTrials, std::uint64_t seed = 1);

struct BestSelection {
  Selection selection;
  SpResult sp;
};

inline constexpr double kMaxBruteForceCandidates = 1e7;

/// Exhaustive maximizer over replica-count vectors c with sum c = budget and
/// 0 <= c_j <= r. Throws InstanceTooLargeError when C(n*r, budget) exceeds
/// kMaxBruteForceCandidates.
BestSelection brute_force_best_selection(const SuccessDistribution& dist, double f,
                                         std::size_t r, std::size_t budget);

/// (closed-form SP of rSmartRed under Replication,
///  Monte-Carlo SP of pSmartRed under Repartition with dist in every partition)
std::pair<SpResult, SpResult> compare_replication_repartition(
    const SuccessDistribution& dist, double f, std::size_t r, std::size_t budget,
    std::size_t trials = kDefaultMonteCarloTrials, std::uint64_t seed = 1);

double binomial_coefficient(std::size_t n, std::size_t k);

}  // namespace tailsearch
