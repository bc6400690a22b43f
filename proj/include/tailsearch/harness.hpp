#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "tailsearch/experiment.hpp"
#include "tailsearch/shard_index.hpp"

namespace tailsearch {

// A query subset defined by the success probability of its top shard:
// members have top-p strictly greater than `threshold`.
struct QueryStratum {
  std::string name;
  double threshold = 0.0;
};

std::vector<QueryStratum> default_strata();  // Whole (0), Skewed (0.5), MostSkewed (0.8)

// Stratum name -> indexes of member queries, ascending.
std::map<std::string, std::vector<std::size_t>> stratify_queries(
    std::span<const SuccessDistribution> dists,
    std::span<const QueryStratum> strata = default_strata());

/// Mean probability at each rank position 1..top_k after sorting every
/// distribution in descending order. Positions beyond a distribution's size
/// count as 0.
std::vector<double> profile_distribution(std::span<const SuccessDistribution> dists,
                                         std::size_t top_k);

struct FigureOutput {
  std::string name;
  MetricsTable table;      // empty rows for profile-only figures
  std::string plot_csv;    // x column followed by one column per series
};

struct FigureSuiteOptions {
  std::vector<double> f_sweep = {0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5};
  std::size_t f_sweep_t = 5;
  std::vector<std::size_t> t_sweep = {3, 5, 8, 10};
  double t_sweep_f = 0.1;
  std::vector<double> low_f_sweep = {0.0, 0.05, 0.1, 0.15, 0.2};
  std::size_t profile_top_k = 5;
};

/// Desk-scale analogs of the evaluation figures:
///   fig4  top-shard probability profile (uniform vs CRCS)
///   fig5  Replication schemes vs f (uniform and CRCS)
///   fig6  CRCS profile per query stratum
///   fig7  Replication schemes vs low f, per stratum
///   fig8  Replication schemes vs t at fixed f
///   fig9  Replication vs Repartition, vs f and vs t
/// NoRed is only evaluated at t values with t*r <= n.
std::vector<FigureOutput> run_figure_suite(const Workbench& bench,
                                           const FigureSuiteOptions& options = {});

/// Writes <name>.csv (metrics with a figure column) and <name>_plot.csv.
void write_figure_suite(const std::vector<FigureOutput>& figures,
                        const std::filesystem::path& dir);

}  // namespace tailsearch
