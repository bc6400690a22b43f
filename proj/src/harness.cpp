#include "tailsearch/harness.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <sstream>

#include <fmt/core.h>

#include "tailsearch/errors.hpp"

namespace tailsearch {

std::vector<QueryStratum> default_strata() {
  return {{"Whole", 0.0}, {"Skewed", 0.5}, {"MostSkewed", 0.8}};
}

std::map<std::string, std::vector<std::size_t>> stratify_queries(
    std::span<const SuccessDistribution> dists, std::span<const QueryStratum> strata) {
  std::map<std::string, std::vector<std::size_t>> out;
  for (const auto& s : strata) out[s.name];
  for (std::size_t q = 0; q < dists.size(); ++q) {
    const double top = dists[q].top();
    for (const auto& s : strata) {
      if (top > s.threshold) out[s.name].push_back(q);
    }
  }
  return out;
}

std::vector<double> profile_distribution(std::span<const SuccessDistribution> dists,
                                         std::size_t top_k) {
  if (top_k < 1) throw Error("profile needs top_k >= 1");
  std::vector<double> sums(top_k, 0.0);
  if (dists.empty()) return sums;
  for (const auto& d : dists) {
    auto sorted = d.p;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    for (std::size_t k = 0; k < top_k && k < sorted.size(); ++k) sums[k] += sorted[k];
  }
  for (auto& s : sums) s /= static_cast<double>(dists.size());
  return sums;
}

namespace {

enum class Axis { F, T };

std::string series_name(const MetricsRow& row, bool with_deployment) {
  std::string name(to_string(row.scheme));
  if (with_deployment) name += "/" + std::string(to_string(row.deployment));
  return name;
}

std::string plot_csv(const MetricsTable& table, Axis axis) {
  std::vector<std::string> series;
  std::vector<double> xs;
  bool mixed = false;
  for (const auto& row : table.rows) {
    mixed = mixed || row.deployment != table.rows.front().deployment;
  }
  for (const auto& row : table.rows) {
    const auto name = series_name(row, mixed);
    if (std::find(series.begin(), series.end(), name) == series.end()) series.push_back(name);
    const double x = axis == Axis::F ? row.f : static_cast<double>(row.t);
    if (std::find(xs.begin(), xs.end(), x) == xs.end()) xs.push_back(x);
  }
  std::sort(xs.begin(), xs.end());

  std::ostringstream os;
  os << (axis == Axis::F ? "f" : "t");
  for (const auto& s : series) os << ',' << s;
  os << '\n';
  for (double x : xs) {
    os << fmt::format("{}", x);
    for (const auto& s : series) {
      os << ',';
      for (const auto& row : table.rows) {
        const double rx = axis == Axis::F ? row.f : static_cast<double>(row.t);
        if (rx == x && series_name(row, mixed) == s) {
          os << fmt::format("{:.6f}", row.recall_mean);
          break;
        }
      }
    }
    os << '\n';
  }
  return os.str();
}

std::string profile_csv(const std::vector<std::string>& names,
                        const std::vector<std::vector<double>>& profiles) {
  std::ostringstream os;
  os << "rank";
  for (const auto& n : names) os << ',' << n;
  os << '\n';
  const std::size_t k = profiles.empty() ? 0 : profiles.front().size();
  for (std::size_t i = 0; i < k; ++i) {
    os << i + 1;
    for (const auto& p : profiles) os << ',' << fmt::format("{:.6f}", p[i]);
    os << '\n';
  }
  return os.str();
}

// Restricts per-query recall to a subset of queries and recomputes the
// summary statistics.
MetricsTable restrict_to(const MetricsTable& table, std::span<const std::size_t> members,
                         const std::string& figure) {
  MetricsTable out;
  for (auto q : members) out.query_ids.push_back(table.query_ids[q]);
  for (const auto& row : table.rows) {
    MetricsRow r = row;
    r.figure = figure;
    r.per_query.clear();
    for (auto q : members) r.per_query.push_back(row.per_query[q]);
    r.n_queries = r.per_query.size();
    r.recall_mean = r.per_query.empty() ? 0.0 : mean(r.per_query);
    r.recall_std = sample_std(r.per_query);
    out.rows.push_back(std::move(r));
  }
  return out;
}

void append(MetricsTable& into, MetricsTable&& from) {
  if (into.query_ids.empty()) into.query_ids = std::move(from.query_ids);
  for (auto& row : from.rows) into.rows.push_back(std::move(row));
}

}  // namespace

std::vector<FigureOutput> run_figure_suite(const Workbench& bench,
                                           const FigureSuiteOptions& options) {
  const auto& config = bench.config();
  const std::size_t n = config.n();
  const std::size_t r = config.r;
  const auto replication = DeploymentKind::Replication;
  const auto repartition = DeploymentKind::Repartition;
  if (!bench.has(replication) || !bench.has(repartition))
    throw ConfigError("deployments", "the figure suite needs replication and repartition");

  std::vector<SuccessDistribution> crcs;
  for (const auto& p : bench.prepared(replication)) crcs.push_back(p.crcs.front());

  std::vector<FigureOutput> figures;
  const std::vector<Scheme> replication_schemes = {Scheme::NoRed, Scheme::RFullRed,
                                                   Scheme::RSmartRed};
  const auto sources = {std::pair{DistributionSource::Uniform, std::string("uniform")},
                        std::pair{DistributionSource::Crcs, std::string("crcs")}};

  {
    const std::vector<SuccessDistribution> uniform(crcs.size(), uniform_distribution(n));
    figures.push_back({"fig4_profile", {},
                       profile_csv({"uniform", "crcs"},
                                   {profile_distribution(uniform, options.profile_top_k),
                                    profile_distribution(crcs, options.profile_top_k)})});
  }

  for (const auto& [source, label] : sources) {
    ExperimentGrid grid{replication_schemes, {replication}, options.f_sweep,
                        {options.f_sweep_t}, source, "fig5_" + label};
    auto table = bench.run(grid);
    auto plot = plot_csv(table, Axis::F);
    figures.push_back({grid.figure, std::move(table), std::move(plot)});
  }

  const auto strata = default_strata();
  const auto members = stratify_queries(crcs, strata);
  {
    std::vector<std::string> names;
    std::vector<std::vector<double>> profiles;
    for (const auto& s : strata) {
      std::vector<SuccessDistribution> subset;
      for (auto q : members.at(s.name)) subset.push_back(crcs[q]);
      names.push_back(s.name);
      profiles.push_back(profile_distribution(subset, options.profile_top_k));
    }
    figures.push_back({"fig6_profile", {}, profile_csv(names, profiles)});

    ExperimentGrid grid{replication_schemes, {replication}, options.low_f_sweep,
                        {options.f_sweep_t}, DistributionSource::Crcs, ""};
    const auto whole = bench.run(grid);
    for (const auto& s : strata) {
      std::string name = "fig7_" + s.name;
      std::transform(name.begin(), name.end(), name.begin(),
                     [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
      auto table = restrict_to(whole, members.at(s.name), name);
      auto plot = plot_csv(table, Axis::F);
      figures.push_back({name, std::move(table), std::move(plot)});
    }
  }

  // NoRed cannot spend a budget larger than one partition.
  std::vector<std::size_t> nored_t;
  for (auto t : options.t_sweep) {
    if (t * r <= n) nored_t.push_back(t);
  }
  for (const auto& [source, label] : sources) {
    const std::string name = "fig8_" + label;
    MetricsTable table;
    if (!nored_t.empty()) {
      append(table, bench.run({{Scheme::NoRed}, {replication}, {options.t_sweep_f}, nored_t,
                               source, name}));
    }
    append(table, bench.run({{Scheme::RFullRed, Scheme::RSmartRed}, {replication},
                             {options.t_sweep_f}, options.t_sweep, source, name}));
    auto plot = plot_csv(table, Axis::T);
    figures.push_back({name, std::move(table), std::move(plot)});
  }

  const std::vector<Scheme> comparison = {Scheme::RFullRed, Scheme::RSmartRed, Scheme::PTop,
                                          Scheme::PSmartRed};
  {
    MetricsTable table;
    for (auto scheme : comparison) {
      const auto kind = requires_repartition(scheme) ? repartition : replication;
      append(table, bench.run({{scheme}, {kind}, options.low_f_sweep, {options.f_sweep_t},
                               DistributionSource::Crcs, "fig9_f"}));
    }
    auto plot = plot_csv(table, Axis::F);
    figures.push_back({"fig9_f", std::move(table), std::move(plot)});
  }
  {
    MetricsTable table;
    for (auto scheme : comparison) {
      const auto kind = requires_repartition(scheme) ? repartition : replication;
      append(table, bench.run({{scheme}, {kind}, {options.t_sweep_f}, options.t_sweep,
                               DistributionSource::Crcs, "fig9_t"}));
    }
    auto plot = plot_csv(table, Axis::T);
    figures.push_back({"fig9_t", std::move(table), std::move(plot)});
  }
  return figures;
}

void write_figure_suite(const std::vector<FigureOutput>& figures,
                        const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& fig : figures) {
    if (!fig.table.rows.empty()) {
      std::ofstream out(dir / (fig.name + ".csv"));
      if (!out) throw Error("cannot write '" + (dir / (fig.name + ".csv")).string() + "'");
      fig.table.write_csv(out, true);
    }
    std::ofstream plot(dir / (fig.name + "_plot.csv"));
    if (!plot) throw Error("cannot write '" + (dir / (fig.name + "_plot.csv")).string() + "'");
    plot << fig.plot_csv;
  }
}

}  // namespace tailsearch
