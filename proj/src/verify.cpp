#include "tailsearch/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include <fmt/core.h>

#include "tailsearch/analysis.hpp"
#include "tailsearch/seeding.hpp"

namespace tailsearch {

namespace {

using Evaluator = std::function<double(const SuccessDistribution&, const Selection&, double)>;

Evaluator make_evaluator(const VerifyOptions& options) {
  if (!options.inject_exponent_fault) {
    return [](const SuccessDistribution& p, const Selection& s, double f) {
      return sp_closed_form(p, s, f).value;
    };
  }
  return [](const SuccessDistribution& p, const Selection& s, double f) {
    double total = 0.0;
    double f_pow = f;  // fault: starts at f^1
    for (const auto& level : s.levels()) {
      double mass = 0.0;
      for (auto j : level) mass += p.p[j];
      total += f_pow * mass;
      f_pow *= f;
    }
    return (1.0 - f) * total;
  };
}

// Random distribution over n shards drawn from one of several shapes so that
// flat, skewed, sparse and tied inputs are all exercised.
SuccessDistribution random_distribution(std::size_t n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> shape(0, 3);
  std::exponential_distribution<double> expo(1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> w(n);
  switch (shape(rng)) {
    case 0:  // flat Dirichlet
      for (auto& x : w) x = expo(rng);
      break;
    case 1:  // strongly skewed
      for (auto& x : w) x = std::pow(unit(rng), 4.0);
      break;
    case 2:  // sparse: some exact zeros
      for (auto& x : w) x = unit(rng) < 0.4 ? 0.0 : expo(rng);
      break;
    default:  // ties: values from a small set
      for (auto& x : w) x = static_cast<double>(1 + rng() % 3);
      break;
  }
  double sum = 0.0;
  for (double x : w) sum += x;
  if (sum <= 0.0) {
    w.assign(n, 0.0);
    w[rng() % n] = 1.0;
    sum = 1.0;
  }
  for (auto& x : w) x /= sum;
  return {std::move(w)};
}

std::vector<std::size_t> random_counts(std::size_t n, std::size_t r, std::mt19937_64& rng) {
  std::vector<std::size_t> counts(n);
  std::uniform_int_distribution<std::size_t> pick(0, r);
  for (auto& c : counts) c = pick(rng);
  return counts;
}

std::string describe(const SuccessDistribution& p, double f, std::size_t r, std::size_t budget,
                     std::span<const std::size_t> counts) {
  std::ostringstream os;
  os << "p=(";
  for (std::size_t j = 0; j < p.n(); ++j) os << (j ? "," : "") << fmt::format("{:.6g}", p.p[j]);
  os << ") f=" << f << " r=" << r << " budget=" << budget << " c=(";
  for (std::size_t j = 0; j < counts.size(); ++j) os << (j ? "," : "") << counts[j];
  os << ")";
  return os.str();
}

void record(PropertyReport& report, double margin, const std::function<std::string()>& what) {
  ++report.cases;
  if (report.cases == 1 || margin < report.worst_margin) report.worst_margin = margin;
  if (margin < 0.0 && report.passed) {
    report.passed = false;
    report.counterexample = what();
  }
}

}  // namespace

VerifyOptions VerifyOptions::quick() {
  VerifyOptions o;
  o.optimality_instances = 100;
  o.monte_carlo_instances = 20;
  o.monte_carlo_trials = 20000;
  o.identity_cases = 1000;
  o.comparator_trials = 20000;
  return o;
}

VerifyOptions VerifyOptions::full() { return VerifyOptions{}; }

PropertyReport verify_optimality(const VerifyOptions& options) {
  PropertyReport report{"rSmartRed optimality (exhaustive search)", true, 0, 0.0, {}};
  const auto evaluate = make_evaluator(options);
  std::mt19937_64 rng(derive_seed(options.seed, 1));
  std::uniform_int_distribution<std::size_t> pick_n(1, 6), pick_r(1, 3), pick_f(0, 19);
  for (std::size_t inst = 0; inst < options.optimality_instances; ++inst) {
    const std::size_t n = pick_n(rng), r = pick_r(rng);
    const double f = 0.05 * static_cast<double>(pick_f(rng));
    const auto p = random_distribution(n, rng);
    for (std::size_t budget = 1; budget <= n * r; ++budget) {
      const auto smart = select_rsmartred(p, f, r, budget);
      const auto best = brute_force_best_selection(p, f, r, budget);
      const double got = evaluate(p, smart, f);
      record(report, 1e-12 - std::abs(got - best.sp.value), [&] {
        return describe(p, f, r, budget, smart.replica_counts()) +
               fmt::format(" rSmartRed={:.15g} exhaustive max={:.15g}", got, best.sp.value);
      });
    }
  }
  return report;
}

PropertyReport verify_closed_form_vs_monte_carlo(const VerifyOptions& options) {
  PropertyReport report{"closed form vs Monte Carlo (|diff| <= 4 SE)", true, 0, 0.0, {}};
  const auto evaluate = make_evaluator(options);
  std::mt19937_64 rng(derive_seed(options.seed, 2));
  std::uniform_int_distribution<std::size_t> pick_n(2, 8), pick_r(1, 3), pick_f(1, 19);
  for (std::size_t inst = 0; inst < options.monte_carlo_instances; ++inst) {
    const std::size_t n = pick_n(rng), r = pick_r(rng);
    const double f = 0.05 * static_cast<double>(pick_f(rng));
    const auto p = random_distribution(n, rng);
    auto counts = random_counts(n, r, rng);
    if (std::all_of(counts.begin(), counts.end(), [](auto c) { return c == 0; })) counts[0] = 1;
    const auto selection = selection_from_counts(counts, r);
    const double closed = evaluate(p, selection, f);
    const auto mc = sp_monte_carlo(std::span(&p, 1), selection, f, DeploymentKind::Replication,
                                   options.monte_carlo_trials, derive_seed(options.seed, 3, inst));
    const double se = mc.standard_error;
    record(report, 4.0 * se - std::abs(mc.value - closed), [&] {
      return describe(p, f, r, selection.size(), counts) +
             fmt::format(" closed={:.6f} mc={:.6f} se={:.6f}", closed, mc.value, se);
    });
  }
  return report;
}

PropertyReport verify_algebraic_identity(const VerifyOptions& options) {
  PropertyReport report{"level-sum form == per-shard form (1e-12)", true, 0, 0.0, {}};
  const auto evaluate = make_evaluator(options);
  std::mt19937_64 rng(derive_seed(options.seed, 4));
  std::uniform_int_distribution<std::size_t> pick_n(1, 12), pick_r(1, 5);
  std::uniform_real_distribution<double> pick_f(0.0, 1.0);
  for (std::size_t c = 0; c < options.identity_cases; ++c) {
    const std::size_t n = pick_n(rng), r = pick_r(rng);
    const double f = pick_f(rng);
    const auto p = random_distribution(n, rng);
    const auto counts = random_counts(n, r, rng);
    const auto selection = selection_from_counts(counts, r);
    const double levels = evaluate(p, selection, f);
    const double shards = sp_per_shard(p, counts, f);
    record(report, 1e-12 - std::abs(levels - shards), [&] {
      return describe(p, f, r, selection.size(), counts) +
             fmt::format(" level-sum={:.15g} per-shard={:.15g}", levels, shards);
    });
  }
  return report;
}

PropertyReport verify_repartition_dominance(const VerifyOptions& options) {
  PropertyReport report{"pSmartRed/Repartition >= rSmartRed/Replication - 3 SE", true, 0, 0.0,
                        {}};
  const auto evaluate = make_evaluator(options);
  constexpr std::size_t n = 16;
  constexpr std::size_t r = 3;
  std::vector<std::pair<std::string, SuccessDistribution>> shapes;
  shapes.emplace_back("uniform", uniform_distribution(n));
  {
    std::vector<double> w(n);
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) sum += w[j] = std::pow(0.5, static_cast<double>(j));
    for (auto& x : w) x /= sum;
    shapes.emplace_back("geometric(0.5)", SuccessDistribution{w});
  }
  {
    std::vector<double> w(n, 0.2 / static_cast<double>(n - 1));
    w[0] = 0.8;
    shapes.emplace_back("top=0.8", SuccessDistribution{w});
  }
  std::uint64_t cell = 0;
  for (const auto& [name, p] : shapes) {
    for (double f : {0.05, 0.1, 0.2}) {
      for (std::size_t budget : {6, 9, 15}) {
        const std::vector<SuccessDistribution> dists(r, p);
        const double replicated = evaluate(p, select_rsmartred(p, f, r, budget), f);
        const auto repartitioned =
            sp_monte_carlo(dists, select_psmartred(dists, f, budget), f,
                           DeploymentKind::Repartition, options.comparator_trials,
                           derive_seed(options.seed, 5, cell++));
        const double margin = repartitioned.value + 3.0 * repartitioned.standard_error - replicated;
        record(report, margin, [&, name = name] {
          return fmt::format("{} f={} r={} budget={} replication={:.6f} repartition={:.6f} se={:.6f}",
                             name, f, r, budget, replicated, repartitioned.value,
                             repartitioned.standard_error);
        });
      }
    }
  }
  return report;
}

std::vector<PropertyReport> run_verification(const VerifyOptions& options) {
  return {verify_optimality(options), verify_closed_form_vs_monte_carlo(options),
          verify_algebraic_identity(options), verify_repartition_dominance(options)};
}

void print_report(std::ostream& out, const std::vector<PropertyReport>& reports) {
  for (const auto& r : reports) {
    out << fmt::format("[{}] {} (cases={}, worst margin={:.3e})\n", r.passed ? "PASS" : "FAIL",
                       r.name, r.cases, r.worst_margin);
    if (!r.passed) out << "  counterexample: " << r.counterexample << '\n';
  }
}

}  // namespace tailsearch
