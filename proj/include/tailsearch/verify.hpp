#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace tailsearch {

// Outcome of one analytical property check. `worst_margin` is the smallest
// slack observed across cases (tolerance minus error); negative means the
// property failed somewhere and `counterexample` describes the first failure.
struct PropertyReport {
  std::string name;
  bool passed = true;
  std::size_t cases = 0;
  double worst_margin = 0.0;
  std::string counterexample;
};

struct VerifyOptions {
  std::size_t optimality_instances = 500;
  std::size_t monte_carlo_instances = 50;
  std::size_t monte_carlo_trials = 100000;
  std::size_t identity_cases = 1000;
  std::size_t comparator_trials = 100000;
  std::uint64_t seed = 20240601;
  // Mutation smoke-check: evaluates the closed form with f^(i+1) in place
  // of f^i so the suite is expected to fail.
  bool inject_exponent_fault = false;

  static VerifyOptions quick();
  static VerifyOptions full();
};

PropertyReport verify_optimality(const VerifyOptions& options);
PropertyReport verify_closed_form_vs_monte_carlo(const VerifyOptions& options);
PropertyReport verify_algebraic_identity(const VerifyOptions& options);
PropertyReport verify_repartition_dominance(const VerifyOptions& options);

std::vector<PropertyReport> run_verification(const VerifyOptions& options);

void print_report(std::ostream& out, const std::vector<PropertyReport>& reports);

}  // namespace tailsearch
