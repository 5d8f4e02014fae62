#pragma once

#include <string>
#include <utility>
#include <vector>

namespace kinmech {

/// Overall reaction over the observed species. Negative coefficients are
/// reactants, positive are products; intermediates are never listed.
struct OverallReaction {
  std::vector<std::string> species_names;
  std::vector<int> stoich;

  std::size_t size() const { return stoich.size(); }
  int reactant_molecules() const;
  int product_molecules() const;
};

struct RateBounds {
  double lower = 0.0;
  double upper = 10.0;
};

struct ProblemSpec {
  OverallReaction overall;
  int min_steps = 1;
  int min_species = 1;
  RateBounds rate_bounds;
  double gen_time_budget_s = 600.0;
  int max_iterations = 5;
  int multistart_count = 10;
  std::vector<double> noise_sd;  // optional, per observed species
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Matrix dimensions for one discovery iteration. Each iteration adds exactly
/// one step and one intermediate.
struct IterationPlan {
  int iteration_index = 1;
  int n_steps = 1;
  int n_species = 1;
  int n_intermediates = 0;

  bool operator==(const IterationPlan&) const = default;
};

ValidationReport validate(const OverallReaction& overall);
ValidationReport validate(const ProblemSpec& spec);

/// Smallest (steps, species) that admits at least one feasible mechanism.
/// Searches sizes in order of total matrix area via the enumerator.
/// Throws std::runtime_error when nothing is found within twice the
/// molecule-count bound.
std::pair<int, int> suggest_minimum_size(const OverallReaction& overall);

/// Throws std::out_of_range unless 1 <= iteration_index <= max_iterations.
IterationPlan plan_iteration(const ProblemSpec& spec, int iteration_index);

}  // namespace kinmech
