#include "kinmech/problem.hpp"

#include <stdexcept>
#include <string>

#include "kinmech/genmech.hpp"

namespace kinmech {

int OverallReaction::reactant_molecules() const {
  int n = 0;
  for (int s : stoich) n += s < 0 ? -s : 0;
  return n;
}

int OverallReaction::product_molecules() const {
  int n = 0;
  for (int s : stoich) n += s > 0 ? s : 0;
  return n;
}

ValidationReport validate(const OverallReaction& overall) {
  ValidationReport report;
  if (overall.species_names.size() != overall.stoich.size())
    report.violations.emplace_back("species names and stoichiometry differ in length");
  bool has_reactant = false;
  bool has_product = false;
  for (std::size_t j = 0; j < overall.stoich.size(); ++j) {
    const int s = overall.stoich[j];
    has_reactant = has_reactant || s < 0;
    has_product = has_product || s > 0;
    if (s == 0) {
      const std::string name = j < overall.species_names.size() ? overall.species_names[j] : std::to_string(j);
      report.violations.push_back("zero stoichiometric coefficient for observed species " + name);
    }
  }
  if (!has_reactant) report.violations.emplace_back("overall reaction has no reactant");
  if (!has_product) report.violations.emplace_back("overall reaction has no product");
  for (std::size_t a = 0; a < overall.species_names.size(); ++a) {
    if (overall.species_names[a].empty()) report.violations.emplace_back("empty species name");
    for (std::size_t b = a + 1; b < overall.species_names.size(); ++b) {
      if (overall.species_names[a] == overall.species_names[b])
        report.violations.push_back("duplicate species name " + overall.species_names[a]);
    }
  }
  return report;
}

ValidationReport validate(const ProblemSpec& spec) {
  ValidationReport report = validate(spec.overall);
  if (spec.min_steps < 1) report.violations.emplace_back("min_steps must be positive");
  if (spec.min_species < 1) report.violations.emplace_back("min_species must be positive");
  if (spec.min_species < static_cast<int>(spec.overall.size()))
    report.violations.emplace_back("min_species below observed count");
  if (spec.rate_bounds.lower < 0) report.violations.emplace_back("negative lower rate bound");
  if (!(spec.rate_bounds.lower < spec.rate_bounds.upper)) report.violations.emplace_back("empty bounds interval");
  if (spec.max_iterations < 1) report.violations.emplace_back("max_iterations must be positive");
  if (spec.multistart_count < 1) report.violations.emplace_back("multistart_count must be positive");
  if (!(spec.gen_time_budget_s > 0)) report.violations.emplace_back("generation time budget must be positive");
  if (!spec.noise_sd.empty() && spec.noise_sd.size() != spec.overall.size())
    report.violations.emplace_back("noise model length differs from observed count");
  for (double sd : spec.noise_sd) {
    if (sd < 0) report.violations.emplace_back("negative noise standard deviation");
  }
  return report;
}

std::pair<int, int> suggest_minimum_size(const OverallReaction& overall) {
  if (!validate(overall).ok()) throw std::invalid_argument("invalid overall reaction");
  const int observed = static_cast<int>(overall.size());
  const int bound = std::max((overall.reactant_molecules() + 1) / 2, (overall.product_molecules() + 1) / 2);
  const int step_cap = 2 * bound;
  const int species_cap = observed + step_cap;
  // Sizes are visited by increasing matrix perimeter, fewer steps first.
  for (int total = bound + observed; total <= step_cap + species_cap; ++total) {
    for (int steps = bound; steps <= step_cap; ++steps) {
      const int species = total - steps;
      if (species < observed || species > species_cap) continue;
      IterationPlan plan{1, steps, species, species - observed};
      EnumerateOptions opts;
      opts.time_budget_s = 60.0;
      if (!enumerate(plan, overall, opts).mechanisms.empty()) return {steps, species};
    }
  }
  throw std::runtime_error("no feasible mechanism size within the search cap");
}

IterationPlan plan_iteration(const ProblemSpec& spec, int iteration_index) {
  if (iteration_index < 1 || iteration_index > spec.max_iterations)
    throw std::out_of_range("iteration index out of range");
  const int steps = spec.min_steps + iteration_index - 1;
  const int species = spec.min_species + iteration_index - 1;
  return {iteration_index, steps, species, species - static_cast<int>(spec.overall.size())};
}

}  // namespace kinmech
