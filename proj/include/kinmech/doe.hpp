#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "kinmech/integrate.hpp"
#include "kinmech/translate.hpp"

namespace kinmech {

/// Box of initial observed concentrations plus the grid a new experiment
/// would be sampled on. Intermediates always start at zero.
struct DesignSpace {
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<double> times;

  std::size_t n_observed() const { return lower.size(); }
};

struct DoEProposal {
  std::vector<double> x_star;
  double objective = 0.0;
  int evaluations = 0;
};

/// Sum over the grid and the first n_observed species of the squared
/// difference between the two models started from x. Each model runs with
/// its own theta. Returns 0 if either simulation fails.
double discrepancy(const KineticModel& nu, const KineticModel& mu, std::span<const double> x,
                   std::span<const double> times, const IntegratorOptions& integrator = {});

/// Random search over `budget` uniform points in the box, then a bounded
/// coordinate-pattern polish from the best one. Throws std::invalid_argument
/// for budget < 1, an empty or inverted box, or models with fewer species
/// than the box.
DoEProposal design(const KineticModel& nu, const KineticModel& mu, const DesignSpace& space, int budget,
                   std::uint64_t seed, int workers = 1);

}  // namespace kinmech
