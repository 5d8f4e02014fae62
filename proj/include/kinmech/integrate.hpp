#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "kinmech/translate.hpp"

namespace kinmech {

struct IntegratorOptions {
  double rtol = 1e-6;
  double atol = 1e-8;
  /// Step cap per output interval; exceeding it fails the trajectory.
  int max_steps_per_interval = 20000;
};

struct Trajectory {
  enum class Status { kOk, kFailed };

  std::vector<double> times;
  Eigen::MatrixXd states;  // times.size() x n_species
  Status status = Status::kOk;
  std::string failure;

  bool ok() const { return status == Status::kOk; }
};

/// Adaptive Dormand-Prince 5(4) solution sampled on the grid. Never throws
/// for numerical trouble: step-size collapse, the step cap and non-finite
/// states come back as a failed status. Throws std::invalid_argument for a
/// malformed grid or initial state.
Trajectory simulate(const KineticModel& model, std::span<const double> theta, std::span<const double> c0,
                    std::span<const double> times, const IntegratorOptions& options = {});

inline Trajectory simulate(const KineticModel& model, std::span<const double> c0, std::span<const double> times,
                           const IntegratorOptions& options = {}) {
  return simulate(model, model.theta, c0, times, options);
}

/// Integer basis of the left null space of the model's coefficient matrix:
/// every w with w . (coefficient row) = 0 for all rate terms. Computed with
/// exact rational elimination; empty when only the zero vector qualifies.
std::vector<std::vector<long long>> conserved_vectors(const KineticModel& model);

/// Largest |w.c(t) - w.c0| / max(1, |w.c0|) over the trajectory and basis.
double max_conservation_error(const Trajectory& trajectory, const std::vector<std::vector<long long>>& basis);

}  // namespace kinmech
