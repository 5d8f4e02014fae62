#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "kinmech/datagen.hpp"
#include "kinmech/integrate.hpp"
#include "kinmech/problem.hpp"
#include "kinmech/translate.hpp"

namespace kinmech {

/// Objective value used when any experiment fails to integrate.
inline constexpr double kSsePenalty = 1e12;

struct FitResult {
  std::vector<double> theta_star;
  double sse = kSsePenalty;
  std::size_t n_obs_total = 0;
  bool converged = false;
  int starts_used = 0;
  int best_start_index = -1;
};

/// Sum of squared residuals over every experiment, time and observed species.
/// The model's first n_observed species are matched to the data columns;
/// remaining species start at zero. Returns kSsePenalty on integration
/// failure. Throws std::invalid_argument on dimension mismatch.
double sse(const KineticModel& model, std::span<const double> theta, const Dataset& data,
           const IntegratorOptions& integrator = {});

// Bounded quasi-Newton minimization -----------------------------------------

struct MinimizeOptions {
  int max_iterations = 200;
  int memory = 8;
  double pgtol = 1e-8;  // projected-gradient infinity norm
  double ftol = 1e-8;   // relative objective decrease between iterations
  double fd_step = 1e-7;
};

struct MinimizeResult {
  std::vector<double> x;
  double f = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;

/// Projected limited-memory BFGS on a box with forward-difference gradients
/// (a backward difference at the upper bound). The objective is never
/// evaluated outside [lower, upper].
MinimizeResult minimize_bounded(const Objective& f, std::vector<double> x0, std::span<const double> lower,
                                std::span<const double> upper, const MinimizeOptions& options = {});

// Multi-start estimation ----------------------------------------------------

struct FitOptions {
  RateBounds bounds;
  int n_starts = 10;
  std::uint64_t seed = 0;
  std::optional<std::vector<double>> initial_guess;
  int workers = 1;
  MinimizeOptions minimizer;
  IntegratorOptions integrator;
};

/// Starting points for a multi-start run: the optional guess first, then
/// uniform draws in the bounds. Point k does not depend on n_starts.
std::vector<std::vector<double>> start_points(int n_params, const FitOptions& options);

/// Lowest-SSE local fit over all starts; ties go to the lower start index.
FitResult estimate(const KineticModel& model, const Dataset& data, const FitOptions& options);

}  // namespace kinmech
