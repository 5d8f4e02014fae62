#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kinmech/datagen.hpp"
#include "kinmech/fit.hpp"
#include "kinmech/genmech.hpp"
#include "kinmech/mechanism.hpp"
#include "kinmech/problem.hpp"

namespace kinmech {

/// Gaussian negative log-likelihood with the variance profiled out:
/// (n/2) ln(sse/n) + (n/2)(1 + ln 2 pi). sse is floored at 1e-300.
/// Throws std::invalid_argument for n == 0 or negative sse.
double nll(double sse, std::size_t n);

double aic(double nll_value, int n_params);

struct ScoredCandidate {
  MechanismMatrix matrix;
  FitResult fit;
  double nll = 0.0;
  int d = 0;
  double aic = 0.0;
  /// Index of the candidate whose fit was reused (itself when fitted directly).
  std::size_t fitted_as = 0;
};

/// Ascending AIC, then lexicographically smaller matrix.
bool better(const ScoredCandidate& a, const ScoredCandidate& b);

struct IterationReport {
  IterationPlan plan;
  std::size_t n_candidates = 0;
  std::size_t n_fitted = 0;  // distinct structures actually optimized
  bool complete = true;
  std::vector<ScoredCandidate> all_scores;  // sorted by `better`

  const ScoredCandidate& best() const { return all_scores.front(); }
};

enum class Termination { kAicWorsened, kMaxIterations, kNoCandidates };

std::string to_string(Termination t);

struct RunReport {
  std::vector<IterationReport> iterations;
  ScoredCandidate winner;
  int winner_iteration = 0;
  Termination terminated_reason = Termination::kMaxIterations;
};

class NoCandidatesError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DiscoveryOptions {
  std::uint64_t seed = 0;
  int workers = 1;
  /// Minimizer and integrator settings. Bounds and start count come from the
  /// ProblemSpec and the seed is set per candidate.
  FitOptions fit;
  RuleSet rules;
  /// Called after each completed iteration.
  std::function<void(const IterationReport&)> on_iteration;
  /// Called with (done, total) as structures finish fitting. An exception
  /// thrown here stops the remaining fits and propagates out of the run.
  std::function<void(std::size_t, std::size_t)> on_progress;
};

/// Seed used for the multistart of candidate `index` in iteration `iteration`.
std::uint64_t candidate_seed(std::uint64_t seed, int iteration, std::size_t index);

/// Enumerates, translates, fits and ranks one iteration. Candidates that are
/// isomorphic (row order, intermediate labels) define the same model, so each
/// structure is fitted once, from its first member's seed, and the result is
/// shared with rate constants reordered. Throws NoCandidatesError when the
/// enumeration is empty.
IterationReport run_iteration(const ProblemSpec& spec, const IterationPlan& plan, const Dataset& data,
                              const DiscoveryOptions& options);

/// Runs iterations 1, 2, ... until the best AIC strictly worsens, an
/// iteration has no candidates, or max_iterations is reached. Propagates
/// NoCandidatesError from iteration 1.
RunReport run_discovery(const ProblemSpec& spec, const Dataset& data, const DiscoveryOptions& options);

}  // namespace kinmech
