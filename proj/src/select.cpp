#include "kinmech/select.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "parallel.hpp"

namespace kinmech {

double nll(double sse_value, std::size_t n) {
  if (n == 0) throw std::invalid_argument("nll needs at least one observation");
  if (!(sse_value >= 0)) throw std::invalid_argument("sse must be nonnegative");
  const double nd = static_cast<double>(n);
  return 0.5 * nd * std::log(std::max(sse_value, 1e-300) / nd) + 0.5 * nd * (1.0 + std::log(2.0 * std::numbers::pi));
}

double aic(double nll_value, int n_params) { return 2.0 * nll_value + 2.0 * n_params; }

bool better(const ScoredCandidate& a, const ScoredCandidate& b) {
  if (a.aic != b.aic) return a.aic < b.aic;
  return a.matrix < b.matrix;
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::kAicWorsened: return "aic_worsened";
    case Termination::kMaxIterations: return "max_iterations";
    case Termination::kNoCandidates: return "no_candidates";
  }
  return "unknown";
}

std::uint64_t candidate_seed(std::uint64_t seed, int iteration, std::size_t index) {
  return mix_seed(mix_seed(seed, static_cast<std::uint64_t>(iteration)), index);
}

IterationReport run_iteration(const ProblemSpec& spec, const IterationPlan& plan, const Dataset& data,
                              const DiscoveryOptions& options) {
  const int n_obs = static_cast<int>(spec.overall.size());
  if (static_cast<int>(data.n_observed()) != n_obs)
    throw std::invalid_argument("dataset has " + std::to_string(data.n_observed()) + " observed columns, problem has " +
                                std::to_string(n_obs));

  EnumerateOptions eopt;
  eopt.time_budget_s = spec.gen_time_budget_s;
  eopt.workers = options.workers;
  eopt.rules = options.rules;
  EnumerationResult en = enumerate(plan, spec.overall, eopt);
  if (en.mechanisms.empty())
    throw NoCandidatesError("no feasible mechanisms with " + std::to_string(plan.n_steps) + " steps and " +
                            std::to_string(plan.n_species) + " species");

  IterationReport report;
  report.plan = plan;
  report.n_candidates = en.mechanisms.size();
  report.complete = en.complete;

  // Group by structure; the first member (lowest index) is fitted.
  const std::size_t n = en.mechanisms.size();
  std::vector<CanonicalLabeling> labels(n);
  detail::parallel_for(n, options.workers,
                       [&](std::size_t i) { labels[i] = canonical_labeling(en.mechanisms[i], n_obs); });
  std::map<MechanismMatrix, std::size_t> first_of;
  std::vector<std::size_t> rep(n);
  std::vector<std::size_t> to_fit;
  for (std::size_t i = 0; i < n; ++i) {
    const auto [it, inserted] = first_of.emplace(labels[i].form, i);
    rep[i] = it->second;
    if (inserted) to_fit.push_back(i);
  }
  report.n_fitted = to_fit.size();

  std::vector<FitResult> fits(n);
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;
  detail::parallel_for(to_fit.size(), options.workers, [&](std::size_t k) {
    const std::size_t i = to_fit[k];
    FitOptions fopt = options.fit;
    fopt.bounds = spec.rate_bounds;
    fopt.n_starts = spec.multistart_count;
    fopt.seed = candidate_seed(options.seed, plan.iteration_index, i);
    fopt.workers = 1;
    fits[i] = estimate(to_kinetic_model(en.mechanisms[i]), data, fopt);
    const std::size_t finished = ++done;
    if (options.on_progress) {
      std::lock_guard lock(progress_mutex);
      options.on_progress(finished, to_fit.size());
    }
  });

  report.all_scores.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    ScoredCandidate& c = report.all_scores[i];
    c.matrix = std::move(en.mechanisms[i]);
    c.fitted_as = rep[i];
    c.fit = fits[rep[i]];
    if (rep[i] != i) {
      // Canonical row r is row order_i[r] here and row order_rep[r] in the
      // fitted member.
      const auto& order_i = labels[i].row_order;
      const auto& order_rep = labels[rep[i]].row_order;
      const auto& src = fits[rep[i]].theta_star;
      for (std::size_t r = 0; r < order_i.size(); ++r) c.fit.theta_star[order_i[r]] = src[order_rep[r]];
    }
    c.d = c.matrix.rows();
    c.nll = nll(c.fit.sse, c.fit.n_obs_total);
    c.aic = aic(c.nll, c.d);
  }
  std::sort(report.all_scores.begin(), report.all_scores.end(), better);
  return report;
}

RunReport run_discovery(const ProblemSpec& spec, const Dataset& data, const DiscoveryOptions& options) {
  const ValidationReport v = validate(spec);
  if (!v.ok()) throw std::invalid_argument("invalid problem: " + v.violations.front());

  RunReport run;
  for (int i = 1; i <= spec.max_iterations; ++i) {
    const IterationPlan plan = plan_iteration(spec, i);
    IterationReport it;
    try {
      it = run_iteration(spec, plan, data, options);
    } catch (const NoCandidatesError&) {
      if (i == 1) throw;
      run.terminated_reason = Termination::kNoCandidates;
      return run;
    }
    if (options.on_iteration) options.on_iteration(it);
    const bool worsened = i > 1 && it.best().aic > run.winner.aic;
    run.iterations.push_back(std::move(it));
    if (worsened) {
      run.terminated_reason = Termination::kAicWorsened;
      return run;
    }
    run.winner = run.iterations.back().best();
    run.winner_iteration = i;
  }
  run.terminated_reason = Termination::kMaxIterations;
  return run;
}

}  // namespace kinmech
