#include "kinmech/fit.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "dopri.hpp"
#include "parallel.hpp"

namespace kinmech {

double sse(const KineticModel& model, std::span<const double> theta, const Dataset& data,
           const IntegratorOptions& integrator) {
  const auto n_obs = static_cast<int>(data.n_observed());
  if (static_cast<int>(theta.size()) != model.n_params()) throw std::invalid_argument("theta size mismatch");
  if (model.n_species() < n_obs) throw std::invalid_argument("model has fewer species than observed columns");

  std::vector<double> c0(model.n_species(), 0.0);
  double total = 0.0;
  for (const auto& e : data.experiments) {
    if (static_cast<int>(e.c0_observed.size()) != n_obs || e.y.cols() != n_obs ||
        e.y.rows() != static_cast<Eigen::Index>(e.times.size()))
      throw std::invalid_argument("experiment shape differs from observed species count or time grid");
    std::copy(e.c0_observed.begin(), e.c0_observed.end(), c0.begin());
    const auto outcome = detail::integrate_grid(model, theta.data(), c0, e.times, integrator,
                                                [&](std::size_t k, std::span<const double> c) {
                                                  for (int j = 0; j < n_obs; ++j) {
                                                    const double r = c[j] - e.y(static_cast<Eigen::Index>(k), j);
                                                    total += r * r;
                                                  }
                                                  return total < kSsePenalty;
                                                });
    if (outcome != detail::StepOutcome::kOk || !(total < kSsePenalty)) return kSsePenalty;
  }
  return std::isfinite(total) ? std::min(total, kSsePenalty) : kSsePenalty;
}

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

struct GradientProbe {
  const Objective& f;
  std::span<const double> lower;
  std::span<const double> upper;
  double step;
  int& evaluations;

  std::vector<double> operator()(const std::vector<double>& x, double fx) const {
    std::vector<double> g(x.size());
    std::vector<double> probe = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
      double h = std::max(step, step * std::abs(x[i]));
      if (x[i] + h > upper[i]) h = -h;
      probe[i] = x[i] + h;
      const double fh = f(probe);
      ++evaluations;
      g[i] = (fh - fx) / h;
      probe[i] = x[i];
    }
    return g;
  }
};

}  // namespace

MinimizeResult minimize_bounded(const Objective& f, std::vector<double> x0, std::span<const double> lower,
                                std::span<const double> upper, const MinimizeOptions& options) {
  const std::size_t n = x0.size();
  if (lower.size() != n || upper.size() != n) throw std::invalid_argument("bounds size mismatch");
  auto project = [&](std::vector<double>& x) {
    for (std::size_t i = 0; i < n; ++i) x[i] = std::clamp(x[i], lower[i], upper[i]);
  };

  MinimizeResult out;
  project(x0);
  std::vector<double> x = std::move(x0);
  double fx = f(x);
  out.evaluations = 1;
  GradientProbe gradient{f, lower, upper, options.fd_step, out.evaluations};
  std::vector<double> g = gradient(x, fx);

  std::deque<std::pair<std::vector<double>, std::vector<double>>> memory;  // (s, y)
  std::vector<double> d(n);
  std::vector<double> trial(n);

  for (out.iterations = 0; out.iterations < options.max_iterations; ++out.iterations) {
    // Variables pinned at a bound by the gradient do not move this iteration.
    std::vector<bool> free(n);
    double pg = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      pg = std::max(pg, std::abs(std::clamp(x[i] - g[i], lower[i], upper[i]) - x[i]));
      free[i] = !((x[i] <= lower[i] && g[i] > 0) || (x[i] >= upper[i] && g[i] < 0));
    }
    if (pg <= options.pgtol) {
      out.converged = true;
      break;
    }

    // Two-loop recursion restricted to the free subspace.
    std::vector<double> q(n);
    for (std::size_t i = 0; i < n; ++i) q[i] = free[i] ? g[i] : 0.0;
    std::vector<double> alpha(memory.size());
    for (std::size_t k = memory.size(); k-- > 0;) {
      const auto& [s, y] = memory[k];
      alpha[k] = dot(s, q) / dot(s, y);
      for (std::size_t i = 0; i < n; ++i) q[i] -= alpha[k] * y[i];
    }
    const double gamma = memory.empty() ? 1.0 : dot(memory.back().first, memory.back().second) /
                                                     dot(memory.back().second, memory.back().second);
    for (std::size_t i = 0; i < n; ++i) q[i] *= gamma;
    for (std::size_t k = 0; k < memory.size(); ++k) {
      const auto& [s, y] = memory[k];
      const double beta = dot(y, q) / dot(s, y);
      for (std::size_t i = 0; i < n; ++i) q[i] += (alpha[k] - beta) * s[i];
    }
    for (std::size_t i = 0; i < n; ++i) d[i] = free[i] ? -q[i] : 0.0;

    double slope = dot(g, d);
    double step = 1.0;
    if (memory.empty() || !(slope < 0)) {
      memory.clear();
      for (std::size_t i = 0; i < n; ++i) d[i] = free[i] ? -g[i] : 0.0;
      slope = dot(g, d);
      step = std::min(1.0, 1.0 / std::sqrt(std::max(dot(d, d), 1e-300)));
    }

    // Armijo backtracking along the projected path.
    bool accepted = false;
    double f_trial = fx;
    for (int k = 0; k < 40; ++k) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = x[i] + step * d[i];
      project(trial);
      double decrease = 0.0;
      for (std::size_t i = 0; i < n; ++i) decrease += g[i] * (trial[i] - x[i]);
      f_trial = f(trial);
      ++out.evaluations;
      if (f_trial <= fx + 1e-4 * decrease && trial != x) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // No descent along the quasi-Newton path; retry once from steepest
      // descent before giving up.
      if (!memory.empty()) {
        memory.clear();
        continue;
      }
      out.converged = pg <= std::sqrt(options.pgtol);
      break;
    }

    std::vector<double> g_new = gradient(trial, f_trial);
    std::vector<double> s(n);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = trial[i] - x[i];
      y[i] = g_new[i] - g[i];
    }
    const double sy = dot(s, y);
    if (sy > 1e-10 * dot(y, y)) {
      memory.emplace_back(std::move(s), std::move(y));
      if (static_cast<int>(memory.size()) > options.memory) memory.pop_front();
    }

    const double f_prev = fx;
    x = trial;
    fx = f_trial;
    g = std::move(g_new);
    if ((f_prev - fx) <= options.ftol * std::max({std::abs(f_prev), std::abs(fx), 1.0})) {
      out.converged = true;
      ++out.iterations;
      break;
    }
  }
  out.x = std::move(x);
  out.f = fx;
  return out;
}

std::vector<std::vector<double>> start_points(int n_params, const FitOptions& options) {
  std::vector<std::vector<double>> points;
  NormalStream rng(options.seed);
  const double lo = options.bounds.lower;
  const double hi = options.bounds.upper;
  for (int k = 0; k < options.n_starts; ++k) {
    std::vector<double> p(n_params);
    if (k == 0 && options.initial_guess) {
      if (static_cast<int>(options.initial_guess->size()) != n_params)
        throw std::invalid_argument("initial guess size mismatch");
      for (int i = 0; i < n_params; ++i) p[i] = std::clamp((*options.initial_guess)[i], lo, hi);
    } else {
      for (auto& v : p) v = lo + (hi - lo) * rng.uniform();
    }
    points.push_back(std::move(p));
  }
  return points;
}

FitResult estimate(const KineticModel& model, const Dataset& data, const FitOptions& options) {
  if (options.n_starts < 1) throw std::invalid_argument("n_starts must be >= 1");
  const int d = model.n_params();
  const std::vector<double> lower(d, options.bounds.lower);
  const std::vector<double> upper(d, options.bounds.upper);
  const auto starts = start_points(d, options);

  Objective objective = [&](std::span<const double> theta) { return sse(model, theta, data, options.integrator); };
  std::vector<MinimizeResult> runs(starts.size());
  detail::parallel_for(starts.size(), options.workers, [&](std::size_t k) {
    runs[k] = minimize_bounded(objective, starts[k], lower, upper, options.minimizer);
  });

  FitResult best;
  best.n_obs_total = data.n_values();
  best.starts_used = static_cast<int>(starts.size());
  best.theta_star = starts.front();
  for (std::size_t k = 0; k < runs.size(); ++k) {
    if (best.best_start_index < 0 || runs[k].f < best.sse) {
      best.sse = runs[k].f;
      best.theta_star = runs[k].x;
      best.best_start_index = static_cast<int>(k);
      best.converged = runs[k].converged;
    }
  }
  if (best.sse >= kSsePenalty) best.converged = false;
  return best;
}

}  // namespace kinmech
