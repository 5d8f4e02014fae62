#include "kinmech/doe.hpp"

#include <algorithm>
#include <stdexcept>

#include "dopri.hpp"
#include "kinmech/datagen.hpp"
#include "parallel.hpp"

namespace kinmech {

namespace {

bool run(const KineticModel& m, std::span<const double> x, std::span<const double> times,
         const IntegratorOptions& integrator, std::vector<double>& out) {
  const std::size_t n_obs = x.size();
  std::vector<double> c0(m.n_species(), 0.0);
  std::copy(x.begin(), x.end(), c0.begin());
  out.assign(times.size() * n_obs, 0.0);
  const auto outcome = detail::integrate_grid(m, m.theta.data(), c0, times, integrator,
                                              [&](std::size_t k, std::span<const double> c) {
                                                std::copy(c.begin(), c.begin() + n_obs, out.begin() + k * n_obs);
                                                return true;
                                              });
  return outcome == detail::StepOutcome::kOk;
}

}  // namespace

double discrepancy(const KineticModel& nu, const KineticModel& mu, std::span<const double> x,
                   std::span<const double> times, const IntegratorOptions& integrator) {
  const int n_obs = static_cast<int>(x.size());
  if (nu.n_species() < n_obs || mu.n_species() < n_obs)
    throw std::invalid_argument("model has fewer species than design variables");
  if (static_cast<int>(nu.theta.size()) != nu.n_params() || static_cast<int>(mu.theta.size()) != mu.n_params())
    throw std::invalid_argument("theta size mismatch");
  if (times.empty()) throw std::invalid_argument("empty time grid");
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] > times[k - 1])) throw std::invalid_argument("time grid must be strictly increasing");
  }
  for (double v : x) {
    if (!(v >= 0)) throw std::invalid_argument("initial concentrations must be nonnegative");
  }

  std::vector<double> a;
  std::vector<double> b;
  if (!run(nu, x, times, integrator, a) || !run(mu, x, times, integrator, b)) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) total += (a[i] - b[i]) * (a[i] - b[i]);
  return total;
}

DoEProposal design(const KineticModel& nu, const KineticModel& mu, const DesignSpace& space, int budget,
                   std::uint64_t seed, int workers) {
  const std::size_t dim = space.n_observed();
  if (budget < 1) throw std::invalid_argument("budget must be at least 1");
  if (dim == 0 || space.upper.size() != dim) throw std::invalid_argument("design box needs matching bounds");
  for (std::size_t j = 0; j < dim; ++j) {
    if (!(space.lower[j] >= 0) || !(space.upper[j] >= space.lower[j]))
      throw std::invalid_argument("design box bounds must satisfy 0 <= lower <= upper");
  }

  auto objective = [&](std::span<const double> x) { return discrepancy(nu, mu, x, space.times); };

  NormalStream rng(seed);
  std::vector<std::vector<double>> points(budget, std::vector<double>(dim));
  for (auto& p : points) {
    for (std::size_t j = 0; j < dim; ++j) p[j] = space.lower[j] + (space.upper[j] - space.lower[j]) * rng.uniform();
  }
  std::vector<double> values(budget);
  detail::parallel_for(points.size(), workers, [&](std::size_t k) { values[k] = objective(points[k]); });

  DoEProposal best;
  best.evaluations = budget;
  best.x_star = points.front();
  best.objective = values.front();

  // Every point that set a new record is polished, so a larger budget (whose
  // records extend the smaller budget's) can never end lower.
  double record = -1.0;
  for (int k = 0; k < budget; ++k) {
    if (!(values[k] > record)) continue;
    record = values[k];
    std::vector<double> x = points[k];
    double fx = values[k];
    for (double frac = 0.1; frac > 1e-6; frac *= 0.5) {
      bool improved = true;
      while (improved) {
        improved = false;
        for (std::size_t j = 0; j < dim; ++j) {
          const double h = frac * (space.upper[j] - space.lower[j]);
          if (h <= 0) continue;
          for (double sign : {1.0, -1.0}) {
            std::vector<double> trial = x;
            trial[j] = std::clamp(x[j] + sign * h, space.lower[j], space.upper[j]);
            if (trial[j] == x[j]) continue;
            const double ft = objective(trial);
            ++best.evaluations;
            if (ft > fx) {
              x = std::move(trial);
              fx = ft;
              improved = true;
              break;
            }
          }
        }
      }
    }
    if (fx > best.objective) {
      best.objective = fx;
      best.x_star = std::move(x);
    }
  }
  return best;
}

}  // namespace kinmech
