#include "kinmech/integrate.hpp"

#include <algorithm>
#include <boost/rational.hpp>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "dopri.hpp"

namespace kinmech {

Trajectory simulate(const KineticModel& model, std::span<const double> theta, std::span<const double> c0,
                    std::span<const double> times, const IntegratorOptions& options) {
  const int n = model.n_species();
  if (static_cast<int>(c0.size()) != n) throw std::invalid_argument("initial state size mismatch");
  if (static_cast<int>(theta.size()) != model.n_params()) throw std::invalid_argument("theta size mismatch");
  if (times.empty()) throw std::invalid_argument("empty time grid");
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] > times[k - 1])) throw std::invalid_argument("time grid must be strictly increasing");
  }
  for (double v : c0) {
    if (!(v >= 0)) throw std::invalid_argument("initial concentrations must be nonnegative");
  }

  Trajectory traj;
  traj.times.assign(times.begin(), times.end());
  traj.states.resize(static_cast<Eigen::Index>(times.size()), n);
  const auto outcome = detail::integrate_grid(model, theta.data(), c0, times, options,
                                              [&](std::size_t k, std::span<const double> c) {
                                                for (int j = 0; j < n; ++j)
                                                  traj.states(static_cast<Eigen::Index>(k), j) = c[j];
                                                return true;
                                              });
  if (outcome != detail::StepOutcome::kOk) {
    traj.status = Trajectory::Status::kFailed;
    traj.failure = detail::to_string(outcome);
  }
  return traj;
}

std::vector<std::vector<long long>> conserved_vectors(const KineticModel& model) {
  using Q = boost::rational<long long>;
  const auto coeff = model.coefficient_matrix();
  const int rows = static_cast<int>(coeff.size());
  const int cols = model.n_species();

  // Coefficients are small integers (or halves at most); scale by 2 and
  // round so elimination stays exact.
  std::vector<std::vector<Q>> a(rows, std::vector<Q>(cols));
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      const double scaled = coeff[i][j] * 2.0;
      if (std::abs(scaled - std::round(scaled)) > 1e-12) throw std::invalid_argument("non-rational coefficient");
      a[i][j] = Q(static_cast<long long>(std::llround(scaled)), 2);
    }
  }

  std::vector<int> pivot_col;
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int p = r;
    while (p < rows && a[p][c] == Q(0)) ++p;
    if (p == rows) continue;
    std::swap(a[p], a[r]);
    const Q inv = Q(1) / a[r][c];
    for (auto& v : a[r]) v *= inv;
    for (int i = 0; i < rows; ++i) {
      if (i == r || a[i][c] == Q(0)) continue;
      const Q f = a[i][c];
      for (int j = 0; j < cols; ++j) a[i][j] -= f * a[r][j];
    }
    pivot_col.push_back(c);
    ++r;
  }

  std::vector<std::vector<long long>> basis;
  for (int free = 0; free < cols; ++free) {
    if (std::find(pivot_col.begin(), pivot_col.end(), free) != pivot_col.end()) continue;
    std::vector<Q> w(cols, Q(0));
    w[free] = Q(1);
    for (int k = 0; k < static_cast<int>(pivot_col.size()); ++k) w[pivot_col[k]] = -a[k][free];
    long long lcm = 1;
    for (const auto& v : w) lcm = std::lcm(lcm, v.denominator());
    std::vector<long long> wi(cols);
    long long g = 0;
    for (int j = 0; j < cols; ++j) {
      wi[j] = (w[j] * lcm).numerator();
      g = std::gcd(g, std::llabs(wi[j]));
    }
    if (g > 1) {
      for (auto& v : wi) v /= g;
    }
    basis.push_back(std::move(wi));
  }
  return basis;
}

double max_conservation_error(const Trajectory& trajectory, const std::vector<std::vector<long long>>& basis) {
  double worst = 0.0;
  const auto& s = trajectory.states;
  for (const auto& w : basis) {
    double w0 = 0.0;
    for (Eigen::Index j = 0; j < s.cols(); ++j) w0 += static_cast<double>(w[j]) * s(0, j);
    for (Eigen::Index t = 0; t < s.rows(); ++t) {
      double wt = 0.0;
      for (Eigen::Index j = 0; j < s.cols(); ++j) wt += static_cast<double>(w[j]) * s(t, j);
      worst = std::max(worst, std::abs(wt - w0) / std::max(1.0, std::abs(w0)));
    }
  }
  return worst;
}

}  // namespace kinmech
