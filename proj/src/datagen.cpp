#include "kinmech/datagen.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "kinmech/integrate.hpp"

namespace kinmech {

std::size_t Dataset::n_values() const {
  std::size_t n = 0;
  for (const auto& e : experiments) n += static_cast<std::size_t>(e.y.size());
  return n;
}

std::vector<double> CaseStudy::time_grid() const {
  std::vector<double> t(n_t);
  for (int k = 0; k < n_t; ++k) t[k] = n_t == 1 ? t0 : t0 + (tf - t0) * k / (n_t - 1);
  return t;
}

std::vector<std::string> case_names() { return {"hypothetical", "aldol", "fructose"}; }

namespace {

CaseStudy make_hypothetical() {
  CaseStudy cs;
  cs.name = "hypothetical";
  cs.overall = {{"A", "B", "C"}, {-4, 1, 1}};
  cs.species_names = {"A", "B", "C", "D", "E"};
  // 2A -> B, A -> D, D -> E, A + E -> C
  cs.truth_matrix = MechanismMatrix{{-2, 1, 0, 0, 0}, {-1, 0, 0, 1, 0}, {0, 0, 0, -1, 1}, {-1, 0, 1, 0, -1}};
  cs.truth = to_kinetic_model(cs.truth_matrix);
  cs.theta_true = {0.1, 0.2, 0.13, 0.25};
  cs.experiments = {{10, 0, 2, 0, 0}, {10, 2, 0, 0, 0}, {10, 2, 2, 0, 0}, {5, 0, 0, 0, 0}, {10, 0, 0, 0, 0}};
  cs.tf = 10.0;
  cs.observed_mask = {true, true, true, false, false};
  cs.noise_sd = {0.15, 0.15, 0.15};
  cs.expected_winner = cs.truth_matrix;
  cs.expected_winner_iteration = 3;
  cs.spec.min_steps = 2;
  cs.spec.min_species = 3;
  return cs;
}

CaseStudy make_aldol() {
  CaseStudy cs;
  cs.name = "aldol";
  cs.overall = {{"A", "B", "C", "D"}, {-1, -1, 1, 1}};
  cs.species_names = {"A", "B", "C", "D", "E", "F"};
  // A -> E, B + E -> F, F -> C + D
  cs.truth_matrix = MechanismMatrix{{-1, 0, 0, 0, 1, 0}, {0, -1, 0, 0, -1, 1}, {0, 0, 1, 1, 0, -1}};
  cs.truth = to_kinetic_model(cs.truth_matrix);
  cs.theta_true = {0.759, 0.293, 0.681};
  cs.experiments = {{5, 10, 0, 0, 0, 0}, {5, 5, 2, 0, 0, 0}, {5, 10, 0, 2, 0, 0},
                    {10, 10, 0, 2, 0, 0}, {10, 10, 2, 2, 0, 0}};
  cs.tf = 10.0;
  cs.observed_mask = {true, true, true, true, false, false};
  cs.noise_sd = {0.15, 0.15, 0.15, 0.15};
  cs.expected_winner = cs.truth_matrix;
  cs.expected_winner_iteration = 3;
  cs.spec.min_steps = 1;
  cs.spec.min_species = 4;
  return cs;
}

CaseStudy make_fructose() {
  CaseStudy cs;
  cs.name = "fructose";
  cs.overall = {{"A", "B", "C"}, {-1, 3, 1}};
  cs.species_names = {"A", "B", "C"};
  // r = k C_A C_acid with k = k_ref exp(-Ea / (R T)); dC_i/dt = nu_i r.
  constexpr double k_ref = 0.9;  // M^-1 min^-1
  constexpr double e_a = 124.0;  // J/mol
  constexpr double r_gas = 8.314;
  constexpr double temperature = 410.15;
  constexpr double c_acid = 3.3e-2;
  const double k_eff = k_ref * std::exp(-e_a / (r_gas * temperature)) * c_acid;
  RateTerm law;
  law.order = {0};
  law.deltas = {{0, -1.0}, {1, 3.0}, {2, 1.0}};
  cs.truth = KineticModel(3, {law});
  cs.theta_true = {k_eff};
  cs.experiments = {{4, 0, 0}, {6, 2, 1}, {4, 2, 0}, {4, 0, 1}, {6, 2, 0}};
  cs.tf = 90.0;
  cs.observed_mask = {true, true, true};
  cs.noise_sd = {0.2, 0.2, 0.2};
  // A -> D, D -> B + E, E -> B + F, F -> B + C
  cs.expected_winner =
      MechanismMatrix{{-1, 0, 0, 1, 0, 0}, {0, 1, 0, -1, 1, 0}, {0, 1, 0, 0, -1, 1}, {0, 1, 1, 0, 0, -1}};
  cs.expected_winner_iteration = 2;
  cs.spec.min_steps = 3;
  cs.spec.min_species = 5;
  return cs;
}

}  // namespace

CaseStudy case_study(const std::string& name) {
  CaseStudy cs;
  if (name == "hypothetical") {
    cs = make_hypothetical();
  } else if (name == "aldol") {
    cs = make_aldol();
  } else if (name == "fructose") {
    cs = make_fructose();
  } else {
    throw std::invalid_argument("unknown case study '" + name + "'");
  }
  cs.truth.theta = cs.theta_true;
  cs.spec.overall = cs.overall;
  cs.spec.noise_sd = cs.noise_sd;
  cs.spec.max_iterations = 5;
  return cs;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double NormalStream::uniform() {
  // 53 random bits mapped to (0, 1); zero is excluded for the logarithm.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double NormalStream::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

Dataset generate(const CaseStudy& cs, std::uint64_t seed) {
  Dataset data;
  data.seed = seed;
  for (std::size_t j = 0; j < cs.observed_mask.size(); ++j) {
    if (cs.observed_mask[j]) data.observed_names.push_back(cs.species_names[j]);
  }
  const auto times = cs.time_grid();
  NormalStream noise(seed);
  for (const auto& c0 : cs.experiments) {
    const Trajectory traj = simulate(cs.truth, cs.theta_true, c0, times);
    if (!traj.ok()) throw std::runtime_error("ground truth failed to integrate: " + traj.failure);
    Experiment e;
    e.times = times;
    e.y.resize(static_cast<Eigen::Index>(times.size()), static_cast<Eigen::Index>(data.n_observed()));
    Eigen::Index col = 0;
    for (std::size_t j = 0; j < cs.observed_mask.size(); ++j) {
      if (!cs.observed_mask[j]) continue;
      e.c0_observed.push_back(c0[j]);
      ++col;
    }
    for (Eigen::Index t = 0; t < e.y.rows(); ++t) {
      col = 0;
      for (std::size_t j = 0; j < cs.observed_mask.size(); ++j) {
        if (!cs.observed_mask[j]) continue;
        const double sd = cs.noise_sd[col];
        const double eps = sd > 0 ? sd * noise.next() : 0.0;
        e.y(t, col) = traj.states(t, static_cast<Eigen::Index>(j)) + eps;
        ++col;
      }
    }
    data.experiments.push_back(std::move(e));
  }
  return data;
}

}  // namespace kinmech
