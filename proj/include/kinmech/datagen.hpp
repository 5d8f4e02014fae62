#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "kinmech/mechanism.hpp"
#include "kinmech/problem.hpp"
#include "kinmech/translate.hpp"

namespace kinmech {

/// One experiment's record: initial observed concentrations, the sampling
/// grid and measured observed concentrations (times x observed species).
struct Experiment {
  std::vector<double> c0_observed;
  std::vector<double> times;
  Eigen::MatrixXd y;
};

struct Dataset {
  std::vector<std::string> observed_names;
  std::vector<Experiment> experiments;
  std::uint64_t seed = 0;

  std::size_t n_observed() const { return observed_names.size(); }
  /// Number of scalar measurements.
  std::size_t n_values() const;
};

/// A reference system with hidden intermediates, used to make in-silico data.
struct CaseStudy {
  std::string name;
  OverallReaction overall;
  std::vector<std::string> species_names;  // truth model species, observed first
  KineticModel truth;                      // theta holds the true constants
  std::vector<double> theta_true;
  std::vector<std::vector<double>> experiments;  // full initial states (M)
  double t0 = 0.0;
  double tf = 10.0;
  int n_t = 30;
  std::vector<bool> observed_mask;
  std::vector<double> noise_sd;  // per observed species
  /// Truth mechanism as a matrix; empty for rate-law cases.
  MechanismMatrix truth_matrix;
  /// Mechanism the discovery loop is expected to select, and its iteration.
  MechanismMatrix expected_winner;
  int expected_winner_iteration = 0;
  ProblemSpec spec;  // iteration-1 sizes and bounds for discovery runs

  std::vector<double> time_grid() const;
};

std::vector<std::string> case_names();

/// "hypothetical", "aldol" or "fructose". Throws std::invalid_argument
/// otherwise.
CaseStudy case_study(const std::string& name);

/// Simulates the truth on the grid, keeps observed columns and adds seeded
/// zero-mean Gaussian noise. Throws std::runtime_error if the truth fails to
/// integrate.
Dataset generate(const CaseStudy& cs, std::uint64_t seed);

/// Portable normal variates: mt19937_64 bits, 53-bit uniforms, Box-Muller.
/// Same seed gives the same stream on every platform.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}
  double uniform();  // in (0, 1)
  double next();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// splitmix64 finalizer, used to derive independent sub-seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace kinmech
