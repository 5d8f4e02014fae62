#pragma once

#include <span>
#include <string>
#include <vector>

#include "kinmech/mechanism.hpp"

namespace kinmech {

struct SpeciesCount {
  int species = 0;
  int multiplicity = 1;

  bool operator==(const SpeciesCount&) const = default;
};

/// One irreversible step decoded from a matrix row.
struct ElementaryStep {
  std::vector<SpeciesCount> reactants;
  std::vector<SpeciesCount> products;
  int rate_index = 0;

  bool operator==(const ElementaryStep&) const = default;
};

/// How a step's rate is distributed over the species it touches.
enum class RateConvention {
  /// Every participating species changes by +-r, whatever its multiplicity
  /// (2A -> B gives dA/dt = -k*A^2). The case studies are generated with
  /// this convention, so data generation and fitting agree.
  kUnitCoefficient,
  /// Species change by their net stoichiometric coefficient times r.
  kMassAction,
};

/// A single rate term r = k * prod(c[order]) and the change it drives.
struct RateTerm {
  std::vector<int> order;  // species indices, repeated by multiplicity
  std::vector<std::pair<int, double>> deltas;  // (species, coefficient)
};

/// Mass-action ODE right-hand side plus its rate constants.
class KineticModel {
 public:
  KineticModel() = default;
  KineticModel(int n_species, std::vector<RateTerm> terms, std::vector<ElementaryStep> steps = {});

  int n_species() const { return n_species_; }
  int n_params() const { return static_cast<int>(terms_.size()); }
  const std::vector<RateTerm>& terms() const { return terms_; }
  /// Empty for models built directly from rate laws.
  const std::vector<ElementaryStep>& steps() const { return steps_; }

  std::vector<double> theta;

  /// dc/dt at c for rate constants theta. Concentrations below -clamp_below
  /// are read as zero. Writes into out without allocating.
  void rhs(std::span<const double> theta, std::span<const double> c, std::span<double> out,
           double clamp_below = 0.0) const {
    rhs(theta.data(), c.data(), out.data(), clamp_below);
  }
  void rhs(const double* theta, const double* c, double* out, double clamp_below = 0.0) const;

  /// Effective coefficient matrix (terms x species) actually applied by rhs.
  std::vector<std::vector<double>> coefficient_matrix() const;

 private:
  int n_species_ = 0;
  std::vector<RateTerm> terms_;
  std::vector<ElementaryStep> steps_;
  // Flattened copy of terms_ for the evaluation loop.
  std::vector<int> order_offset_;
  std::vector<int> order_species_;
  std::vector<int> delta_offset_;
  std::vector<int> delta_species_;
  std::vector<double> delta_coeff_;
};

/// Names for every matrix column: the observed names, then generated names
/// for intermediates (next unused capital letters, D, E, F... after A, B, C).
std::vector<std::string> column_names(const std::vector<std::string>& observed, int n_columns);

/// Decodes rows into steps. Throws std::invalid_argument when a row has no
/// reactant or product, or more than two of either.
std::vector<ElementaryStep> to_steps(const MechanismMatrix& m);

/// "A + B -> D" per row, multiplicities printed only when 2.
std::vector<std::string> to_reaction_strings(const MechanismMatrix& m, const std::vector<std::string>& names);

std::string format_step(const ElementaryStep& step, const std::vector<std::string>& names);

/// Parses one reaction string back into a step (rate_index left at 0).
/// Grammar: term ("+" term)* "->" term ("+" term)*, term = [digit] name.
ElementaryStep parse_reaction_string(const std::string& text, const std::vector<std::string>& names);

KineticModel to_kinetic_model(const MechanismMatrix& m, RateConvention convention = RateConvention::kUnitCoefficient);

/// Evaluates the model at c with its stored theta. Throws
/// std::invalid_argument on dimension mismatch.
std::vector<double> rhs(const KineticModel& model, std::span<const double> c);

/// Symbolic rendering of each species equation, e.g. "dC_A/dt = -k1*C_A*C_B".
std::vector<std::string> ode_strings(const KineticModel& model, const std::vector<std::string>& names);

}  // namespace kinmech
