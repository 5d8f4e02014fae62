#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kinmech/mechanism.hpp"
#include "kinmech/problem.hpp"

namespace kinmech {

/// Optional rules layered on top of the core molecularity, stoichiometry and
/// intermediate-ordering rules.
struct RuleSet {
  /// Observed reactants only ever appear with negative coefficients and
  /// observed products only with positive ones.
  bool observed_roles_fixed = true;
  /// The running total of every intermediate, summed down the rows, never
  /// drops below zero: a step cannot consume more than earlier steps made.
  bool nonnegative_inventory = true;
  /// Intermediate columns must be labeled in order of first production, so
  /// relabelings of one mechanism are emitted once.
  bool canonical_intermediates = false;

  bool operator==(const RuleSet&) const = default;
};

enum class FeasibilityRule {
  kNone,
  kDimensions,
  kEntryRange,
  kRowMolecularity,
  kStoichiometry,
  kObservedRole,
  kIntermediateOrdering,
  kNegativeInventory,
  kUnusedIntermediate,
  kCanonicalLabeling,
};

std::string to_string(FeasibilityRule rule);

struct FeasibilityResult {
  bool feasible = true;
  FeasibilityRule violated = FeasibilityRule::kNone;
  int row = -1;     // offending row, when the rule is row-local
  int column = -1;  // offending column, when the rule is column-local

  explicit operator bool() const { return feasible; }
};

/// Full feasibility check of a finished matrix. Throws std::invalid_argument
/// when the matrix has fewer columns than the overall reaction has species.
FeasibilityResult check_feasible(const MechanismMatrix& m, const OverallReaction& overall,
                                 const RuleSet& rules = {});

struct EnumerationStats {
  std::uint64_t nodes_visited = 0;  // cell assignments tried
  std::uint64_t nodes_pruned = 0;   // assignments rejected before descending
};

struct EnumerationResult {
  std::vector<MechanismMatrix> mechanisms;  // sorted lexicographically
  bool complete = true;                     // false iff the time budget expired
  EnumerationStats stats;
};

struct EnumerateOptions {
  double time_budget_s = 0.0;  // <= 0 means unlimited
  int workers = 1;
  RuleSet rules;
};

/// Parallel backtracking enumeration of every feasible mechanism with the
/// plan's dimensions. Work is split by complete assignments of the first row;
/// output is independent of the worker count.
EnumerationResult enumerate(const IterationPlan& plan, const OverallReaction& overall,
                            const EnumerateOptions& options = {});

/// Filters all 5^(rows*cols) matrices through check_feasible. Correctness
/// oracle for small grids; throws std::length_error above 1e9 raw matrices.
std::vector<MechanismMatrix> enumerate_bruteforce(const IterationPlan& plan,
                                                  const OverallReaction& overall,
                                                  const RuleSet& rules = {});

/// 5^(rows*cols). Throws std::overflow_error when it does not fit in 64 bits.
std::uint64_t search_space_size(int rows, int cols);

}  // namespace kinmech
