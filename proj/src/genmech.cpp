#include "kinmech/genmech.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace kinmech {

std::string to_string(FeasibilityRule rule) {
  switch (rule) {
    case FeasibilityRule::kNone: return "none";
    case FeasibilityRule::kDimensions: return "dimensions";
    case FeasibilityRule::kEntryRange: return "entry range";
    case FeasibilityRule::kRowMolecularity: return "row molecularity";
    case FeasibilityRule::kStoichiometry: return "stoichiometric consistency";
    case FeasibilityRule::kObservedRole: return "observed species role";
    case FeasibilityRule::kIntermediateOrdering: return "intermediate ordering";
    case FeasibilityRule::kNegativeInventory: return "negative intermediate inventory";
    case FeasibilityRule::kUnusedIntermediate: return "unused intermediate";
    case FeasibilityRule::kCanonicalLabeling: return "canonical labeling";
  }
  return "unknown";
}

namespace {

constexpr int kMaxMolecules = 2;

// Intermediates first produced in the same row must appear with their
// columns in non-increasing lexicographic order (top row first), so that
// relabeling them cannot produce a second, equivalent matrix.
bool tie_columns_ordered(const MechanismMatrix& m, int first, int second) {
  for (int i = 0; i < m.rows(); ++i) {
    if (m(i, first) != m(i, second)) return m(i, first) > m(i, second);
  }
  return true;
}

int target_sum(const OverallReaction& overall, int column) {
  return column < static_cast<int>(overall.size()) ? overall.stoich[column] : 0;
}

FeasibilityResult violation(FeasibilityRule rule, int row = -1, int column = -1) {
  return {false, rule, row, column};
}

}  // namespace

FeasibilityResult check_feasible(const MechanismMatrix& m, const OverallReaction& overall,
                                 const RuleSet& rules) {
  const int n_obs = static_cast<int>(overall.size());
  if (m.cols() < n_obs) throw std::invalid_argument("matrix has fewer columns than observed species");
  if (m.rows() < 1) return violation(FeasibilityRule::kDimensions);

  for (int i = 0; i < m.rows(); ++i) {
    int reactants = 0;
    int products = 0;
    for (int j = 0; j < m.cols(); ++j) {
      const int v = m(i, j);
      if (v < MechanismMatrix::kMinEntry || v > MechanismMatrix::kMaxEntry)
        return violation(FeasibilityRule::kEntryRange, i, j);
      if (v < 0) reactants -= v;
      if (v > 0) products += v;
    }
    if (reactants < 1 || reactants > kMaxMolecules || products < 1 || products > kMaxMolecules)
      return violation(FeasibilityRule::kRowMolecularity, i);
  }

  for (int j = 0; j < m.cols(); ++j) {
    if (m.column_sum(j) != target_sum(overall, j)) return violation(FeasibilityRule::kStoichiometry, -1, j);
  }

  if (rules.observed_roles_fixed) {
    for (int i = 0; i < m.rows(); ++i) {
      for (int j = 0; j < n_obs; ++j) {
        if (m(i, j) != 0 && (m(i, j) > 0) != (overall.stoich[j] > 0))
          return violation(FeasibilityRule::kObservedRole, i, j);
      }
    }
  }

  std::vector<int> first_production(m.cols(), -1);
  for (int j = n_obs; j < m.cols(); ++j) {
    int first_neg = -1;
    for (int i = 0; i < m.rows(); ++i) {
      if (m(i, j) > 0 && first_production[j] < 0) first_production[j] = i;
      if (m(i, j) < 0 && first_neg < 0) first_neg = i;
    }
    if (first_production[j] < 0 && first_neg < 0) return violation(FeasibilityRule::kUnusedIntermediate, -1, j);
    if (first_production[j] < 0 || first_neg < first_production[j])
      return violation(FeasibilityRule::kIntermediateOrdering, first_neg, j);
  }

  if (rules.nonnegative_inventory) {
    for (int j = n_obs; j < m.cols(); ++j) {
      int inventory = 0;
      for (int i = 0; i < m.rows(); ++i) {
        inventory += m(i, j);
        if (inventory < 0) return violation(FeasibilityRule::kNegativeInventory, i, j);
      }
    }
  }

  if (!rules.canonical_intermediates) return {};
  for (int j = n_obs + 1; j < m.cols(); ++j) {
    if (first_production[j] < first_production[j - 1]) return violation(FeasibilityRule::kCanonicalLabeling, -1, j);
    if (first_production[j] == first_production[j - 1] && !tie_columns_ordered(m, j - 1, j))
      return violation(FeasibilityRule::kCanonicalLabeling, -1, j);
  }
  return {};
}

std::uint64_t search_space_size(int rows, int cols) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("negative dimension");
  const int cells = rows * cols;
  std::uint64_t n = 1;
  for (int k = 0; k < cells; ++k) {
    if (n > std::numeric_limits<std::uint64_t>::max() / 5) throw std::overflow_error("search space exceeds 64 bits");
    n *= 5;
  }
  return n;
}

namespace {

using Clock = std::chrono::steady_clock;

// Depth-first search over cells in row-major order. Values are tried in
// ascending order, so each subtree is produced in lexicographic order.
class Backtracker {
 public:
  Backtracker(const IterationPlan& plan, const OverallReaction& overall, const RuleSet& rules,
              const std::atomic<bool>& stop)
      : rules_(rules),
        rows_(plan.n_steps),
        cols_(plan.n_species),
        n_obs_(static_cast<int>(overall.size())),
        overall_(overall),
        stop_(stop),
        m_(plan.n_steps, plan.n_species),
        col_sum_(cols_, 0),
        first_prod_(cols_, -1) {}

  /// Enumerates all completions of row 0 (row 0 only, no descent).
  std::vector<MechanismMatrix> first_rows() {
    collect_rows_ = true;
    search(0, 0, 0, 0);
    collect_rows_ = false;
    return std::move(found_);
  }

  /// Enumerates every feasible completion below a fixed first row.
  void run_from(const MechanismMatrix& first) {
    for (int j = 0; j < cols_; ++j) {
      if (first(0, j) != 0) apply(0, j, first(0, j));
    }
    if (rows_ == 1) {
      leaf();
    } else {
      search(1, 0, 0, 0);
    }
    for (int j = 0; j < cols_; ++j) {
      if (first(0, j) != 0) undo(0, j, first(0, j));
    }
  }

  std::vector<MechanismMatrix>& found() { return found_; }
  const EnumerationStats& stats() const { return stats_; }
  bool interrupted() const { return interrupted_; }

 private:
  void apply(int i, int j, int v) {
    m_.at(i, j) = static_cast<std::int8_t>(v);
    col_sum_[j] += v;
    if (v > 0 && j >= n_obs_ && first_prod_[j] < 0) first_prod_[j] = i;
  }

  void undo(int i, int j, int v) {
    m_.at(i, j) = 0;
    col_sum_[j] -= v;
    if (v > 0 && j >= n_obs_ && first_prod_[j] == i) {
      bool earlier = false;
      for (int r = 0; r < i; ++r) earlier = earlier || m_(r, j) > 0;
      if (!earlier) first_prod_[j] = -1;
    }
  }

  bool admissible(int i, int j, int v, int reactants, int products) const {
    if (v < 0 && reactants - v > kMaxMolecules) return false;
    if (v > 0 && products + v > kMaxMolecules) return false;
    const int remaining_rows = rows_ - 1 - i;
    if (std::abs(target_sum(overall_, j) - (col_sum_[j] + v)) > kMaxMolecules * remaining_rows) return false;
    if (j < n_obs_) {
      if (rules_.observed_roles_fixed && v != 0 && (v > 0) != (overall_.stoich[j] > 0)) return false;
    } else {
      // Consumed before it was ever produced.
      if (v < 0 && first_prod_[j] < 0) return false;
      // Column sums over rows 0..i-1 are complete, so col_sum_ is the
      // inventory carried into row i.
      if (rules_.nonnegative_inventory && col_sum_[j] + v < 0) return false;
      // First production of an intermediate requires all lower-labeled
      // intermediates to already exist.
      if (rules_.canonical_intermediates && v > 0 && first_prod_[j] < 0) {
        for (int k = n_obs_; k < j; ++k) {
          if (first_prod_[k] < 0) return false;
        }
      }
    }
    return true;
  }

  void search(int i, int j, int reactants, int products) {
    if (interrupted_) return;
    if (j == cols_) {
      if (reactants < 1 || products < 1) return;
      if (collect_rows_) {
        MechanismMatrix row(1, cols_);
        for (int c = 0; c < cols_; ++c) row.at(0, c) = static_cast<std::int8_t>(m_(0, c));
        found_.push_back(std::move(row));
        return;
      }
      if (i + 1 == rows_) {
        leaf();
      } else {
        search(i + 1, 0, 0, 0);
      }
      return;
    }
    if ((++poll_ & 0xFFF) == 0 && stop_.load(std::memory_order_relaxed)) {
      interrupted_ = true;
      return;
    }
    for (int v = MechanismMatrix::kMinEntry; v <= MechanismMatrix::kMaxEntry; ++v) {
      ++stats_.nodes_visited;
      if (!admissible(i, j, v, reactants, products)) {
        ++stats_.nodes_pruned;
        continue;
      }
      apply(i, j, v);
      search(i, j + 1, reactants + (v < 0 ? -v : 0), products + (v > 0 ? v : 0));
      undo(i, j, v);
    }
  }

  void leaf() {
    for (int j = 0; j < cols_; ++j) {
      if (col_sum_[j] != target_sum(overall_, j)) return;
    }
    for (int j = n_obs_; j < cols_; ++j) {
      if (first_prod_[j] < 0) return;
    }
    if (rules_.canonical_intermediates) {
      for (int j = n_obs_ + 1; j < cols_; ++j) {
        if (first_prod_[j] == first_prod_[j - 1] && !tie_columns_ordered(m_, j - 1, j)) return;
      }
    }
    found_.push_back(m_);
  }

  RuleSet rules_;
  int rows_;
  int cols_;
  int n_obs_;
  const OverallReaction& overall_;
  const std::atomic<bool>& stop_;
  MechanismMatrix m_;
  std::vector<int> col_sum_;
  std::vector<int> first_prod_;
  std::vector<MechanismMatrix> found_;
  EnumerationStats stats_;
  std::uint64_t poll_ = 0;
  bool collect_rows_ = false;
  bool interrupted_ = false;
};

}  // namespace

EnumerationResult enumerate(const IterationPlan& plan, const OverallReaction& overall,
                            const EnumerateOptions& options) {
  if (plan.n_steps < 1 || plan.n_species < 1) throw std::invalid_argument("plan dimensions must be >= 1");
  if (options.workers < 1) throw std::invalid_argument("workers must be >= 1");
  EnumerationResult result;
  if (plan.n_species < static_cast<int>(overall.size())) return result;

  std::atomic<bool> stop{false};
  const auto deadline = options.time_budget_s > 0
                            ? Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                                 std::chrono::duration<double>(options.time_budget_s))
                            : Clock::time_point::max();

  Backtracker splitter(plan, overall, options.rules, stop);
  const std::vector<MechanismMatrix> tasks = splitter.first_rows();
  result.stats = splitter.stats();

  std::vector<std::vector<MechanismMatrix>> per_task(tasks.size());
  std::atomic<std::size_t> next{0};
  std::mutex stats_mutex;
  std::atomic<bool> interrupted{false};

  auto worker = [&] {
    EnumerationStats local;
    for (std::size_t t = next.fetch_add(1); t < tasks.size(); t = next.fetch_add(1)) {
      if (Clock::now() >= deadline) stop = true;
      if (stop) {
        interrupted = true;
        break;
      }
      Backtracker bt(plan, overall, options.rules, stop);
      bt.run_from(tasks[t]);
      per_task[t] = std::move(bt.found());
      local.nodes_visited += bt.stats().nodes_visited;
      local.nodes_pruned += bt.stats().nodes_pruned;
      if (bt.interrupted()) interrupted = true;
    }
    std::lock_guard lock(stats_mutex);
    result.stats.nodes_visited += local.nodes_visited;
    result.stats.nodes_pruned += local.nodes_pruned;
  };

  // The deadline is enforced by a watchdog flipping the shared stop flag.
  std::jthread watchdog;
  if (options.time_budget_s > 0) {
    watchdog = std::jthread([&](std::stop_token token) {
      while (!token.stop_requested() && !stop.load()) {
        if (Clock::now() >= deadline) {
          stop = true;
          break;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
      }
    });
  }

  const int n_threads = std::max(1, std::min<int>(options.workers, static_cast<int>(tasks.size())));
  {
    std::vector<std::jthread> pool;
    for (int w = 1; w < n_threads; ++w) pool.emplace_back(worker);
    worker();
  }
  if (watchdog.joinable()) {
    watchdog.request_stop();
    watchdog.join();
  }

  for (auto& chunk : per_task) {
    for (auto& m : chunk) result.mechanisms.push_back(std::move(m));
  }
  std::sort(result.mechanisms.begin(), result.mechanisms.end());
  result.complete = !interrupted.load();
  return result;
}

std::vector<MechanismMatrix> enumerate_bruteforce(const IterationPlan& plan, const OverallReaction& overall,
                                                  const RuleSet& rules) {
  const std::uint64_t total = search_space_size(plan.n_steps, plan.n_species);
  if (total > 1'000'000'000ULL) throw std::length_error("brute-force grid exceeds 1e9 matrices");
  std::vector<MechanismMatrix> out;
  if (plan.n_species < static_cast<int>(overall.size())) return out;

  const std::size_t cells = static_cast<std::size_t>(plan.n_steps) * plan.n_species;
  std::vector<std::int8_t> digits(cells, MechanismMatrix::kMinEntry);
  for (std::uint64_t n = 0; n < total; ++n) {
    MechanismMatrix m(plan.n_steps, plan.n_species, digits);
    if (check_feasible(m, overall, rules)) out.push_back(std::move(m));
    // Odometer increment, last cell fastest: yields lexicographic order.
    for (std::size_t k = cells; k-- > 0;) {
      if (digits[k] < MechanismMatrix::kMaxEntry) {
        ++digits[k];
        break;
      }
      digits[k] = MechanismMatrix::kMinEntry;
    }
  }
  return out;
}

}  // namespace kinmech
