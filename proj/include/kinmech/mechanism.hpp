#pragma once

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace kinmech {

/// Net stoichiometric matrix of a candidate mechanism: rows are elementary
/// steps, columns are species. Observed species come first, in the order of
/// the overall reaction; intermediates fill the trailing columns.
class MechanismMatrix {
 public:
  static constexpr int kMinEntry = -2;
  static constexpr int kMaxEntry = 2;

  MechanismMatrix() = default;
  MechanismMatrix(int rows, int cols);
  MechanismMatrix(std::initializer_list<std::initializer_list<int>> rows);
  MechanismMatrix(int rows, int cols, std::vector<std::int8_t> entries);

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  int operator()(int i, int j) const { return entries_[index(i, j)]; }
  std::int8_t& at(int i, int j) { return entries_[index(i, j)]; }

  std::span<const std::int8_t> row(int i) const {
    return {entries_.data() + static_cast<std::size_t>(i) * cols_,
            static_cast<std::size_t>(cols_)};
  }
  const std::vector<std::int8_t>& entries() const { return entries_; }

  int column_sum(int j) const;

  /// Rows joined by ';', entries by ','. Used for stable textual keys.
  std::string to_string() const;

  // Ordering is lexicographic on (rows, cols, flattened entries).
  auto operator<=>(const MechanismMatrix&) const = default;
  bool operator==(const MechanismMatrix&) const = default;

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * cols_ + j;
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<std::int8_t> entries_;
};

/// Canonical representative of a matrix under row permutation and relabeling
/// of the intermediate columns (columns >= n_observed). Two mechanisms are
/// structurally identical iff their canonical forms are equal.
MechanismMatrix canonical_form(const MechanismMatrix& m, int n_observed);

struct CanonicalLabeling {
  MechanismMatrix form;
  std::vector<int> row_order;  // canonical row i is row row_order[i] of the input
};

/// canonical_form plus where each canonical row came from.
CanonicalLabeling canonical_labeling(const MechanismMatrix& m, int n_observed);

bool isomorphic(const MechanismMatrix& a, const MechanismMatrix& b, int n_observed);

}  // namespace kinmech
