#include "kinmech/mechanism.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace kinmech {

MechanismMatrix::MechanismMatrix(int rows, int cols)
    : rows_(rows), cols_(cols), entries_(static_cast<std::size_t>(rows) * cols, 0) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("negative matrix dimension");
}

MechanismMatrix::MechanismMatrix(std::initializer_list<std::initializer_list<int>> rows)
    : rows_(static_cast<int>(rows.size())),
      cols_(rows.size() == 0 ? 0 : static_cast<int>(rows.begin()->size())) {
  entries_.reserve(static_cast<std::size_t>(rows_) * cols_);
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != cols_) throw std::invalid_argument("ragged matrix rows");
    for (int v : r) entries_.push_back(static_cast<std::int8_t>(v));
  }
}

MechanismMatrix::MechanismMatrix(int rows, int cols, std::vector<std::int8_t> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (entries_.size() != static_cast<std::size_t>(rows) * cols)
    throw std::invalid_argument("entry count does not match dimensions");
}

int MechanismMatrix::column_sum(int j) const {
  int s = 0;
  for (int i = 0; i < rows_; ++i) s += (*this)(i, j);
  return s;
}

std::string MechanismMatrix::to_string() const {
  std::ostringstream out;
  for (int i = 0; i < rows_; ++i) {
    if (i) out << ';';
    for (int j = 0; j < cols_; ++j) {
      if (j) out << ',';
      out << static_cast<int>((*this)(i, j));
    }
  }
  return out.str();
}

CanonicalLabeling canonical_labeling(const MechanismMatrix& m, int n_observed) {
  if (n_observed > m.cols()) throw std::invalid_argument("n_observed exceeds column count");
  const int n_inter = m.cols() - n_observed;
  std::vector<int> perm(n_inter);
  std::iota(perm.begin(), perm.end(), n_observed);

  using Row = std::pair<std::vector<std::int8_t>, int>;
  std::vector<Row> rows(m.rows(), Row(std::vector<std::int8_t>(m.cols()), 0));
  std::optional<std::vector<Row>> best;
  auto less_rows = [](const std::vector<Row>& a, const std::vector<Row>& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i].first != b[i].first) return a[i].first < b[i].first;
    }
    return false;
  };
  do {
    for (int i = 0; i < m.rows(); ++i) {
      for (int j = 0; j < n_observed; ++j) rows[i].first[j] = static_cast<std::int8_t>(m(i, j));
      for (int k = 0; k < n_inter; ++k) rows[i].first[n_observed + k] = static_cast<std::int8_t>(m(i, perm[k]));
      rows[i].second = i;
    }
    std::sort(rows.begin(), rows.end());
    if (!best || less_rows(rows, *best)) best = rows;
  } while (std::next_permutation(perm.begin(), perm.end()));

  CanonicalLabeling out;
  std::vector<std::int8_t> flat;
  flat.reserve(m.entries().size());
  for (const auto& [r, origin] : *best) {
    flat.insert(flat.end(), r.begin(), r.end());
    out.row_order.push_back(origin);
  }
  out.form = MechanismMatrix(m.rows(), m.cols(), std::move(flat));
  return out;
}

MechanismMatrix canonical_form(const MechanismMatrix& m, int n_observed) {
  return canonical_labeling(m, n_observed).form;
}

bool isomorphic(const MechanismMatrix& a, const MechanismMatrix& b, int n_observed) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return canonical_form(a, n_observed) == canonical_form(b, n_observed);
}

}  // namespace kinmech
