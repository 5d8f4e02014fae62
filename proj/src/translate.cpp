#include "kinmech/translate.hpp"

#include <algorithm>
#include <cmath>
#include <regex>
#include <set>
#include <sstream>
#include <stdexcept>

namespace kinmech {

KineticModel::KineticModel(int n_species, std::vector<RateTerm> terms, std::vector<ElementaryStep> steps)
    : theta(terms.size(), 0.0), n_species_(n_species), terms_(std::move(terms)), steps_(std::move(steps)) {
  for (const auto& t : terms_) {
    for (int s : t.order) {
      if (s < 0 || s >= n_species_) throw std::invalid_argument("rate term species out of range");
    }
    for (const auto& [s, coeff] : t.deltas) {
      if (s < 0 || s >= n_species_) throw std::invalid_argument("rate term species out of range");
    }
  }
  order_offset_.push_back(0);
  delta_offset_.push_back(0);
  for (const auto& t : terms_) {
    order_species_.insert(order_species_.end(), t.order.begin(), t.order.end());
    order_offset_.push_back(static_cast<int>(order_species_.size()));
    for (const auto& [s, coeff] : t.deltas) {
      delta_species_.push_back(s);
      delta_coeff_.push_back(coeff);
    }
    delta_offset_.push_back(static_cast<int>(delta_species_.size()));
  }
}

void KineticModel::rhs(const double* theta_in, const double* c, double* out, double clamp_below) const {
  std::fill(out, out + n_species_, 0.0);
  const int n_terms = static_cast<int>(terms_.size());
  for (int k = 0; k < n_terms; ++k) {
    double rate = theta_in[k];
    for (int o = order_offset_[k]; o < order_offset_[k + 1]; ++o) {
      const double v = c[order_species_[o]];
      rate *= v < -clamp_below ? 0.0 : v;
    }
    for (int d = delta_offset_[k]; d < delta_offset_[k + 1]; ++d) out[delta_species_[d]] += delta_coeff_[d] * rate;
  }
}

std::vector<std::vector<double>> KineticModel::coefficient_matrix() const {
  std::vector<std::vector<double>> s(terms_.size(), std::vector<double>(n_species_, 0.0));
  for (std::size_t k = 0; k < terms_.size(); ++k) {
    for (const auto& [sp, coeff] : terms_[k].deltas) s[k][sp] += coeff;
  }
  return s;
}

std::vector<std::string> column_names(const std::vector<std::string>& observed, int n_columns) {
  if (n_columns < static_cast<int>(observed.size())) throw std::invalid_argument("fewer columns than names");
  std::vector<std::string> names = observed;
  std::set<std::string> used(observed.begin(), observed.end());
  char next = 'A';
  for (const auto& n : observed) {
    if (n.size() == 1 && n[0] >= 'A' && n[0] <= 'Z' && n[0] >= next) next = static_cast<char>(n[0] + 1);
  }
  int fallback = 1;
  while (static_cast<int>(names.size()) < n_columns) {
    std::string candidate;
    while (next <= 'Z' && used.count(std::string(1, next))) ++next;
    if (next <= 'Z') {
      candidate = std::string(1, next++);
    } else {
      do candidate = "I" + std::to_string(fallback++);
      while (used.count(candidate));
    }
    used.insert(candidate);
    names.push_back(candidate);
  }
  return names;
}

std::vector<ElementaryStep> to_steps(const MechanismMatrix& m) {
  std::vector<ElementaryStep> steps;
  steps.reserve(m.rows());
  for (int i = 0; i < m.rows(); ++i) {
    ElementaryStep step;
    step.rate_index = i;
    int n_react = 0;
    int n_prod = 0;
    for (int j = 0; j < m.cols(); ++j) {
      const int v = m(i, j);
      if (v < 0) {
        step.reactants.push_back({j, -v});
        n_react -= v;
      } else if (v > 0) {
        step.products.push_back({j, v});
        n_prod += v;
      }
    }
    if (n_react < 1 || n_react > 2 || n_prod < 1 || n_prod > 2)
      throw std::invalid_argument("row " + std::to_string(i) + " is not an elementary step");
    steps.push_back(std::move(step));
  }
  return steps;
}

namespace {

void append_side(std::ostringstream& out, const std::vector<SpeciesCount>& side,
                 const std::vector<std::string>& names) {
  for (std::size_t k = 0; k < side.size(); ++k) {
    if (k) out << " + ";
    if (side[k].multiplicity != 1) out << side[k].multiplicity;
    out << names.at(side[k].species);
  }
}

}  // namespace

std::string format_step(const ElementaryStep& step, const std::vector<std::string>& names) {
  std::ostringstream out;
  append_side(out, step.reactants, names);
  out << " -> ";
  append_side(out, step.products, names);
  return out.str();
}

std::vector<std::string> to_reaction_strings(const MechanismMatrix& m, const std::vector<std::string>& names) {
  if (static_cast<int>(names.size()) != m.cols()) throw std::invalid_argument("one name per column required");
  std::vector<std::string> out;
  for (const auto& step : to_steps(m)) out.push_back(format_step(step, names));
  return out;
}

ElementaryStep parse_reaction_string(const std::string& text, const std::vector<std::string>& names) {
  static const std::regex term_re(R"(^\s*([0-9]?)\s*([A-Za-z_][A-Za-z0-9_]*)\s*$)");
  const auto arrow = text.find("->");
  if (arrow == std::string::npos || text.find("->", arrow + 2) != std::string::npos)
    throw std::invalid_argument("reaction string needs exactly one '->': " + text);

  auto parse_side = [&](const std::string& side) {
    std::vector<SpeciesCount> out;
    std::stringstream ss(side);
    std::string term;
    while (std::getline(ss, term, '+')) {
      std::smatch match;
      if (!std::regex_match(term, match, term_re)) throw std::invalid_argument("bad reaction term '" + term + "'");
      const int mult = match[1].length() ? std::stoi(match[1].str()) : 1;
      const auto it = std::find(names.begin(), names.end(), match[2].str());
      if (it == names.end()) throw std::invalid_argument("unknown species " + match[2].str());
      if (mult < 1) throw std::invalid_argument("multiplicity must be positive");
      out.push_back({static_cast<int>(it - names.begin()), mult});
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.species < b.species; });
    return out;
  };

  ElementaryStep step;
  step.reactants = parse_side(text.substr(0, arrow));
  step.products = parse_side(text.substr(arrow + 2));
  if (step.reactants.empty() || step.products.empty()) throw std::invalid_argument("empty reaction side");
  return step;
}

KineticModel to_kinetic_model(const MechanismMatrix& m, RateConvention convention) {
  std::vector<ElementaryStep> steps = to_steps(m);
  std::vector<RateTerm> terms;
  terms.reserve(steps.size());
  for (const auto& step : steps) {
    RateTerm term;
    for (const auto& r : step.reactants) {
      for (int k = 0; k < r.multiplicity; ++k) term.order.push_back(r.species);
      term.deltas.emplace_back(r.species, convention == RateConvention::kUnitCoefficient ? -1.0 : -r.multiplicity);
    }
    for (const auto& p : step.products) {
      term.deltas.emplace_back(p.species, convention == RateConvention::kUnitCoefficient ? 1.0 : p.multiplicity);
    }
    terms.push_back(std::move(term));
  }
  return KineticModel(m.cols(), std::move(terms), std::move(steps));
}

std::vector<double> rhs(const KineticModel& model, std::span<const double> c) {
  if (static_cast<int>(c.size()) != model.n_species()) throw std::invalid_argument("concentration vector size");
  if (static_cast<int>(model.theta.size()) != model.n_params()) throw std::invalid_argument("theta size");
  std::vector<double> out(model.n_species());
  model.rhs(model.theta, c, out);
  return out;
}

std::vector<std::string> ode_strings(const KineticModel& model, const std::vector<std::string>& names) {
  std::vector<std::string> out;
  for (int s = 0; s < model.n_species(); ++s) {
    std::ostringstream eq;
    eq << "dC_" << names.at(s) << "/dt =";
    bool any = false;
    for (int k = 0; k < model.n_params(); ++k) {
      const RateTerm& term = model.terms()[k];
      double coeff = 0;
      for (const auto& [sp, c] : term.deltas) coeff += sp == s ? c : 0.0;
      if (coeff == 0) continue;
      eq << (coeff < 0 ? (any ? " - " : " -") : (any ? " + " : " "));
      if (std::abs(coeff) != 1) eq << std::abs(coeff) << '*';
      eq << 'k' << (k + 1);
      std::vector<int> order = term.order;
      for (std::size_t a = 0; a < order.size();) {
        std::size_t b = a;
        while (b < order.size() && order[b] == order[a]) ++b;
        eq << "*C_" << names.at(order[a]);
        if (b - a > 1) eq << '^' << (b - a);
        a = b;
      }
      any = true;
    }
    if (!any) eq << " 0";
    out.push_back(eq.str());
  }
  return out;
}

}  // namespace kinmech
