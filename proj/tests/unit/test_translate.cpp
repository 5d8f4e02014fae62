#include <stdexcept>
#include <random>

#include "doctest.h"
#include "kinmech/integrate.hpp"
#include "kinmech/translate.hpp"

using namespace kinmech;

namespace {

const MechanismMatrix kTwoStep{{-1, -1, 0, 1}, {0, -1, 1, -1}};
const MechanismMatrix kHypotheticalTruth{{-2, 1, 0, 0, 0}, {-1, 0, 0, 1, 0}, {0, 0, 0, -1, 1}, {-1, 0, 1, 0, -1}};

// Hand-written right-hand side of the hypothetical system (A..E), with the
// D equation taken as k2 A - k3 D.
std::vector<double> hypothetical_rhs(const std::vector<double>& k, const std::vector<double>& c) {
  const double a = c[0], d = c[3], e = c[4];
  return {-k[0] * a * a - k[1] * a - k[3] * a * e, k[0] * a * a, k[3] * a * e, k[1] * a - k[2] * d,
          k[2] * d - k[3] * a * e};
}

}  // namespace

TEST_CASE("reaction strings") {
  CHECK(to_reaction_strings(kTwoStep, {"A", "B", "C", "D"}) == std::vector<std::string>{"A + B -> D", "B + D -> C"});
  CHECK(to_reaction_strings(MechanismMatrix{{-2, 1, 0}}, {"A", "B", "C"}) == std::vector<std::string>{"2A -> B"});
  CHECK(to_reaction_strings(MechanismMatrix{{-1, 1}}, {"A", "B"}) == std::vector<std::string>{"A -> B"});
  CHECK_THROWS_AS(to_reaction_strings(kTwoStep, {"A", "B"}), std::invalid_argument);
}

TEST_CASE("strings parse back to the same steps") {
  const std::vector<std::string> names{"A", "B", "C", "D", "E"};
  const auto steps = to_steps(kHypotheticalTruth);
  const auto strings = to_reaction_strings(kHypotheticalTruth, names);
  for (std::size_t i = 0; i < steps.size(); ++i) {
    ElementaryStep parsed = parse_reaction_string(strings[i], names);
    parsed.rate_index = steps[i].rate_index;
    CHECK(parsed == steps[i]);
  }
  CHECK_THROWS_AS(parse_reaction_string("A + B", names), std::invalid_argument);
  CHECK_THROWS_AS(parse_reaction_string("A -> Q", names), std::invalid_argument);
  CHECK_THROWS_AS(parse_reaction_string("A -> -> B", names), std::invalid_argument);
}

TEST_CASE("symbolic ODEs of the two-step example") {
  const auto ode = ode_strings(to_kinetic_model(kTwoStep), {"A", "B", "C", "D"});
  CHECK(ode == std::vector<std::string>{"dC_A/dt = -k1*C_A*C_B", "dC_B/dt = -k1*C_A*C_B - k2*C_B*C_D",
                                        "dC_C/dt = k2*C_B*C_D", "dC_D/dt = k1*C_A*C_B - k2*C_B*C_D"});
}

TEST_CASE("rhs values") {
  KineticModel m = to_kinetic_model(kTwoStep);
  m.theta = {1.0, 1.0};
  const std::vector<double> c{1, 1, 0, 0};
  CHECK(rhs(m, c) == std::vector<double>{-1, -1, 0, 1});
  const std::vector<double> zero(4, 0.0);
  CHECK(rhs(m, zero) == zero);

  KineticModel h = to_kinetic_model(kHypotheticalTruth);
  h.theta = {0.1, 0.2, 0.13, 0.25};
  CHECK(rhs(h, std::vector<double>{10, 0, 2, 0, 0})[0] == doctest::Approx(-12.0).epsilon(1e-15));

  KineticModel off = to_kinetic_model(MechanismMatrix{{-1, 1}});
  CHECK(rhs(off, std::vector<double>{3, 1}) == std::vector<double>{0, 0});
  CHECK_THROWS_AS(rhs(m, std::vector<double>{1, 1}), std::invalid_argument);
}

TEST_CASE("hypothetical model matches the hand-derived system") {
  KineticModel h = to_kinetic_model(kHypotheticalTruth);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int trial = 0; trial < 100; ++trial) {
    h.theta = {u(rng), u(rng), u(rng), u(rng)};
    std::vector<double> c(5);
    for (auto& v : c) v = u(rng);
    const auto got = rhs(h, c);
    const auto want = hypothetical_rhs(h.theta, c);
    for (int j = 0; j < 5; ++j) CHECK(got[j] == doctest::Approx(want[j]).epsilon(1e-13));
  }
}

TEST_CASE("mass-action convention scales by multiplicity") {
  KineticModel m = to_kinetic_model(MechanismMatrix{{-2, 1}}, RateConvention::kMassAction);
  m.theta = {0.5};
  const auto d = rhs(m, std::vector<double>{2, 0});
  CHECK(d[0] == doctest::Approx(-4.0));
  CHECK(d[1] == doctest::Approx(2.0));
}

TEST_CASE("conservation laws annihilate the rhs") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (const auto& mat : {kTwoStep, kHypotheticalTruth,
                          MechanismMatrix{{-1, 0, 0, 0, 1, 0}, {0, -1, 0, 0, -1, 1}, {0, 0, 1, 1, 0, -1}}}) {
    for (auto convention : {RateConvention::kUnitCoefficient, RateConvention::kMassAction}) {
      KineticModel m = to_kinetic_model(mat, convention);
      const auto basis = conserved_vectors(m);
      CHECK_FALSE(basis.empty());
      for (int trial = 0; trial < 20; ++trial) {
        for (auto& k : m.theta) k = u(rng);
        std::vector<double> c(m.n_species());
        for (auto& v : c) v = u(rng);
        const auto d = rhs(m, c);
        for (const auto& w : basis) {
          double dot = 0.0, scale = 0.0;
          for (int j = 0; j < m.n_species(); ++j) {
            dot += static_cast<double>(w[j]) * d[j];
            scale += std::abs(static_cast<double>(w[j]) * d[j]);
          }
          CHECK(std::abs(dot) <= 1e-12 * std::max(1.0, scale));
        }
      }
    }
  }
}

TEST_CASE("species at zero are never driven negative") {
  KineticModel h = to_kinetic_model(kHypotheticalTruth);
  h.theta = {1, 2, 3, 4};
  for (int j = 0; j < 5; ++j) {
    std::vector<double> c{1, 2, 3, 4, 5};
    c[j] = 0.0;
    CHECK(rhs(h, c)[j] >= 0.0);
  }
}

TEST_CASE("net coefficients sum to matrix column sums") {
  const KineticModel m = to_kinetic_model(kHypotheticalTruth, RateConvention::kMassAction);
  const auto s = m.coefficient_matrix();
  for (int j = 0; j < kHypotheticalTruth.cols(); ++j) {
    double total = 0.0;
    for (const auto& row : s) total += row[j];
    CHECK(total == kHypotheticalTruth.column_sum(j));
  }
}

TEST_CASE("column names") {
  CHECK(column_names({"A", "B", "C"}, 5) == std::vector<std::string>{"A", "B", "C", "D", "E"});
  CHECK(column_names({"X", "Y"}, 3) == std::vector<std::string>{"X", "Y", "Z"});
  CHECK(column_names({"X", "Y"}, 4) == std::vector<std::string>{"X", "Y", "Z", "I1"});
}
