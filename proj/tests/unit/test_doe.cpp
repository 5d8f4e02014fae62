#include <algorithm>
#include <stdexcept>
#include <cmath>

#include "doctest.h"
#include "kinmech/datagen.hpp"
#include "kinmech/doe.hpp"
#include "kinmech/select.hpp"

using namespace kinmech;

namespace {

KineticModel first_order(double k) {
  KineticModel m = to_kinetic_model(MechanismMatrix{{-1, 1}});
  m.theta = {k};
  return m;
}

std::vector<double> grid() {
  std::vector<double> t(30);
  for (int k = 0; k < 30; ++k) t[k] = 10.0 * k / 29;
  return t;
}

// Closed form for A -> B at rates 1 and 2 from C_A = a: both A and B differ by
// a (e^-t - e^-2t).
double exponential_pair(double a, const std::vector<double>& t) {
  double total = 0.0;
  for (double ti : t) total += 2.0 * std::pow(a * (std::exp(-ti) - std::exp(-2.0 * ti)), 2);
  return total;
}

}  // namespace

TEST_CASE("identical models do not discriminate") {
  const KineticModel m = first_order(0.7);
  for (double a : {0.0, 1.0, 5.0}) CHECK(discrepancy(m, m, std::vector<double>{a, 0.5}, grid()) == 0.0);
  DesignSpace space{{0, 0}, {10, 0}, grid()};
  const DoEProposal p = design(m, m, space, 20, 3);
  CHECK(p.objective == 0.0);
  NormalStream rng(3);
  const double first = 10.0 * rng.uniform();
  CHECK(p.x_star[0] == first);
}

TEST_CASE("exponential pair matches the closed form") {
  const auto t = grid();
  IntegratorOptions tight;
  tight.rtol = 1e-10;
  tight.atol = 1e-12;
  for (double a : {1.0, 3.0}) {
    const double want = exponential_pair(a, t);
    CHECK(std::abs(discrepancy(first_order(1), first_order(2), std::vector<double>{a, 0.0}, t, tight) - want) <
          1e-8 * std::max(1.0, want));
    CHECK(discrepancy(first_order(1), first_order(2), std::vector<double>{a, 0.0}, t) ==
          doctest::Approx(want).epsilon(1e-5));
  }
  const double d1 = discrepancy(first_order(1), first_order(2), std::vector<double>{1.0, 0.0}, t);
  const double d2 = discrepancy(first_order(1), first_order(2), std::vector<double>{2.0, 0.0}, t);
  CHECK(d2 > d1);
  CHECK(discrepancy(first_order(2), first_order(1), std::vector<double>{2.0, 0.0}, t) == d2);
}

TEST_CASE("monotone objective puts the design on the upper bound") {
  DesignSpace space{{0, 0}, {10, 0}, grid()};
  const DoEProposal p = design(first_order(1), first_order(2), space, 50, 1);
  CHECK(p.x_star[0] == 10.0);
  CHECK(p.x_star[1] == 0.0);
  CHECK(p.objective == doctest::Approx(exponential_pair(10.0, grid())).epsilon(1e-5));
  CHECK(p.objective == discrepancy(first_order(1), first_order(2), p.x_star, space.times));
}

TEST_CASE("larger budgets never do worse") {
  // Two-step chain against one step: a non-monotone landscape in (A, B).
  KineticModel chain = to_kinetic_model(MechanismMatrix{{-1, 0, 1}, {0, 1, -1}});
  chain.theta = {0.8, 0.3};
  KineticModel direct = to_kinetic_model(MechanismMatrix{{-1, 1, 0}});
  direct.theta = {0.4};
  DesignSpace space{{0, 0}, {5, 5}, grid()};
  double last = -1.0;
  for (int budget : {1, 5, 40}) {
    const DoEProposal p = design(chain, direct, space, budget, 11);
    CHECK(p.objective >= last);
    last = p.objective;
    for (std::size_t j = 0; j < 2; ++j) {
      CHECK(p.x_star[j] >= space.lower[j]);
      CHECK(p.x_star[j] <= space.upper[j]);
    }
  }
}

TEST_CASE("failed simulation scores zero") {
  RateTerm growth;
  growth.order = {0, 0};
  growth.deltas = {{0, 1.0}};
  KineticModel bad(2, {growth});
  bad.theta = {5.0};
  CHECK(discrepancy(bad, first_order(1), std::vector<double>{1.0, 0.0}, grid()) == 0.0);
}

TEST_CASE("design argument checks") {
  DesignSpace space{{0, 0}, {1, 1}, grid()};
  CHECK_THROWS_AS(design(first_order(1), first_order(2), space, 0, 1), std::invalid_argument);
  DesignSpace inverted{{2, 0}, {1, 1}, grid()};
  CHECK_THROWS_AS(design(first_order(1), first_order(2), inverted, 5, 1), std::invalid_argument);
}

TEST_CASE("proposal after a short hypothetical run stays in the box") {
  CaseStudy cs = case_study("hypothetical");
  const Dataset data = generate(cs, 2);
  DiscoveryOptions opt;
  opt.seed = 2;
  const IterationReport it = run_iteration(cs.spec, plan_iteration(cs.spec, 2), data, opt);
  const ScoredCandidate& a = it.best();
  const auto b = std::find_if(it.all_scores.begin(), it.all_scores.end(),
                              [&](const ScoredCandidate& c) { return !isomorphic(c.matrix, a.matrix, 3); });
  REQUIRE(b != it.all_scores.end());
  KineticModel nu = to_kinetic_model(a.matrix);
  nu.theta = a.fit.theta_star;
  KineticModel mu = to_kinetic_model(b->matrix);
  mu.theta = b->fit.theta_star;
  const DesignSpace space{{1, 0, 0}, {10, 2, 3}, cs.time_grid()};
  const DoEProposal p = design(nu, mu, space, 40, 5);
  CHECK(p.objective > 0.0);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(p.x_star[j] >= space.lower[j]);
    CHECK(p.x_star[j] <= space.upper[j]);
  }
}
