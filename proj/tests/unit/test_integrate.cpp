#include <stdexcept>
#include <cmath>

#include "doctest.h"
#include "kinmech/integrate.hpp"
#include "kinmech/translate.hpp"

using namespace kinmech;

namespace {

std::vector<double> grid(double tf, int n) {
  std::vector<double> t(n);
  for (int k = 0; k < n; ++k) t[k] = tf * k / (n - 1);
  return t;
}

}  // namespace

TEST_CASE("first-order decay matches the exponential") {
  KineticModel m = to_kinetic_model(MechanismMatrix{{-1, 1}});
  m.theta = {0.7};
  const auto t = grid(10.0, 30);
  const auto traj = simulate(m, std::vector<double>{2.0, 0.5}, t);
  REQUIRE(traj.ok());
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double a = 2.0 * std::exp(-0.7 * t[k]);
    CHECK(traj.states(k, 0) == doctest::Approx(a).epsilon(1e-5).scale(1e-3));
    CHECK(traj.states(k, 1) == doctest::Approx(2.5 - a).epsilon(1e-5));
  }
  CHECK(traj.states(0, 0) == 2.0);
}

TEST_CASE("consecutive first-order steps match the closed form") {
  KineticModel m = to_kinetic_model(MechanismMatrix{{-1, 1, 0}, {0, -1, 1}});
  const double k1 = 1.3, k2 = 0.4;
  m.theta = {k1, k2};
  const auto t = grid(12.0, 40);
  const auto traj = simulate(m, std::vector<double>{1.0, 0.0, 0.0}, t);
  REQUIRE(traj.ok());
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double a = std::exp(-k1 * t[k]);
    const double b = k1 / (k2 - k1) * (std::exp(-k1 * t[k]) - std::exp(-k2 * t[k]));
    CHECK(std::abs(traj.states(k, 0) - a) < 1e-6);
    CHECK(std::abs(traj.states(k, 1) - b) < 1e-6);
    CHECK(std::abs(traj.states(k, 2) - (1.0 - a - b)) < 1e-6);
  }
}

TEST_CASE("second-order decay with unit coefficients") {
  KineticModel m = to_kinetic_model(MechanismMatrix{{-2, 1}});
  m.theta = {0.5};
  const auto t = grid(5.0, 20);
  const auto traj = simulate(m, std::vector<double>{3.0, 0.0}, t);
  REQUIRE(traj.ok());
  for (std::size_t k = 0; k < t.size(); ++k) CHECK(std::abs(traj.states(k, 0) - 3.0 / (1.0 + 1.5 * t[k])) < 1e-6);
}

TEST_CASE("finite-time blow-up is a failed status") {
  RateTerm growth;
  growth.order = {0, 0};
  growth.deltas = {{0, 1.0}};
  KineticModel m(1, {growth});
  m.theta = {1.0};
  const auto traj = simulate(m, std::vector<double>{1.0}, grid(2.0, 5));
  CHECK_FALSE(traj.ok());
  CHECK_FALSE(traj.failure.empty());
}

TEST_CASE("tighter tolerances move states by less than ten coarse tolerances") {
  KineticModel m = to_kinetic_model(MechanismMatrix{{-2, 1, 0, 0, 0}, {-1, 0, 0, 1, 0}, {0, 0, 0, -1, 1}, {-1, 0, 1, 0, -1}});
  m.theta = {0.1, 0.2, 0.13, 0.25};
  const auto t = grid(10.0, 30);
  const std::vector<double> c0{10, 0, 2, 0, 0};
  IntegratorOptions coarse;
  IntegratorOptions fine;
  fine.rtol /= 2;
  fine.atol /= 2;
  const auto a = simulate(m, c0, t, coarse);
  const auto b = simulate(m, c0, t, fine);
  REQUIRE(a.ok());
  REQUIRE(b.ok());
  for (Eigen::Index k = 0; k < a.states.rows(); ++k) {
    for (Eigen::Index j = 0; j < a.states.cols(); ++j) {
      const double tol = coarse.atol + coarse.rtol * std::abs(b.states(k, j));
      CHECK(std::abs(a.states(k, j) - b.states(k, j)) <= 10 * tol);
    }
  }
}

TEST_CASE("bad inputs throw") {
  KineticModel m = to_kinetic_model(MechanismMatrix{{-1, 1}});
  m.theta = {1.0};
  CHECK_THROWS_AS(simulate(m, std::vector<double>{1.0}, grid(1, 3)), std::invalid_argument);
  CHECK_THROWS_AS(simulate(m, std::vector<double>{1.0, 0.0}, std::vector<double>{0, 1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(simulate(m, std::vector<double>{-1.0, 0.0}, grid(1, 3)), std::invalid_argument);
  CHECK_THROWS_AS(simulate(m, std::vector<double>{1.0, 0.0}, std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("single grid point returns the initial state") {
  KineticModel m = to_kinetic_model(MechanismMatrix{{-1, 1}});
  m.theta = {1.0};
  const auto traj = simulate(m, std::vector<double>{1.5, 0.25}, std::vector<double>{3.0});
  REQUIRE(traj.ok());
  CHECK(traj.states(0, 0) == 1.5);
  CHECK(traj.states(0, 1) == 0.25);
}

TEST_CASE("conserved vectors match hand elimination") {
  // A + B -> D, B + D -> C: left null space spanned by (1,0,1,1) and (0,1,2,1).
  const auto basis = conserved_vectors(to_kinetic_model(MechanismMatrix{{-1, -1, 0, 1}, {0, -1, 1, -1}}));
  REQUIRE(basis.size() == 2);
  for (const auto& w : basis) {
    CHECK(-w[0] - w[1] + w[3] == 0);
    CHECK(-w[1] + w[2] - w[3] == 0);
  }
  const auto none = conserved_vectors(KineticModel(1, {RateTerm{{0}, {{0, -1.0}}}}));
  CHECK(none.empty());
}

TEST_CASE("trajectories keep conserved quantities") {
  KineticModel m = to_kinetic_model(MechanismMatrix{{-1, 0, 0, 0, 1, 0}, {0, -1, 0, 0, -1, 1}, {0, 0, 1, 1, 0, -1}});
  m.theta = {0.759, 0.293, 0.681};
  const auto traj = simulate(m, std::vector<double>{5, 10, 0, 0, 0, 0}, grid(10, 30));
  REQUIRE(traj.ok());
  CHECK(max_conservation_error(traj, conserved_vectors(m)) < 1e-6);
}
