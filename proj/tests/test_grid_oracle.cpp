#include <doctest.h>

#include <cmath>
#include <numbers>

#include "blochdyn/grid_oracle.hpp"

using namespace blochdyn;
using std::numbers::pi;

namespace {

void check_against_central(const FourierPotential<double>& p, int periods, Eigen::Index points, int n, double tol) {
  const auto g = grid_ground_state(p, periods, points, periods);
  REQUIRE(g.energies.size() >= periods);
  for (int i = 0; i < periods; ++i) {
    // Labels sit on the commensurate set 2 pi j / (M a).
    const double j = g.k(i) * periods / (2 * pi);
    CHECK(std::abs(j - std::round(j)) < 1e-8);
    CHECK(std::abs(g.energies(i) - band_energy(g.k(i), 0, p, n)) < tol);
  }
}

}  // namespace

TEST_CASE("empty ring levels") {
  const FourierPotential<double> zero(1.0, {});
  const auto g = grid_ground_state(zero, 8, 256, 3);
  const double e1 = std::pow(2 * pi / 8.0, 2) / 2;
  CHECK(std::abs(g.energies(0)) < 1e-10);
  CHECK(g.energies(1) == doctest::Approx(e1).epsilon(1e-10));
  CHECK(g.energies(2) == doctest::Approx(e1).epsilon(1e-10));
  CHECK(std::abs(g.k(1) + g.k(2)) < 1e-10);
  CHECK(std::abs(std::abs(g.k(1)) - 2 * pi / 8.0) < 1e-10);
}

TEST_CASE("weak cosine ground band matches the central equation") {
  check_against_central(single_cosine(1.0, 0.05), 16, 512, 10, 1e-4);
}

TEST_CASE("strong cosine ground band matches the central equation at n = 14") {
  check_against_central(single_cosine(1.0, 5.0), 16, 512, 14, 1e-3);
}

TEST_CASE("Bloch labels of the grid states") {
  const auto p = single_cosine(2.0, 0.3);
  const auto g = grid_ground_state(p, 10, 512, 10);
  for (Eigen::Index i = 0; i < g.energies.size(); ++i) {
    CHECK(in_reduced_zone(g.k(i), 2.0));
    CHECK(g.states.col(i).squaredNorm() * (g.length / 512) == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("grid oracle preconditions") {
  const auto p = single_cosine(1.0, 0.1);
  CHECK_THROWS_AS(grid_ground_state(p, 8, 300, 4), InvalidInput);
  CHECK_THROWS_AS(grid_ground_state(p, 4, 256, 4), InvalidInput);
  CHECK_THROWS_AS(grid_ground_state(p, 8, 256, 0), InvalidInput);
}
