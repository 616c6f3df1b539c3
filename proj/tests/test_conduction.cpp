#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "blochdyn/conduction.hpp"
#include "blochdyn/units.hpp"

using namespace blochdyn;
using std::numbers::pi;

namespace {

BandFilling<double> filling(double fraction, int points = 256, double shift = 0.0) {
  BandFilling<double> f;
  f.fraction = fraction;
  f.grid_points = points;
  f.shift = shift;
  return f;
}

}  // namespace

TEST_CASE("symmetric occupation") {
  for (int points : {64, 65, 256, 257}) {
    for (double fraction : {0.0, 0.1, 0.25, 0.5, 0.77, 1.0}) {
      const auto f = filling(fraction, points);
      const auto occ = f.occupied_indices();
      CHECK(static_cast<int>(occ.size()) == f.occupied_count());
      std::set<int> unique(occ.begin(), occ.end());
      CHECK(unique.size() == occ.size());
      for (int j : occ) {
        // Every occupied k has its mirror occupied (modulo the zone).
        const double k = f.grid_k(j, 1.0);
        bool mirrored = false;
        for (int m : occ) mirrored |= std::abs(reduce_to_zone(-k, 1.0) - reduce_to_zone(f.grid_k(m, 1.0), 1.0)) < 1e-12;
        CHECK(mirrored);
      }
    }
  }
  CHECK_THROWS_AS(filling(1.5).occupied_indices(), InvalidInput);
  CHECK(filling(0.5, 256).grid_k(0, 1.0) == doctest::Approx(-pi));
}

TEST_CASE("filled band carries no current for any shift") {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> sd(-pi, pi);
  for (int trial = 0; trial < 10; ++trial) {
    const auto p = random_symmetric_potential(1.0, 3, 1.0, rng, 0.3);
    for (int s = 0; s < 3; ++s) CHECK(std::abs(velocity_sum(filling(1.0, 256, sd(rng)), p)) < 1e-8);
  }
}

TEST_CASE("filled-band residual of a narrow-gap band falls off with the grid") {
  // The k-sum is a Riemann sum of a zone-periodic derivative; its error decays
  // like exp(-c N_k |V1|) once the edge gap is resolved.
  const auto p = single_cosine(1.0, 0.05);
  const double shift = 0.37 * 2 * pi / 256;
  const double coarse = std::abs(velocity_sum(filling(1.0, 256, shift), p));
  const double mid = std::abs(velocity_sum(filling(1.0, 512, shift), p));
  const double fine = std::abs(velocity_sum(filling(1.0, 1024, shift), p));
  CHECK(coarse > 1e-3);
  CHECK(mid < coarse / 10);
  CHECK(fine < 1e-5);
}

TEST_CASE("half-filled band") {
  const auto p = single_cosine(1.0, 0.05);
  SUBCASE("no current without a shift") { CHECK(std::abs(velocity_sum(filling(0.5), p)) < 1e-8); }
  SUBCASE("small shift: positive current, linear response") {
    const double shift = 1e-4 * 2 * pi;
    const double v = velocity_sum(filling(0.5, 256, shift), p);
    CHECK(v > 0);
    const double h = shift / 10;
    const double slope = (velocity_sum(filling(0.5, 256, h), p) - velocity_sum(filling(0.5, 256, -h), p)) / (2 * h);
    CHECK(v == doctest::Approx(slope * shift).epsilon(0.1));
    // Same response from the curvature: N_occ * shift * <1/m*>.
    const auto f = filling(0.5);
    double inv_mass = 0;
    for (int j : f.occupied_indices()) inv_mass += band_curvature(f.grid_k(j, 1.0), 0, p);
    CHECK(v == doctest::Approx(shift * inv_mass).epsilon(0.1));
  }
  SUBCASE("antisymmetric in the shift") {
    std::mt19937_64 rng(59);
    const auto q = random_symmetric_potential(1.0, 3, 1.0, rng, 0.3);
    for (double s : {1e-4, 3e-3, 0.2}) {
      const double plus = velocity_sum(filling(0.5, 256, s), q);
      const double minus = velocity_sum(filling(0.5, 256, -s), q);
      CHECK(std::abs(plus + minus) < 1e-8 * std::max(1.0, std::abs(plus)));
    }
  }
  SUBCASE("grid refinement: mean velocity per state is stable") {
    const double shift = 1e-4 * 2 * pi;
    const double coarse = velocity_sum(filling(0.5, 256, shift), p) / 256;
    const double fine = velocity_sum(filling(0.5, 512, shift), p) / 512;
    CHECK(fine == doctest::Approx(coarse).epsilon(0.01));
  }
  SUBCASE("threaded sums are bitwise identical") {
    const auto f = filling(0.5, 256, 0.01);
    CHECK(velocity_sum(f, p, kDefaultTruncation, 1) == velocity_sum(f, p, kDefaultTruncation, 4));
  }
}

TEST_CASE("conductor and insulator") {
  const auto p = single_cosine(1.0, 0.5);
  const double probe = 1e-4 * 2 * pi;
  CHECK(classify(filling(1.0), p, kDefaultTruncation, probe) == Conduction::insulator);
  CHECK(classify(filling(0.5), p, kDefaultTruncation, probe) == Conduction::conductor);
  CHECK(classify(filling(0.0), p, kDefaultTruncation, probe) == Conduction::insulator);
  CHECK(to_string(Conduction::conductor) == "conductor");
  CHECK_THROWS_AS(classify(filling(0.5), p, kDefaultTruncation, 0.0), InvalidInput);
  CHECK_THROWS_AS(velocity_sum(filling(0.5, 32), p), InvalidInput);
}

TEST_CASE("umklapp: a state pushed across the zone edge is the reduced-zone state") {
  const auto p = single_cosine(1.0, 0.3);
  const double k = pi - 0.01, shift = 0.05;
  const double k_red = reduce_to_zone(k + shift, 1.0);
  CHECK(k_red == doctest::Approx(k + shift - 2 * pi));
  for (int band : {0, 1, 2}) {
    const auto pushed = solve_bands(k, shift, p, 10);
    const auto wrapped = solve_bands(k_red, 0.0, p, 10);
    CHECK(std::abs(pushed.energies(band) - wrapped.energies(band)) < 1e-10);
    // u_K(x) = exp(-i K x) psi_K(x) with K = k + shift; expect u_K = exp(-i G x) u_k' up to a constant phase.
    auto u_pushed = [&](double x) { return std::polar(1.0, -(k + shift) * x) * bloch_psi(pushed, band, x); };
    auto u_wrapped = [&](double x) { return std::polar(1.0, -k_red * x) * bloch_psi(wrapped, band, x); };
    const std::complex<double> ref = u_pushed(0.0) / (std::polar(1.0, 0.0) * u_wrapped(0.0));
    const std::complex<double> phase = ref / std::abs(ref);
    for (int i = 0; i < 50; ++i) {
      const double x = -1.0 + 0.05 * i;
      CHECK(std::abs(u_pushed(x) - phase * std::polar(1.0, -2 * pi * x) * u_wrapped(x)) < 1e-8);
    }
  }
}

TEST_CASE("solenoid") {
  CHECK(solenoid_shift(1000, 0.0, 1e-4, 0.1) == 0.0);
  const double s = solenoid_shift(1000, 1e-3, 1e-4, 0.1);
  // mu0 N I a_r / (2 pi r) * e / hbar evaluated by hand with CODATA values.
  const double by_hand = 1.25663706212e-6 * 1000 * 1e-3 * 1e-4 / (2 * pi * 0.1) * 1.602176634e-19 / 1.054571817e-34;
  CHECK(s == doctest::Approx(by_hand).epsilon(1e-12));
  CHECK(s == doctest::Approx(3.04e5).epsilon(0.01));
  CHECK(solenoid_shift(1000, 2e-3, 1e-4, 0.1) == doctest::Approx(2 * s).epsilon(1e-15));
  CHECK_THROWS_AS(solenoid_shift(1000, 1e-3, 0.0, 0.1), InvalidInput);
  CHECK_THROWS_AS(solenoid_shift(-1, 1e-3, 1e-4, 0.1), InvalidInput);
}

TEST_CASE("fractional displacement at half filling") {
  const double k0 = pi / (2 * 1e-10);
  CHECK(fractional_displacement(k0, 1e4) == doctest::Approx(6.4e-7).epsilon(0.01));
  CHECK(fractional_displacement(k0, 0.0) == 0.0);
  CHECK(fractional_displacement(k0, solenoid_shift(1000, 1e-3, 1e-4, 0.1)) == doctest::Approx(1.9e-5).epsilon(0.03));
  CHECK_THROWS_AS(fractional_displacement(0.0, 1.0), InvalidInput);
}
