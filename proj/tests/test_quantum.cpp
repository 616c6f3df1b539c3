#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "blochdyn/quantum.hpp"
#include "blochdyn/units.hpp"

using namespace blochdyn;
using std::numbers::pi;

TEST_CASE("stationary ground state without a field") {
  const auto p = single_cosine(1.0, 0.2);
  const double k = 0.4, T = 5.0;
  const auto run = integrate_basis(k, p, 6, 0.0, T, 0.01);
  for (const auto& s : run.report.samples) CHECK(s.fidelity == doctest::Approx(1.0).epsilon(1e-12));
  const double omega = solve_bands(k, 0.0, p, 6).energies(0);
  CHECK(std::abs(run.phase + omega * T) < 1e-8);
  CHECK(run.max_norm_drift < 1e-12);
}

TEST_CASE("diagnostics vanish without a field") {
  const auto s = adiabatic_diagnostics(0.3, single_cosine(1.0, 0.1), 8, 0.0, 0.0);
  CHECK(s.hdot_norm == 0.0);
  CHECK(s.omega_bar_star == 0.0);
  CHECK(s.chain_holds());
}

TEST_CASE("bound chain on random symmetric potentials") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> kd(-pi, pi), ed(1e-4, 1e-1), td(0, 50);
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const auto p = random_symmetric_potential(1.0, 3, 0.5, rng);
    const double k = kd(rng), E = ed(rng), t = td(rng);
    const auto s = adiabatic_diagnostics(k, p, 8, E, t);
    CHECK(s.gap * s.omega_bar_star <= s.commutator_norm * (1 + 1e-9));
    CHECK(s.commutator_norm <= s.hdot_norm * (1 + 1e-9));
    CHECK(s.omega_bar_star <= s.bound_rhs * (1 + 1e-9));
    CHECK(s.chain_holds());
    ++checked;
  }
  CHECK(checked == 40);
}

TEST_CASE("Omega_bar from differentiated eigenvectors matches perturbation theory") {
  // For i != j, (Theta^dag dTheta/dA)_{ij} = <i|dH/dA|j> / (lambda_j - lambda_i).
  const auto p = single_cosine(1.0, 0.15);
  const double k = 2.0, E = 0.01, t = 3.0;
  const auto g = detail::rotated_generator(k, p, 8, E, t, 1e-6);
  const auto& vec = g.bands.vectors;
  const auto& lam = g.bands.energies;
  RealVector<double> q(vec.rows());
  for (int l = -8; l <= 8; ++l) q(l + 8) = k + 2 * pi * l - E * t;
  const ComplexMatrix<double> dh = vec.adjoint() * q.cast<std::complex<double>>().asDiagonal() * vec;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      if (i == j) continue;
      const std::complex<double> expected = -E * dh(i, j) / (lam(j) - lam(i));
      CHECK(std::abs(std::abs(g.omega_bar(i, j)) - std::abs(expected)) < 1e-7);
    }
}

TEST_CASE("adiabatic following through the zone-edge gap") {
  // Landau-Zener leakage exp(-2 pi V1^2 / (G E)) = exp(-0.04 / E) for V1 = 0.2.
  const auto p = single_cosine(1.0, 0.2);
  const double k0 = -3 * pi / 4, sweep = pi / 2;
  SUBCASE("slow sweep stays in the ground state") {
    const double E = 1e-3;
    const auto run = integrate_basis(k0, p, 6, E, sweep / E, 0.25, std::nullopt, 100);
    CHECK(run.report.samples.back().fidelity >= 0.9999);
    CHECK(run.report.chain_holds());
    CHECK(run.max_norm_drift < 1e-10);
  }
  SUBCASE("fast sweep breaks down") {
    const double E = 10.0;
    const auto run = integrate_basis(k0, p, 6, E, sweep / E, 1e-4, std::nullopt, 100);
    CHECK(run.report.samples.back().fidelity < 0.99);
  }
}

TEST_CASE("rotated-frame integration agrees with direct integration") {
  const auto p = single_cosine(1.0, 0.3);
  const double k = 1.0, E = 0.2, T = 1.0, dt = 1e-4;
  const int n = 3;
  const auto start = solve_bands(k, 0.0, p, n);
  ComplexVector<double> x0 = (start.vectors.col(0) + start.vectors.col(1)) / std::sqrt(2.0);
  const auto direct = integrate_basis(k, p, n, E, T, dt, x0, 1000);
  const auto y = integrate_adiabatic_frame(k, p, n, E, T, dt, x0);
  const auto end = solve_bands(k, -E * T, p, n);
  const ComplexVector<double> expected = end.vectors.adjoint() * direct.final_state.coeffs;
  CHECK((y - expected).norm() < 1e-8);
}

TEST_CASE("unitarity over 10^4 steps") {
  std::mt19937_64 rng(43);
  const auto p = random_hermitian_potential(1.0, 3, 0.4, rng);
  ComplexVector<double> x0 = ComplexVector<double>::Random(2 * 6 + 1);
  x0.normalize();
  const auto run = integrate_basis(0.2, p, 6, 0.05, 100.0, 0.01, x0, 10000);
  CHECK(run.max_norm_drift < 1e-10);
}

TEST_CASE("input validation") {
  const auto p = single_cosine(1.0, 0.2);
  CHECK_THROWS_AS(integrate_basis(0.0, p, 3, 0.0, 1.0, 0.1, ComplexVector<double>(ComplexVector<double>::Ones(7))),
                  InvalidInput);
  CHECK_THROWS_AS(integrate_basis(0.0, p, 3, 0.0, 1.0, 0.1, ComplexVector<double>(ComplexVector<double>::Zero(5))),
                  InvalidInput);
  const FourierPotential<double> zero(1.0, {});
  CHECK_THROWS_AS(adiabatic_diagnostics(pi, zero, 3, 0.1, 0.0), DegeneratePointError);
}

TEST_CASE("SI-scaled zone-edge scenario") {
  const UnitSystem u;
  const double v1 = u.energy_from_ev(0.5);
  const auto p = single_cosine(1.0, v1);
  const double E = u.to_internal(10.0, Dimension::electric_field);
  const auto s = adiabatic_diagnostics(pi - 1e-3, p, 10, E, 0.0);
  CHECK(u.energy_to_ev(s.gap) == doctest::Approx(1.0).epsilon(0.05));
  const double omega_ev = u.energy_to_ev(s.omega_bar_star);
  CHECK(omega_ev > 1e-9);
  CHECK(omega_ev < 1e-7);
  CHECK(s.chain_holds());
}
