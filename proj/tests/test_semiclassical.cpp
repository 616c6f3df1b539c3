#include <doctest.h>

#include <cmath>
#include <numbers>

#include "blochdyn/semiclassical.hpp"
#include "oracles.hpp"

using namespace blochdyn;
using V3 = Vec3<double>;
using std::numbers::pi;

namespace {

std::complex<double> planar(const V3& v) { return {v.x(), v.y()}; }

/// Times of upward zero crossings of samples y(t), linearly interpolated.
std::vector<double> upward_crossings(const std::vector<double>& t, const std::vector<double>& y) {
  std::vector<double> out;
  for (std::size_t i = 1; i < y.size(); ++i)
    if (y[i - 1] < 0 && y[i] >= 0) out.push_back(t[i - 1] + (t[i] - t[i - 1]) * (-y[i - 1]) / (y[i] - y[i - 1]));
  return out;
}

}  // namespace

TEST_CASE("time grid") {
  const auto g = make_time_grid(1.0, 0.3);
  CHECK(g.steps == 4);
  CHECK(g.dt * g.steps == doctest::Approx(1.0));
  CHECK(make_time_grid(1.0, 0.1).steps == 10);
  CHECK_THROWS_AS(make_time_grid(1.0, 0.0), InvalidInput);
  CHECK_THROWS_AS(make_time_grid(0.05, 0.1), InvalidInput);
}

TEST_CASE("free electron in a uniform field") {
  SUBCASE("no field: uniform drift") {
    const V3 k0(0.3, -0.2, 0);
    const auto tr = evolve_free_E<double>(k0, V3::Zero(), 5.0, 0.5);
    CHECK(tr.tag == EquationTag::FREE_E);
    for (std::size_t i = 0; i < tr.size(); ++i) {
      CHECK(tr.k[i] == k0);
      CHECK((tr.x[i] - k0 * tr.times[i]).norm() < 1e-14);
    }
  }
  SUBCASE("dv/dt = -E and the kinematic displacement") {
    const V3 E(1, 0, 0);
    const auto tr = evolve_free_E<double>(V3::Zero(), E, 2.0, 0.01);
    CHECK(tr.x.back().x() - tr.x.front().x() == doctest::Approx(-2.0).epsilon(1e-14));
    for (std::size_t i = 1; i < tr.size(); ++i) {
      const V3 a = (tr.v[i] - tr.v[i - 1]) / (tr.times[i] - tr.times[i - 1]);
      CHECK((a + E).norm() < 1e-10);
      CHECK(tr.times[i] > tr.times[i - 1]);
    }
  }
  SUBCASE("k(t) closed form and Simpson phase") {
    const V3 k0(0.5, 0.1, 0), E(0.2, -0.3, 0);
    const auto tr = evolve_free_E<double>(k0, E, 3.0, 0.1);
    for (std::size_t i = 0; i < tr.size(); ++i) CHECK((tr.k[i] - (k0 - E * tr.times[i])).norm() <= 1e-15);
    // Integral of |k0 - E t|^2 / 2 over [0, T] in closed form.
    const double T = 3.0;
    const double exact = (k0.squaredNorm() * T - k0.dot(E) * T * T + E.squaredNorm() * T * T * T / 3) / 2;
    CHECK(tr.phase.back() == doctest::Approx(exact).epsilon(1e-13));
  }
}

TEST_CASE("motion in a general potential") {
  SUBCASE("linear potential reproduces the uniform-field solution") {
    const double s = 0.7;
    const auto gv = evolve_general_V<double>(0.2, 0.0, ScalarField<double>::linear(s), 4.0, 0.01);
    const auto fe = evolve_free_E<double>(V3(0.2, 0, 0), V3(-s, 0, 0), 4.0, 0.01);
    for (std::size_t i = 0; i < gv.size(); ++i) {
      CHECK(std::abs(gv.x[i].x() - fe.x[i].x()) < 1e-10);
      CHECK(std::abs(gv.v[i].x() - fe.v[i].x()) < 1e-10);
    }
  }
  SUBCASE("harmonic well oscillates at w0 with conserved amplitude") {
    const double w0 = 1.3, period = 2 * pi / w0;
    const auto tr = evolve_general_V<double>(0.0, 1.0, ScalarField<double>::quadratic(-w0 * w0), 10 * period,
                                             period / 1000);
    const oracle::Harmonic exact{w0, 1.0, 0.0};
    double amp_max = 0, amp_min = 1e300;
    for (std::size_t i = 0; i < tr.size(); ++i) {
      const double x = tr.x[i].x(), v = tr.v[i].x();
      const double amp = std::sqrt(x * x + v * v / (w0 * w0));
      amp_max = std::max(amp_max, amp);
      amp_min = std::min(amp_min, amp);
      CHECK(std::abs(x - exact.x(tr.times[i])) < 1e-6);
    }
    CHECK(amp_max - amp_min < 1e-6);
    CHECK(tr.meta.max_relative_energy_drift < 1e-6);
  }
  SUBCASE("no potential: straight line") {
    const auto tr = evolve_general_V<double>(0.4, -1.0, ScalarField<double>::zero(), 3.0, 0.1);
    CHECK(tr.x.back().x() == doctest::Approx(-1.0 + 0.4 * 3.0));
  }
  SUBCASE("energy drift beyond the limit is rejected") {
    CHECK_THROWS_AS(evolve_general_V<double>(0.0, 1.0, ScalarField<double>::quadratic(-100.0), 10.0, 0.15),
                    EnergyDriftError);
  }
  SUBCASE("cosine potential conserves energy") {
    const auto cosine = ScalarField<double>::from_potential(single_cosine(1.0, 0.3));
    const auto tr = evolve_general_V<double>(0.1, 0.2, cosine, 50.0, 1e-3);
    CHECK(tr.meta.max_relative_energy_drift < 1e-6);
  }
}

TEST_CASE("RK4 order: halving dt cuts the endpoint error at least 8x") {
  SUBCASE("harmonic") {
    const double w0 = 1.0, T = 10.0;
    const oracle::Harmonic exact{w0, 1.0, 0.5};
    auto err = [&](double dt) {
      const auto tr = evolve_general_V<double>(0.5, 1.0, ScalarField<double>::quadratic(-1.0), T, dt, 0.0);
      return std::hypot(tr.x.back().x() - exact.x(T), (tr.v.back().x() - exact.v(T)) / w0);
    };
    CHECK(err(0.1) / err(0.05) >= 8.0);
  }
  SUBCASE("cyclotron") {
    const double B = 1.0, T = 10.0;
    const V3 v0(1, 0, 0);
    const oracle::LorentzExact exact{planar(v0), 0.0, 0.0, B};
    auto err = [&](double dt) {
      const auto tr = evolve_lorentz<double>(v0, V3::Zero(), V3::Zero(), B, T, dt);
      return std::abs(planar(tr.x.back()) - exact.position(T));
    };
    CHECK(err(0.1) / err(0.05) >= 8.0);
  }
}

TEST_CASE("Lorentz force") {
  SUBCASE("circle of radius |v0| / w_c") {
    const double B = 2.0;
    const V3 v0(0.6, 0.8, 0), x0(0.3, -0.1, 0);
    const auto tr = evolve_lorentz<double>(v0, x0, V3::Zero(), B, 3 * 2 * pi / B, 1e-3);
    const V3 centre = x0 - detail::cross_z(v0) / B;
    for (std::size_t i = 0; i < tr.size(); i += 50) CHECK((tr.x[i] - centre).norm() == doctest::Approx(0.5).epsilon(1e-9));
  }
  SUBCASE("crossed fields: E x B drift") {
    const double B = 1.5;
    const V3 v0(0.2, 0.4, 0), x0(1, 2, 0), E(0.3, -0.1, 0);
    const oracle::LorentzExact exact{planar(v0), planar(x0), planar(E), B};
    const auto tr = evolve_lorentz<double>(v0, x0, E, B, 20.0, 1e-3);
    for (std::size_t i = 0; i < tr.size(); i += 100) {
      CHECK(std::abs(planar(tr.x[i]) - exact.position(tr.times[i])) < 1e-6);
      CHECK(std::abs(planar(tr.v[i]) - exact.velocity(tr.times[i])) < 1e-6);
    }
    // The guiding centre drifts with (E x B) / B^2 for charge -1 ... independent of sign conventions
    // the drift speed is |E| / B.
    CHECK(std::abs(exact.drift()) == doctest::Approx(E.norm() / B));
  }
  SUBCASE("no magnetic field: uniform acceleration") {
    const V3 E(0.0, 2.0, 0);
    const auto tr = evolve_lorentz<double>(V3(1, 0, 0), V3::Zero(), E, 0.0, 1.0, 0.1);
    CHECK((tr.v.back() - V3(1, -2, 0)).norm() < 1e-12);
    CHECK((tr.x.back() - V3(1, -1, 0)).norm() < 1e-12);
  }
}

TEST_CASE("symmetric-gauge wavepacket equation") {
  SUBCASE("cyclotron circle about the origin") {
    const double kappa = 0.8, B = 1.7;
    const V3 k0(kappa, 0, 0), x0(0, -kappa / B, 0);
    CHECK((centered_start(k0, B) - x0).norm() < 1e-15);
    const auto tr = evolve_fundamental<double>(k0, x0, V3::Zero(), B, 3 * 2 * pi / B, 1e-3);
    const double r = kappa / B;
    for (std::size_t i = 0; i < tr.size(); ++i) {
      const double t = tr.times[i];
      const V3 expect(r * std::sin(B * t), -r * std::cos(B * t), 0);
      CHECK((tr.x[i] - expect).norm() <= 1e-6 * r);
      CHECK((tr.v[i] - V3(kappa * std::cos(B * t), kappa * std::sin(B * t), 0)).norm() <= 1e-6 * kappa);
    }
  }
  SUBCASE("rest is a fixed point") {
    const auto tr = evolve_fundamental<double>(V3::Zero(), V3::Zero(), V3::Zero(), 1.0, 10.0, 0.1);
    CHECK(tr.x.back().norm() == 0.0);
    CHECK(tr.v.back().norm() == 0.0);
  }
  SUBCASE("matches Lorentz for a generic orbit once the centre is the origin") {
    const double B = 1.2;
    const V3 v0(0.3, -0.5, 0), x_lorentz(2.0, -1.0, 0);
    const V3 centre = x_lorentz - detail::cross_z(v0) / B;
    const auto lor = evolve_lorentz<double>(v0, x_lorentz, V3::Zero(), B, 3 * 2 * pi / B, 1e-3);
    const auto fun = evolve_fundamental<double>(v0, centered_start(v0, B), V3::Zero(), B, 3 * 2 * pi / B, 1e-3);
    for (std::size_t i = 0; i < lor.size(); ++i) {
      CHECK((fun.x[i] + centre - lor.x[i]).norm() < 1e-6);
      CHECK((fun.v[i] - lor.v[i]).norm() < 1e-6);
    }
  }
  SUBCASE("B = 0 is rejected") {
    CHECK_THROWS_AS(evolve_fundamental<double>(V3(1, 0, 0), V3::Zero(), V3::Zero(), 0.0, 1.0, 0.1), InvalidInput);
  }
  SUBCASE("time reversal with velocities and B reversed") {
    const double B = 0.9, T = 7.0;
    const V3 k0(0.4, 0.3, 0), x0(0.5, -0.2, 0);
    const auto fwd = evolve_fundamental<double>(k0, x0, V3::Zero(), B, T, 1e-3);
    const auto back = evolve_fundamental<double>(V3(-fwd.v.back()), fwd.x.back(), V3::Zero(), -B, T, 1e-3);
    CHECK((back.x.back() - x0).norm() < 1e-6);
    CHECK((back.v.back() + k0).norm() < 1e-6);
  }
}

TEST_CASE("fundamental versus Lorentz divergence") {
  const double B = 1.0;
  const V3 k0(1, 0, 0);
  SUBCASE("centred, no field: identical within 1e-6 over three periods") {
    const auto r = compare_fundamental_lorentz<double>(k0, centered_start(k0, B), V3::Zero(), B, 3 * 2 * pi, 1e-3);
    CHECK(r.max_position < 1e-6);
    CHECK(r.max_velocity < 1e-6);
  }
  SUBCASE("electric field: velocity divergence exceeds 0.1 by t = 10") {
    const auto r = compare_fundamental_lorentz<double>(k0, centered_start(k0, B), V3(1, 0, 0), B, 10.0, 1e-3);
    CHECK(r.max_velocity > 1.5);
    double first = -1;
    for (std::size_t i = 0; i < r.fundamental.size() && first < 0; ++i)
      if ((r.fundamental.v[i] - r.lorentz.v[i]).norm() > 0.1) first = r.fundamental.times[i];
    CHECK(first > 0.6);
    CHECK(first < 0.7);
  }
  SUBCASE("off-centre start diverges") {
    const auto r = compare_fundamental_lorentz<double>(k0, V3(0.5, 0.5, 0), V3::Zero(), B, 3 * 2 * pi, 1e-3);
    CHECK(r.max_position > 0.1);
  }
}

TEST_CASE("Bloch electron in a uniform field") {
  const auto p = single_cosine(1.0, 0.05);
  SUBCASE("no field: constant velocity") {
    const auto tr = evolve_periodic_E<double>(0.7, 0, p, 10, 0.0, 5.0, 0.5);
    for (const auto& v : tr.v) CHECK(v.x() == doctest::Approx(tr.v.front().x()).epsilon(1e-12));
  }
  SUBCASE("Bloch oscillation period (2 pi / a) / E") {
    const double E = 0.01, TB = 2 * pi / E;
    const auto tr = evolve_periodic_E<double>(-2.0, 0, p, 10, E, 3.2 * TB, TB / 2000);
    std::vector<double> v;
    for (const auto& s : tr.v) v.push_back(s.x());
    const auto c = upward_crossings(tr.times, v);
    REQUIRE(c.size() >= 3);
    for (std::size_t i = 1; i < c.size(); ++i) CHECK(c[i] - c[i - 1] == doctest::Approx(TB).epsilon(0.01));
    for (const auto& k : tr.k_reduced) CHECK(in_reduced_zone(k.x(), 1.0));
    const std::size_t one_period = static_cast<std::size_t>(std::lround(TB / tr.meta.dt));
    CHECK(std::abs(tr.x[one_period].x() - tr.x[0].x()) < 1e-6);
  }
  SUBCASE("acceleration follows the inverse effective mass") {
    const double E = 0.02;
    const auto tr = evolve_periodic_E<double>(-3.0, 0, single_cosine(1.0, 0.3), 10, E, 2 * pi / E, 0.05);
    double max_inv = 0;
    for (double m : tr.inverse_mass) max_inv = std::max(max_inv, std::abs(m));
    int checked = 0;
    for (std::size_t i = 1; i + 1 < tr.size(); ++i) {
      if (std::abs(tr.inverse_mass[i]) < 0.1 * max_inv) continue;
      const double dvdt = (tr.v[i + 1].x() - tr.v[i - 1].x()) / (2 * tr.meta.dt);
      CHECK(dvdt == doctest::Approx(-E * tr.inverse_mass[i]).epsilon(0.01));
      ++checked;
    }
    CHECK(checked > 100);
  }
  SUBCASE("velocity is continuous across the zone-edge wrap") {
    const double E = 0.01, dt = 1e-3;
    // k = k0 + E t reaches pi at t = 1 and wraps to -pi.
    const auto tr = evolve_periodic_E<double>(pi - E, 0, single_cosine(1.0, 0.3), 10, -E, 2.0, dt);
    double max_inv = 0;
    for (double m : tr.inverse_mass) max_inv = std::max(max_inv, std::abs(m));
    const double slope_bound = 1.01 * max_inv * E * dt;
    bool wrapped = false;
    for (std::size_t i = 1; i < tr.size(); ++i) {
      wrapped |= tr.k_reduced[i].x() < tr.k_reduced[i - 1].x();
      CHECK(std::abs(tr.v[i].x() - tr.v[i - 1].x()) < slope_bound + 1e-6);
    }
    CHECK(wrapped);
  }
  SUBCASE("k0 outside the zone is rejected") {
    CHECK_THROWS_AS(evolve_periodic_E<double>(4.0, 0, p, 10, 0.01, 1.0, 0.1), InvalidInput);
  }
}

TEST_CASE("Bloch electron in a magnetic field") {
  SUBCASE("free band reproduces the Lorentz circle") {
    const FourierPotential<double> zero(1.0, {});
    const double B = 1.0;
    const V3 k0(0.8, 0.3, 0);
    const auto bloch = evolve_periodic_B<double>(k0, 0, zero, 6, B, 3 * 2 * pi, 1e-2);
    const auto lor = evolve_lorentz<double>(k0, V3::Zero(), V3::Zero(), B, 3 * 2 * pi, 1e-2);
    for (std::size_t i = 0; i < lor.size(); ++i) CHECK((bloch.x[i] - lor.x[i]).norm() < 1e-6);
  }
  SUBCASE("no field: constant k") {
    const auto tr = evolve_periodic_B<double>(V3(0.5, 0.5, 0), 0, single_cosine(1.0, 0.2), 6, 0.0, 2.0, 0.1);
    CHECK((tr.k.back() - V3(0.5, 0.5, 0)).norm() == 0.0);
  }
  SUBCASE("orbital period scales with the band-bottom effective mass") {
    const auto p = single_cosine(1.0, 3.0);
    const double m_star = effective_mass(0.0, 0, p);
    CHECK(m_star > 1.1);
    const double B = 1.0, expected = 2 * pi / B * m_star;
    const auto tr = evolve_periodic_B<double>(V3(0.05, 0, 0), 0, p, 10, B, 1.2 * expected, expected / 2000);
    // Time at which the k vector has swept a full turn.
    double angle = 0, period = 0;
    for (std::size_t i = 1; i < tr.size(); ++i) {
      const double step = std::arg(std::conj(planar(tr.k[i - 1])) * planar(tr.k[i]));
      if (std::abs(angle + step) >= 2 * pi) {
        period = tr.times[i - 1] + tr.meta.dt * (2 * pi - std::abs(angle)) / std::abs(step);
        break;
      }
      angle += step;
    }
    CHECK(period == doctest::Approx(expected).epsilon(0.02));
  }
}
