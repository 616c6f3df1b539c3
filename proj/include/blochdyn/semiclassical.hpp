#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "blochdyn/central_equation.hpp"
#include "blochdyn/errors.hpp"
#include "blochdyn/potential.hpp"
#include "blochdyn/rk4.hpp"
#include "blochdyn/zone.hpp"

namespace blochdyn {

template <typename Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;

/// Which equation of motion produced a trajectory.
enum class EquationTag { FREE_E, GENERAL_V, FUNDAMENTAL, LORENTZ, PERIODIC_E, PERIODIC_B };

inline std::string_view to_string(EquationTag tag) {
  switch (tag) {
    case EquationTag::FREE_E: return "FREE_E";
    case EquationTag::GENERAL_V: return "GENERAL_V";
    case EquationTag::FUNDAMENTAL: return "FUNDAMENTAL";
    case EquationTag::LORENTZ: return "LORENTZ";
    case EquationTag::PERIODIC_E: return "PERIODIC_E";
    case EquationTag::PERIODIC_B: return "PERIODIC_B";
  }
  return "UNKNOWN";
}

/// Uniform electric field and a magnetic field B along z. In internal units
/// the cyclotron frequency eB/m equals B.
template <typename Scalar>
struct FieldConfig {
  Vec3<Scalar> E = Vec3<Scalar>::Zero();
  Scalar B = 0;
  Scalar omega_c() const { return B; }
};

template <typename Scalar>
struct Trajectory {
  EquationTag tag = EquationTag::FREE_E;
  std::vector<Scalar> times;
  std::vector<Vec3<Scalar>> k;          ///< unwrapped wavevector
  std::vector<Vec3<Scalar>> k_reduced;  ///< zone-reduced view (periodic tags only)
  std::vector<Vec3<Scalar>> x;
  std::vector<Vec3<Scalar>> v;  ///< group velocity
  std::vector<Scalar> phase;         ///< FREE_E: integral of omega(k(t)) dt
  std::vector<Scalar> inverse_mass;  ///< PERIODIC_E: band curvature along the path
  std::vector<Scalar> energy;        ///< GENERAL_V: conserved energy samples

  struct Meta {
    Scalar dt = 0;
    std::string method;
    std::map<std::string, Scalar> parameters;
    Scalar max_relative_energy_drift = 0;
  } meta;

  std::size_t size() const { return times.size(); }

  void reserve(std::size_t n) {
    times.reserve(n);
    k.reserve(n);
    x.reserve(n);
    v.reserve(n);
  }
};

/// Electrostatic potential phi(x) used by evolve_general_V; the electron's
/// potential energy is -phi (e = 1), so the force is +phi'(x).
template <typename Scalar>
struct ScalarField {
  std::function<Scalar(Scalar)> value;
  std::function<Scalar(Scalar)> derivative;

  static ScalarField zero() {
    return {[](Scalar) { return Scalar(0); }, [](Scalar) { return Scalar(0); }};
  }
  static ScalarField linear(Scalar slope) {
    return {[slope](Scalar x) { return slope * x; }, [slope](Scalar) { return slope; }};
  }
  /// phi = c x^2 / 2. A harmonic well for the electron needs c < 0.
  static ScalarField quadratic(Scalar c) {
    return {[c](Scalar x) { return c * x * x / Scalar(2); }, [c](Scalar x) { return c * x; }};
  }
  static ScalarField from_potential(FourierPotential<Scalar> pot) {
    return {[pot](Scalar x) { return pot.evaluate(x); }, [pot](Scalar x) { return pot.derivative(x); }};
  }
};

namespace detail {

template <typename Scalar>
using PhaseState = Eigen::Matrix<Scalar, 6, 1>;

template <typename Scalar>
Vec3<Scalar> cross_z(const Vec3<Scalar>& v) {
  return {v.y(), -v.x(), Scalar(0)};
}

template <typename Scalar, typename Rhs>
Trajectory<Scalar> integrate_phase_space(EquationTag tag, const Rhs& rhs, const Vec3<Scalar>& x0,
                                         const Vec3<Scalar>& v0, Scalar duration, Scalar dt) {
  const auto grid = make_time_grid(duration, dt);
  Trajectory<Scalar> traj;
  traj.tag = tag;
  traj.meta.dt = grid.dt;
  traj.meta.method = "rk4";
  traj.reserve(static_cast<std::size_t>(grid.steps) + 1);
  PhaseState<Scalar> y;
  y << x0, v0;
  for (long i = 0; i <= grid.steps; ++i) {
    const Scalar t = grid.dt * Scalar(i);
    traj.times.push_back(t);
    traj.x.push_back(y.template head<3>());
    traj.v.push_back(y.template tail<3>());
    traj.k.push_back(y.template tail<3>());
    if (i < grid.steps) y = rk4_step(rhs, t, y, grid.dt);
  }
  return traj;
}

}  // namespace detail

/// Free electron in a uniform field: k(t) = k0 - E t, v_g = k, all closed
/// form. The dynamical phase integral of |k|^2/2 is accumulated with Simpson's
/// rule for comparison against the quantum propagators.
template <typename Scalar>
Trajectory<Scalar> evolve_free_E(const Vec3<Scalar>& k0, const Vec3<Scalar>& E, Scalar duration, Scalar dt,
                                 const Vec3<Scalar>& x0 = Vec3<Scalar>::Zero()) {
  const auto grid = make_time_grid(duration, dt);
  Trajectory<Scalar> traj;
  traj.tag = EquationTag::FREE_E;
  traj.meta.dt = grid.dt;
  traj.meta.method = "closed-form";
  traj.reserve(static_cast<std::size_t>(grid.steps) + 1);
  auto k_at = [&](Scalar t) -> Vec3<Scalar> { return k0 - E * t; };
  auto omega = [&](Scalar t) { return k_at(t).squaredNorm() / Scalar(2); };
  Scalar phase = 0;
  for (long i = 0; i <= grid.steps; ++i) {
    const Scalar t = grid.dt * Scalar(i);
    if (i > 0) {
      const Scalar t0 = t - grid.dt;
      phase += grid.dt / Scalar(6) * (omega(t0) + Scalar(4) * omega(t0 + grid.dt / 2) + omega(t));
    }
    traj.times.push_back(t);
    traj.k.push_back(k_at(t));
    traj.v.push_back(k_at(t));
    traj.x.push_back(x0 + k0 * t - E * (t * t / Scalar(2)));
    traj.phase.push_back(phase);
  }
  return traj;
}

/// 1D motion in an arbitrary electrostatic potential: dv/dt = +phi'(x),
/// dx/dt = v, by RK4. Energy v^2/2 - phi(x) is monitored; relative drift
/// beyond `drift_limit` raises EnergyDriftError (pass a non-positive limit to
/// only record the drift in meta).
template <typename Scalar>
Trajectory<Scalar> evolve_general_V(Scalar k0, Scalar x0, const ScalarField<Scalar>& phi, Scalar duration,
                                    Scalar dt, Scalar drift_limit = Scalar(1e-6)) {
  using State = Eigen::Matrix<Scalar, 2, 1>;
  const auto grid = make_time_grid(duration, dt);
  auto rhs = [&](Scalar, const State& y) -> State { return {y(1), phi.derivative(y(0))}; };
  auto energy = [&](const State& y) { return y(1) * y(1) / Scalar(2) - phi.value(y(0)); };

  Trajectory<Scalar> traj;
  traj.tag = EquationTag::GENERAL_V;
  traj.meta.dt = grid.dt;
  traj.meta.method = "rk4";
  traj.reserve(static_cast<std::size_t>(grid.steps) + 1);
  State y(x0, k0);
  const Scalar e0 = energy(y);
  const Scalar scale = std::max(std::abs(e0), Scalar(1e-12));
  Scalar drift = 0;
  for (long i = 0; i <= grid.steps; ++i) {
    const Scalar t = grid.dt * Scalar(i);
    const Scalar e = energy(y);
    drift = std::max(drift, std::abs(e - e0) / scale);
    traj.times.push_back(t);
    traj.x.push_back({y(0), 0, 0});
    traj.v.push_back({y(1), 0, 0});
    traj.k.push_back({y(1), 0, 0});
    traj.energy.push_back(e);
    if (i < grid.steps) y = rk4_step(rhs, t, y, grid.dt);
  }
  traj.meta.max_relative_energy_drift = drift;
  if (drift_limit > Scalar(0) && drift > drift_limit)
    throw EnergyDriftError("relative energy drift " + std::to_string(drift) + " exceeds limit " +
                           std::to_string(drift_limit) + "; reduce dt");
  return traj;
}

/// Wavepacket equation in the symmetric gauge with the Schroedinger origin at
/// the coordinate origin:
///   dv/dt = -(w/2) v x z - (w^2/2) x_perp - E,  w = B,  k = v.
template <typename Scalar>
Trajectory<Scalar> evolve_fundamental(const Vec3<Scalar>& k0, const Vec3<Scalar>& x0, const Vec3<Scalar>& E,
                                      Scalar B, Scalar duration, Scalar dt) {
  if (B == Scalar(0)) throw InvalidInput("evolve_fundamental needs B != 0; use evolve_free_E");
  const Scalar w = B;
  auto rhs = [&](Scalar, const detail::PhaseState<Scalar>& y) -> detail::PhaseState<Scalar> {
    const Vec3<Scalar> x = y.template head<3>();
    const Vec3<Scalar> v = y.template tail<3>();
    const Vec3<Scalar> x_perp(x.x(), x.y(), Scalar(0));
    detail::PhaseState<Scalar> d;
    d << v, -(w / 2) * detail::cross_z(v) - (w * w / 2) * x_perp - E;
    return d;
  };
  auto traj = detail::integrate_phase_space(EquationTag::FUNDAMENTAL, rhs, x0, k0, duration, dt);
  traj.meta.parameters = {{"B", B}, {"Ex", E.x()}, {"Ey", E.y()}, {"Ez", E.z()}};
  return traj;
}

/// Lorentz force, dv/dt = -v x B - E (internal units, electron charge -1).
template <typename Scalar>
Trajectory<Scalar> evolve_lorentz(const Vec3<Scalar>& v0, const Vec3<Scalar>& x0, const Vec3<Scalar>& E, Scalar B,
                                  Scalar duration, Scalar dt) {
  auto rhs = [&](Scalar, const detail::PhaseState<Scalar>& y) -> detail::PhaseState<Scalar> {
    const Vec3<Scalar> v = y.template tail<3>();
    detail::PhaseState<Scalar> d;
    d << v, -B * detail::cross_z(v) - E;
    return d;
  };
  auto traj = detail::integrate_phase_space(EquationTag::LORENTZ, rhs, x0, v0, duration, dt);
  traj.meta.parameters = {{"B", B}, {"Ex", E.x()}, {"Ey", E.y()}, {"Ez", E.z()}};
  return traj;
}

/// Starting position that gives evolve_fundamental the same initial
/// acceleration as the Lorentz equation: the cyclotron centre sits at the origin.
template <typename Scalar>
Vec3<Scalar> centered_start(const Vec3<Scalar>& k0, Scalar B) {
  if (B == Scalar(0)) throw InvalidInput("cyclotron centre undefined for B = 0");
  return detail::cross_z(k0) / B;
}

template <typename Scalar>
struct DivergenceReport {
  Scalar max_position = 0;
  Scalar max_velocity = 0;
  Trajectory<Scalar> fundamental;
  Trajectory<Scalar> lorentz;
};

/// Runs both equations from the same (x0, v0 = k0) and reports the sup-norm
/// separation over the sampled times.
template <typename Scalar>
DivergenceReport<Scalar> compare_fundamental_lorentz(const Vec3<Scalar>& k0, const Vec3<Scalar>& x0,
                                                     const Vec3<Scalar>& E, Scalar B, Scalar duration, Scalar dt) {
  DivergenceReport<Scalar> r;
  r.fundamental = evolve_fundamental(k0, x0, E, B, duration, dt);
  r.lorentz = evolve_lorentz(k0, x0, E, B, duration, dt);
  for (std::size_t i = 0; i < r.fundamental.size(); ++i) {
    r.max_position = std::max(r.max_position, (r.fundamental.x[i] - r.lorentz.x[i]).norm());
    r.max_velocity = std::max(r.max_velocity, (r.fundamental.v[i] - r.lorentz.v[i]).norm());
  }
  return r;
}

/// Bloch electron in a uniform field along x: k(t) = reduce(k0 - E t), the
/// velocity and band curvature are read off the band along the path, and
/// x(t) integrates v_g (Simpson on each step).
template <typename Scalar>
Trajectory<Scalar> evolve_periodic_E(Scalar k0, int band, const FourierPotential<Scalar>& pot, int n, Scalar E,
                                     Scalar duration, Scalar dt, Scalar x0 = Scalar(0)) {
  const Scalar a = pot.lattice_constant();
  if (!in_reduced_zone(k0, a)) throw InvalidInput("k0 must lie in the reduced zone");
  const auto grid = make_time_grid(duration, dt);
  auto velocity = [&](Scalar t) { return group_velocity(k0 - E * t, band, pot, n); };

  Trajectory<Scalar> traj;
  traj.tag = EquationTag::PERIODIC_E;
  traj.meta.dt = grid.dt;
  traj.meta.method = "band-sampled/simpson";
  traj.meta.parameters = {{"E", E}, {"band", Scalar(band)}, {"n", Scalar(n)}};
  traj.reserve(static_cast<std::size_t>(grid.steps) + 1);
  Scalar x = x0;
  Scalar v = velocity(0);
  for (long i = 0; i <= grid.steps; ++i) {
    const Scalar t = grid.dt * Scalar(i);
    const Scalar k = k0 - E * t;
    traj.times.push_back(t);
    traj.k.push_back({k, 0, 0});
    traj.k_reduced.push_back({reduce_to_zone(k, a), 0, 0});
    traj.x.push_back({x, 0, 0});
    traj.v.push_back({v, 0, 0});
    traj.inverse_mass.push_back(band_curvature(k, band, pot, n));
    if (i < grid.steps) {
      const Scalar v_mid = velocity(t + grid.dt / 2);
      const Scalar v_next = velocity(t + grid.dt);
      x += grid.dt / Scalar(6) * (v + Scalar(4) * v_mid + v_next);
      v = v_next;
    }
  }
  return traj;
}

/// Bloch electron in B along z, with the 1D band extended isotropically to
/// the plane, epsilon(k) = epsilon_band(|k|). Integrates
///   dk/dt = -v_g x B,   dx/dt = v_g,   v_g = epsilon'(|k|) k/|k|.
template <typename Scalar>
Trajectory<Scalar> evolve_periodic_B(const Vec3<Scalar>& k0, int band, const FourierPotential<Scalar>& pot, int n,
                                     Scalar B, Scalar duration, Scalar dt,
                                     const Vec3<Scalar>& x0 = Vec3<Scalar>::Zero()) {
  const Scalar a = pot.lattice_constant();
  auto vg = [&](const Vec3<Scalar>& k) -> Vec3<Scalar> {
    const Vec3<Scalar> kp(k.x(), k.y(), Scalar(0));
    const Scalar mag = kp.norm();
    if (mag == Scalar(0)) return Vec3<Scalar>::Zero();
    return group_velocity(mag, band, pot, n) / mag * kp;
  };
  auto rhs = [&](Scalar, const detail::PhaseState<Scalar>& y) -> detail::PhaseState<Scalar> {
    const Vec3<Scalar> v = vg(y.template tail<3>());
    detail::PhaseState<Scalar> d;
    d << v, -B * detail::cross_z(v);
    return d;
  };
  const auto grid = make_time_grid(duration, dt);
  Trajectory<Scalar> traj;
  traj.tag = EquationTag::PERIODIC_B;
  traj.meta.dt = grid.dt;
  traj.meta.method = "rk4";
  traj.meta.parameters = {{"B", B}, {"band", Scalar(band)}, {"n", Scalar(n)}};
  traj.reserve(static_cast<std::size_t>(grid.steps) + 1);
  detail::PhaseState<Scalar> y;
  y << x0, k0;
  for (long i = 0; i <= grid.steps; ++i) {
    const Scalar t = grid.dt * Scalar(i);
    const Vec3<Scalar> k = y.template tail<3>();
    traj.times.push_back(t);
    traj.x.push_back(y.template head<3>());
    traj.k.push_back(k);
    const Scalar mag = k.norm();
    traj.k_reduced.push_back(mag == Scalar(0) ? k : Vec3<Scalar>(k * (std::abs(reduce_to_zone(mag, a)) / mag)));
    traj.v.push_back(vg(k));
    if (i < grid.steps) y = rk4_step(rhs, t, y, grid.dt);
  }
  return traj;
}

}  // namespace blochdyn
