#pragma once

#include <cmath>

#include "blochdyn/errors.hpp"

namespace blochdyn {

/// One classic fourth-order Runge-Kutta step of dy/dt = f(t, y).
template <typename State, typename Rhs, typename Scalar>
State rk4_step(const Rhs& f, Scalar t, const State& y, Scalar dt) {
  const Scalar half = dt / Scalar(2);
  const State k1 = f(t, y);
  const State k2 = f(t + half, State(y + half * k1));
  const State k3 = f(t + half, State(y + half * k2));
  const State k4 = f(t + dt, State(y + dt * k3));
  return y + (dt / Scalar(6)) * (k1 + Scalar(2) * k2 + Scalar(2) * k3 + k4);
}

/// Uniform time grid covering [0, T]: the step count is ceil(T / dt) and the
/// step is shrunk to land exactly on T.
template <typename Scalar>
struct TimeGrid {
  long steps;
  Scalar dt;
};

template <typename Scalar>
TimeGrid<Scalar> make_time_grid(Scalar duration, Scalar dt) {
  if (!(dt > Scalar(0)) || !std::isfinite(dt)) throw InvalidInput("time step must be positive");
  if (!(duration >= dt)) throw InvalidInput("duration must be at least one time step");
  const long steps = static_cast<long>(std::ceil(duration / dt - Scalar(1e-9)));
  return {steps, duration / Scalar(steps)};
}

}  // namespace blochdyn
