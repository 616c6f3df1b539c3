#pragma once

#include <cmath>
#include <numbers>

namespace blochdyn {

template <typename Scalar>
constexpr Scalar reciprocal_vector(Scalar a) {
  return Scalar(2) * std::numbers::pi_v<Scalar> / a;
}

/// Maps k into the reduced zone (-pi/a, pi/a]: k - G * m with m the nearest
/// integer to k/G, ties resolved so that +-pi/a both land on +pi/a.
template <typename Scalar>
Scalar reduce_to_zone(Scalar k, Scalar a) {
  const Scalar g = reciprocal_vector(a);
  const Scalar m = std::ceil(k / g - Scalar(0.5));
  return k - g * m;
}

template <typename Scalar>
bool in_reduced_zone(Scalar k, Scalar a, Scalar rel_tol = Scalar(1e-12)) {
  return std::abs(k) <= std::numbers::pi_v<Scalar> / a * (Scalar(1) + rel_tol);
}

}  // namespace blochdyn
