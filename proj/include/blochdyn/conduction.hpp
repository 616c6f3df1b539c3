#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "blochdyn/central_equation.hpp"
#include "blochdyn/errors.hpp"
#include "blochdyn/parallel.hpp"
#include "blochdyn/potential.hpp"
#include "blochdyn/zone.hpp"

namespace blochdyn {

/// Occupation of one band on the uniform grid k_j = -pi/a + j G / N_k,
/// j = 0..N_k-1. The occupied set is inversion symmetric about k = 0 and has
/// round(fraction * N_k) members. Pairs (+k, -k) fill outward by |k|. A
/// self-conjugate point is occupied only when the count is odd: k = 0 on even
/// grids, the zone edge on odd grids. So an even count on an even grid leaves
/// k = 0 empty.
template <typename Scalar>
struct BandFilling {
  int band = 0;
  int grid_points = 256;
  Scalar fraction = 0.5;
  Scalar shift = 0;  ///< eA/hbar in internal wavevector units

  int occupied_count() const { return static_cast<int>(std::lround(fraction * Scalar(grid_points))); }

  Scalar grid_k(int j, Scalar a) const {
    return -std::numbers::pi_v<Scalar> / a + reciprocal_vector(a) * Scalar(j) / Scalar(grid_points);
  }

  /// Grid indices of occupied states (before the shift is applied).
  std::vector<int> occupied_indices() const {
    if (grid_points < 1) throw InvalidInput("k-grid needs at least one point");
    if (fraction < Scalar(0) || fraction > Scalar(1)) throw InvalidInput("filling fraction must lie in [0, 1]");
    const int N = grid_points;
    const int count = occupied_count();
    if (count == N) {
      std::vector<int> all(N);
      for (int j = 0; j < N; ++j) all[j] = j;
      return all;
    }
    // Index of k = 0 when it lies on the grid (N even), else -1. The zone
    // edge j = 0 is self-conjugate on every grid.
    const int zero = N % 2 == 0 ? N / 2 : -1;
    std::vector<int> occ;
    const bool odd = count % 2 == 1;
    if (odd) occ.push_back(zero >= 0 ? zero : 0);
    // Mirror partner of index j is (N - j) mod N.
    std::vector<int> pairs;
    if (zero >= 0) {
      for (int d = 1; d < N / 2; ++d) pairs.push_back(zero + d);
    } else {
      for (int j = (N + 1) / 2; j < N; ++j) pairs.push_back(j);
    }
    for (int j : pairs) {
      if (static_cast<int>(occ.size()) + 2 > count) break;
      occ.push_back(j);
      occ.push_back((N - j) % N);
    }
    if (static_cast<int>(occ.size()) != count)
      throw InvalidInput("cannot build a symmetric occupation with " + std::to_string(count) + " states on " +
                         std::to_string(N) + " points");
    return occ;
  }
};

/// Net group velocity of the occupied states after the shift; occupation
/// labels travel with the states, k_j -> reduce(k_j + shift).
template <typename Scalar>
Scalar velocity_sum(const BandFilling<Scalar>& filling, const FourierPotential<Scalar>& pot,
                    int n = kDefaultTruncation, int threads = 1) {
  if (filling.grid_points < 64) throw InvalidInput("velocity_sum needs at least 64 k-points");
  const Scalar a = pot.lattice_constant();
  const auto occ = filling.occupied_indices();
  std::vector<Scalar> v(occ.size());
  parallel_for(occ.size(), threads, [&](std::size_t i) {
    const Scalar k = reduce_to_zone(filling.grid_k(occ[i], a) + filling.shift, a);
    v[i] = group_velocity(k, filling.band, pot, n);
  });
  return pairwise_sum(v);
}

enum class Conduction { conductor, insulator };

inline std::string to_string(Conduction c) { return c == Conduction::conductor ? "conductor" : "insulator"; }

/// Conductor iff the probe shift changes the velocity sum by more than 1e-8 N_k.
template <typename Scalar>
Conduction classify(BandFilling<Scalar> filling, const FourierPotential<Scalar>& pot, int n, Scalar probe_shift,
                    int threads = 1) {
  if (!(probe_shift > Scalar(0))) throw InvalidInput("probe shift must be positive");
  filling.shift = 0;
  const Scalar base = velocity_sum(filling, pot, n, threads);
  filling.shift = probe_shift;
  const Scalar probed = velocity_sum(filling, pot, n, threads);
  return std::abs(probed - base) > Scalar(1e-8) * Scalar(filling.grid_points) ? Conduction::conductor
                                                                               : Conduction::insulator;
}

/// Solenoid of n_turns per metre carrying current I through a loop of radius
/// r: B = mu0 n I, A = B area / (2 pi r). Returns eA/hbar in m^-1.
double solenoid_shift(double turns_per_meter, double current_amperes, double area_m2, double radius_m);

/// shift / k0.
double fractional_displacement(double k0, double shift);

}  // namespace blochdyn
