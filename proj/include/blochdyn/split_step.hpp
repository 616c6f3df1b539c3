#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <sstream>
#include <vector>

#include "blochdyn/central_equation.hpp"
#include "blochdyn/errors.hpp"
#include "blochdyn/rk4.hpp"

namespace blochdyn {

/// Wavefunction sampled on x_j = -L/2 + j dx, j = 0..N-1, periodic in L.
template <typename Scalar>
struct GridState {
  Scalar length = 0;
  ComplexVector<Scalar> psi;

  Eigen::Index points() const { return psi.size(); }
  Scalar dx() const { return length / Scalar(psi.size()); }
  Scalar position(Eigen::Index j) const { return -length / Scalar(2) + dx() * Scalar(j); }
  Scalar norm() const { return std::sqrt(psi.squaredNorm() * dx()); }

  /// Angular wavenumbers in FFT order.
  RealVector<Scalar> wavenumbers() const {
    const Eigen::Index n = points();
    RealVector<Scalar> k(n);
    const Scalar dk = Scalar(2) * std::numbers::pi_v<Scalar> / length;
    for (Eigen::Index m = 0; m < n; ++m) k(m) = dk * Scalar(m < n / 2 ? m : m - n);
    return k;
  }
};

/// Normalized Gaussian exp(-(x-x0)^2 / (4 sigma^2) + i k0 x); sigma is the
/// position standard deviation.
template <typename Scalar>
GridState<Scalar> gaussian_packet(Scalar length, Eigen::Index points, Scalar x0, Scalar k0, Scalar sigma) {
  if (points < 2 || (points & (points - 1)) != 0) throw InvalidInput("grid size must be a power of two");
  if (!(sigma > 0) || !(length > 0)) throw InvalidInput("packet width and domain length must be positive");
  GridState<Scalar> s;
  s.length = length;
  s.psi.resize(points);
  for (Eigen::Index j = 0; j < points; ++j) {
    const Scalar x = s.position(j);
    const Scalar d = x - x0;
    s.psi(j) = std::polar(std::exp(-d * d / (Scalar(4) * sigma * sigma)), k0 * x);
  }
  s.psi /= s.norm();
  return s;
}

template <typename Scalar>
struct PacketMoments {
  Scalar x_mean = 0;
  Scalar x_sigma = 0;
  Scalar k_mean = 0;
  Scalar norm = 0;
};

template <typename Scalar>
PacketMoments<Scalar> packet_moments(const GridState<Scalar>& s, Eigen::FFT<Scalar>& fft) {
  PacketMoments<Scalar> m;
  Scalar w = 0, wx = 0, wxx = 0;
  for (Eigen::Index j = 0; j < s.points(); ++j) {
    const Scalar p = std::norm(s.psi(j));
    const Scalar x = s.position(j);
    w += p;
    wx += p * x;
    wxx += p * x * x;
  }
  m.norm = std::sqrt(w * s.dx());
  m.x_mean = wx / w;
  m.x_sigma = std::sqrt(std::max(Scalar(0), wxx / w - m.x_mean * m.x_mean));
  ComplexVector<Scalar> phi(s.points());
  fft.fwd(phi, s.psi);
  const auto k = s.wavenumbers();
  const RealVector<Scalar> p = phi.cwiseAbs2();
  m.k_mean = k.dot(p) / p.sum();
  return m;
}

template <typename Scalar>
struct SplitStepResult {
  std::vector<Scalar> times;
  std::vector<Scalar> x_mean;
  std::vector<Scalar> k_mean;
  std::vector<Scalar> x_sigma;
  std::vector<Scalar> norm;
  GridState<Scalar> final_state;
};

/// Strang-split propagation of i dpsi/dt = (-1/2 d^2/dx^2 + V(x)) psi:
///   exp(-i V dt/2) F^-1 exp(-i k^2 dt/2) F exp(-i V dt/2).
/// Moments are recorded every `stride` steps. Aborts with BoundaryError when
/// the packet centroid comes within 5 sigma of either grid edge.
template <typename Scalar>
SplitStepResult<Scalar> split_step(const GridState<Scalar>& psi0, const std::function<Scalar(Scalar)>& potential,
                                   Scalar duration, Scalar dt, long stride = 1) {
  const auto grid = make_time_grid(duration, dt);
  const Eigen::Index n = psi0.points();
  Eigen::FFT<Scalar> fft;
  stride = std::max(stride, 1L);

  ComplexVector<Scalar> half_kick(n), drift(n);
  for (Eigen::Index j = 0; j < n; ++j)
    half_kick(j) = std::polar(Scalar(1), -potential(psi0.position(j)) * grid.dt / Scalar(2));
  const auto k = psi0.wavenumbers();
  for (Eigen::Index m = 0; m < n; ++m) drift(m) = std::polar(Scalar(1), -k(m) * k(m) / Scalar(2) * grid.dt);

  SplitStepResult<Scalar> out;
  GridState<Scalar> state = psi0;
  ComplexVector<Scalar> phi(n);
  const Scalar half_length = psi0.length / Scalar(2);

  auto record = [&](Scalar t) {
    const auto m = packet_moments(state, fft);
    if (m.x_mean - Scalar(5) * m.x_sigma < -half_length || m.x_mean + Scalar(5) * m.x_sigma > half_length) {
      std::ostringstream os;
      os << "wavepacket within 5 sigma of the grid boundary at t = " << t << " (centroid " << m.x_mean
         << ", sigma " << m.x_sigma << ", half-length " << half_length << ")";
      throw BoundaryError(os.str());
    }
    out.times.push_back(t);
    out.x_mean.push_back(m.x_mean);
    out.k_mean.push_back(m.k_mean);
    out.x_sigma.push_back(m.x_sigma);
    out.norm.push_back(m.norm);
  };

  record(0);
  for (long i = 0; i < grid.steps; ++i) {
    state.psi = state.psi.cwiseProduct(half_kick);
    fft.fwd(phi, state.psi);
    phi = phi.cwiseProduct(drift);
    fft.inv(state.psi, phi);
    state.psi = state.psi.cwiseProduct(half_kick);
    if ((i + 1) % stride == 0 || i + 1 == grid.steps) record(grid.dt * Scalar(i + 1));
  }
  out.final_state = std::move(state);
  return out;
}

/// Free electron in a uniform field, potential energy E x (electron charge
/// folded in as in i dpsi/dt = (p^2/2 + E x) psi).
template <typename Scalar>
SplitStepResult<Scalar> split_step_free(const GridState<Scalar>& psi0, Scalar E, Scalar duration, Scalar dt,
                                        long stride = 1) {
  return split_step<Scalar>(psi0, [E](Scalar x) { return E * x; }, duration, dt, stride);
}

}  // namespace blochdyn
