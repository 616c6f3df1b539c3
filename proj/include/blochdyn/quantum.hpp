#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <sstream>
#include <type_traits>
#include <vector>

#include "blochdyn/central_equation.hpp"
#include "blochdyn/errors.hpp"
#include "blochdyn/potential.hpp"
#include "blochdyn/rk4.hpp"

namespace blochdyn {

/// Plane-wave coefficients X(t) of the electron over l in [-n, n] at base
/// crystal momentum k; the field enters through A(t) = -E t.
template <typename Scalar>
struct BasisState {
  Scalar k = 0;
  ComplexVector<Scalar> coeffs;
  Scalar t = 0;
};

/// One sample of the adiabatic diagnostics.
///   gap              lambda_2 - lambda_1
///   hdot_norm        ||dH/dt||_F, analytic
///   commutator_norm  ||[Omega_bar, Lambda]||_F from finite-differenced eigenvectors
///   omega_bar_star   max_j |Omega_bar_{1j}|
///   bound_rhs        |E| sqrt(2 tr H_bar) / gap, the upper bound on omega_bar_star
///   fidelity         |<ground(t)|X(t)>|^2 (NaN when no state is being propagated)
template <typename Scalar>
struct AdiabaticSample {
  Scalar t = 0;
  Scalar gap = 0;
  Scalar hdot_norm = 0;
  Scalar commutator_norm = 0;
  Scalar omega_bar_star = 0;
  Scalar bound_rhs = 0;
  Scalar fidelity = std::numeric_limits<Scalar>::quiet_NaN();

  /// gap * omega_bar_star <= ||[Omega_bar, Lambda]|| <= ||dH/dt||, with a
  /// relative slack of 1e-9.
  bool chain_holds() const {
    const Scalar rel = Scalar(1e-9);
    const Scalar abs_floor = Scalar(1e-300);
    const bool first = gap * omega_bar_star <= commutator_norm * (1 + rel) + abs_floor;
    const bool second = commutator_norm <= hdot_norm * (1 + rel) + abs_floor;
    return first && second;
  }
};

template <typename Scalar>
struct AdiabaticReport {
  std::vector<AdiabaticSample<Scalar>> samples;

  bool chain_holds() const {
    for (const auto& s : samples)
      if (!s.chain_holds()) return false;
    return true;
  }
  Scalar min_fidelity() const {
    Scalar f = 1;
    for (const auto& s : samples)
      if (!std::isnan(s.fidelity)) f = std::min(f, s.fidelity);
    return f;
  }
};

inline constexpr double kDefaultFdStep = 1e-6;

namespace detail {

/// Aligns each column of `moved` to the same column of `reference` by a phase.
template <typename Scalar>
void align_phases(ComplexMatrix<Scalar>& moved, const ComplexMatrix<Scalar>& reference) {
  for (Eigen::Index c = 0; c < moved.cols(); ++c) {
    const std::complex<Scalar> ov = reference.col(c).dot(moved.col(c));
    const Scalar mag = std::abs(ov);
    if (mag > 0) moved.col(c) *= std::conj(ov) / mag;
  }
}

/// exp(-i H dt) for Hermitian H.
template <typename Scalar>
ComplexMatrix<Scalar> hermitian_propagator(const ComplexMatrix<Scalar>& h, Scalar dt) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix<Scalar>> es(h);
  if (es.info() != Eigen::Success) throw EigenSolverError("eigensolver failed while building propagator");
  const ComplexVector<Scalar> phases =
      es.eigenvalues().unaryExpr([dt](Scalar l) { return std::polar(Scalar(1), -l * dt); });
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

template <typename Scalar>
struct RotatedGenerator {
  BandSolution<Scalar> bands;
  ComplexMatrix<Scalar> omega_bar;  ///< Theta^dag Omega Theta, anti-Hermitian
};

/// Omega = dTheta/dt Theta^dag, obtained by differentiating the phase-fixed
/// eigenvectors with respect to the vector potential (step fd_step) and using
/// dA/dt = -E. Omega is anti-Hermitian-projected before rotation.
template <typename Scalar>
RotatedGenerator<Scalar> rotated_generator(Scalar k, const FourierPotential<Scalar>& pot, int n, Scalar E,
                                           Scalar t, Scalar fd_step) {
  const Scalar shift = -E * t;
  RotatedGenerator<Scalar> g;
  g.bands = solve_bands(k, shift, pot, n);
  auto plus = solve_bands(k, shift + fd_step, pot, n).vectors;
  auto minus = solve_bands(k, shift - fd_step, pot, n).vectors;
  align_phases(plus, g.bands.vectors);
  align_phases(minus, g.bands.vectors);
  const ComplexMatrix<Scalar> theta_dot = (plus - minus) * (-E / (Scalar(2) * fd_step));
  ComplexMatrix<Scalar> omega = theta_dot * g.bands.vectors.adjoint();
  omega = ((omega - omega.adjoint()) / Scalar(2)).eval();
  g.omega_bar = g.bands.vectors.adjoint() * omega * g.bands.vectors;
  return g;
}

template <typename Scalar>
AdiabaticSample<Scalar> sample_from(const RotatedGenerator<Scalar>& g, Scalar E, Scalar t) {
  const auto& lambda = g.bands.energies;
  AdiabaticSample<Scalar> s;
  s.t = t;
  s.gap = lambda(1) - lambda(0);
  if (s.gap < Scalar(1e-10)) {
    std::ostringstream os;
    os << "ground state degenerate at t = " << t << " (gap " << s.gap << ")";
    throw DegeneratePointError(os.str());
  }
  // dH/dt is diagonal: -E (k + G l + A).
  const Scalar g_rec = reciprocal_vector(g.bands.a);
  Scalar sum_q2 = 0;
  for (int l = -g.bands.n; l <= g.bands.n; ++l) {
    const Scalar q = g.bands.k + g_rec * Scalar(l) + g.bands.shift;
    sum_q2 += q * q;
  }
  s.hdot_norm = std::abs(E) * std::sqrt(sum_q2);
  const Scalar trace_hbar = sum_q2 / Scalar(2);
  s.bound_rhs = std::abs(E) * std::sqrt(Scalar(2) * trace_hbar) / s.gap;

  const Eigen::Index dim = lambda.size();
  Scalar comm2 = 0;
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j)
      comm2 += std::norm(g.omega_bar(i, j) * (lambda(j) - lambda(i)));
  s.commutator_norm = std::sqrt(comm2);
  s.omega_bar_star = 0;
  for (Eigen::Index j = 1; j < dim; ++j) s.omega_bar_star = std::max(s.omega_bar_star, std::abs(g.omega_bar(0, j)));
  return s;
}

}  // namespace detail

/// Gap, ||dH/dt||, Omega_bar and the bound chain at one instant.
template <typename Scalar>
AdiabaticSample<Scalar> adiabatic_diagnostics(Scalar k, const FourierPotential<Scalar>& pot, int n, Scalar E,
                                              Scalar t, Scalar fd_step = Scalar(kDefaultFdStep)) {
  return detail::sample_from(detail::rotated_generator(k, pot, n, E, t, fd_step), E, t);
}

template <typename Scalar>
struct BasisRun {
  BasisState<Scalar> final_state;
  AdiabaticReport<Scalar> report;
  Scalar phase = 0;  ///< unwrapped arg <ground(T)|X(T)>
  Scalar max_norm_drift = 0;
};

/// Integrates i dX/dt = H(t) X with H(t) the central Hamiltonian at shift
/// A(t) = -E t. Each step applies exp(-i H(t + dt/2) dt) exactly. Diagnostics
/// are recorded every `stride` steps (and at t = 0 and t = T).
template <typename Scalar>
BasisRun<Scalar> integrate_basis(Scalar k, const FourierPotential<Scalar>& pot, int n, Scalar E, Scalar duration,
                                 Scalar dt, std::optional<ComplexVector<std::type_identity_t<Scalar>>> x0 = std::nullopt,
                                 long stride = 1, Scalar fd_step = Scalar(kDefaultFdStep)) {
  const auto grid = make_time_grid(duration, dt);
  auto ground0 = solve_bands(k, Scalar(0), pot, n);
  ComplexVector<Scalar> x = x0 ? *x0 : ComplexVector<Scalar>(ground0.vectors.col(0));
  if (x.size() != 2 * n + 1) throw InvalidInput("initial state has wrong dimension");
  if (std::abs(x.norm() - Scalar(1)) > Scalar(1e-10)) throw InvalidInput("initial state must be normalized");
  stride = std::max(stride, 1L);

  BasisRun<Scalar> run;
  std::complex<Scalar> prev_overlap = ground0.vectors.col(0).dot(x);
  Scalar phase = std::arg(prev_overlap);

  auto record = [&](long step) {
    const Scalar t = grid.dt * Scalar(step);
    const auto g = detail::rotated_generator(k, pot, n, E, t, fd_step);
    auto s = detail::sample_from(g, E, t);
    s.fidelity = std::norm(g.bands.vectors.col(0).dot(x));
    run.report.samples.push_back(s);
  };
  record(0);
  for (long i = 0; i < grid.steps; ++i) {
    const Scalar t_mid = grid.dt * (Scalar(i) + Scalar(0.5));
    const auto h = build_hamiltonian(k, -E * t_mid, pot, n);
    x = detail::hermitian_propagator(h.matrix(), grid.dt) * x;
    run.max_norm_drift = std::max(run.max_norm_drift, std::abs(x.norm() - Scalar(1)));

    const auto ground = solve_bands(k, -E * grid.dt * Scalar(i + 1), pot, n);
    const std::complex<Scalar> overlap = ground.vectors.col(0).dot(x);
    phase += std::arg(overlap * std::conj(prev_overlap));
    prev_overlap = overlap;
    if ((i + 1) % stride == 0 || i + 1 == grid.steps) record(i + 1);
  }
  run.final_state = {k, x, grid.dt * Scalar(grid.steps)};
  run.phase = phase;
  return run;
}

/// Integrates the rotated-frame equation
///   dY/dt = (-i Lambda - Theta^dag dTheta/dt) Y,   Y = Theta^dag X,
/// with exponential-midpoint steps. Used to cross-check integrate_basis.
template <typename Scalar>
ComplexVector<Scalar> integrate_adiabatic_frame(Scalar k, const FourierPotential<Scalar>& pot, int n, Scalar E,
                                                Scalar duration, Scalar dt, const ComplexVector<Scalar>& x0,
                                                Scalar fd_step = Scalar(kDefaultFdStep)) {
  const auto grid = make_time_grid(duration, dt);
  const auto start = solve_bands(k, Scalar(0), pot, n);
  ComplexVector<Scalar> y = start.vectors.adjoint() * x0;
  for (long i = 0; i < grid.steps; ++i) {
    const Scalar t_mid = grid.dt * (Scalar(i) + Scalar(0.5));
    const auto g = detail::rotated_generator(k, pot, n, E, t_mid, fd_step);
    // Generator G = -i Lambda - Omega_bar; i G is Hermitian.
    const std::complex<Scalar> I(0, 1);
    ComplexMatrix<Scalar> ig = g.bands.energies.template cast<std::complex<Scalar>>().asDiagonal();
    ig -= I * g.omega_bar;
    ig = ((ig + ig.adjoint()) / Scalar(2)).eval();
    y = detail::hermitian_propagator(ig, grid.dt) * y;
  }
  return y;
}

}  // namespace blochdyn
