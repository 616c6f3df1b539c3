#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <sstream>
#include <string>
#include <vector>

#include "blochdyn/errors.hpp"
#include "blochdyn/potential.hpp"
#include "blochdyn/zone.hpp"

namespace blochdyn {

template <typename Scalar>
using ComplexMatrix = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using ComplexVector = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;
template <typename Scalar>
using RealVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

inline constexpr int kDefaultTruncation = 10;

/// Truncated plane-wave Hamiltonian at crystal momentum k with a vector
/// potential shift A (both internal wavevectors). Row/column i holds the
/// plane wave l = i - n, l in [-n, n]:
///   H(l, l)  = (k + G l + A)^2 / 2 + V_0
///   H(l, l') = V_{l - l'}
template <typename Scalar>
class CentralHamiltonian {
 public:
  using Complex = std::complex<Scalar>;
  using Matrix = ComplexMatrix<Scalar>;

  CentralHamiltonian(Scalar k, Scalar shift, const FourierPotential<Scalar>& pot, int n)
      : k_(k), shift_(shift), a_(pot.lattice_constant()), n_(n) {
    if (n < 1) throw InvalidInput("truncation half-width n must be >= 1");
    if (!in_reduced_zone(k, a_))
      throw InvalidInput("k = " + std::to_string(k) + " lies outside the reduced zone; reduce it first");
    if (pot.cutoff() > n)
      throw InvalidInput("potential cutoff L = " + std::to_string(pot.cutoff()) +
                         " exceeds truncation n = " + std::to_string(n));
    const int dim = size();
    const Complex v0 = pot.coefficient(0);
    matrix_.resize(dim, dim);
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) matrix_(i, j) = i == j ? Complex(0) : pot.coefficient(i - j);
      const Scalar q = plane_wave(i - n_);
      matrix_(i, i) = Complex(q * q / Scalar(2)) + v0;
    }
  }

  Scalar k() const { return k_; }
  Scalar shift() const { return shift_; }
  Scalar lattice_constant() const { return a_; }
  int truncation() const { return n_; }
  int size() const { return 2 * n_ + 1; }
  const Matrix& matrix() const { return matrix_; }

  /// Wavevector k + G l + A carried by plane-wave index l.
  Scalar plane_wave(int l) const { return k_ + reciprocal_vector(a_) * Scalar(l) + shift_; }

 private:
  Scalar k_;
  Scalar shift_;
  Scalar a_;
  int n_;
  Matrix matrix_;
};

template <typename Scalar>
CentralHamiltonian<Scalar> build_hamiltonian(Scalar k, Scalar shift, const FourierPotential<Scalar>& pot,
                                             int n = kDefaultTruncation) {
  return CentralHamiltonian<Scalar>(k, shift, pot, n);
}

/// Eigenpairs of a CentralHamiltonian. Energies ascending; each eigenvector
/// column has its largest-magnitude component made real and positive.
template <typename Scalar>
struct BandSolution {
  Scalar k = 0;
  Scalar shift = 0;
  Scalar a = 1;
  int n = 0;
  RealVector<Scalar> energies;
  ComplexMatrix<Scalar> vectors;

  int bands() const { return static_cast<int>(energies.size()); }
  std::complex<Scalar> coefficient(int band, int l) const { return vectors(l + n, band); }
};

/// Rotates each column so its largest-|.| entry is real positive. The first
/// index attaining the maximum wins.
template <typename Derived>
void fix_phases(Eigen::MatrixBase<Derived>& vectors) {
  using Complex = typename Derived::Scalar;
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    Eigen::Index best = 0;
    vectors.col(c).cwiseAbs().maxCoeff(&best);
    const Complex pivot = vectors(best, c);
    const auto mag = std::abs(pivot);
    if (mag > 0) vectors.col(c) *= std::conj(pivot) / mag;
  }
}

template <typename Scalar>
BandSolution<Scalar> solve(const CentralHamiltonian<Scalar>& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix<Scalar>> es(h.matrix());
  if (es.info() != Eigen::Success) {
    std::ostringstream os;
    os << "Hermitian eigensolver failed to converge at k = " << h.k() << ", A = " << h.shift()
       << "; matrix:\n"
       << h.matrix();
    throw EigenSolverError(os.str());
  }
  BandSolution<Scalar> sol;
  sol.k = h.k();
  sol.shift = h.shift();
  sol.a = h.lattice_constant();
  sol.n = h.truncation();
  sol.energies = es.eigenvalues();
  sol.vectors = es.eigenvectors();
  fix_phases(sol.vectors);
  return sol;
}

template <typename Scalar>
BandSolution<Scalar> solve_bands(Scalar k, Scalar shift, const FourierPotential<Scalar>& pot,
                                 int n = kDefaultTruncation) {
  return solve(build_hamiltonian(k, shift, pot, n));
}

/// psi(x) = a^{-1/2} sum_l a_l exp(i (k + G l + A) x); unit norm over one cell.
template <typename Scalar>
std::complex<Scalar> bloch_psi(const BandSolution<Scalar>& sol, int band, Scalar x) {
  if (band < 0 || band >= sol.bands())
    throw InvalidInput("band index " + std::to_string(band) + " out of range");
  const Scalar g = reciprocal_vector(sol.a);
  std::complex<Scalar> sum(0);
  for (int l = -sol.n; l <= sol.n; ++l)
    sum += sol.coefficient(band, l) * std::polar(Scalar(1), (sol.k + g * Scalar(l) + sol.shift) * x);
  return sum / std::sqrt(sol.a);
}

namespace detail {

/// Rayleigh quotient v^dag H v. Its rounding error scales with the state's
/// own energy scale rather than with ||H||, which keeps finite differences of
/// band energies clean.
template <typename Scalar>
Scalar rayleigh_energy(const CentralHamiltonian<Scalar>& h, const ComplexVector<Scalar>& v) {
  return v.dot(h.matrix() * v).real();
}

/// Energy of the eigenvector at (k, shift) that best overlaps `reference`.
template <typename Scalar>
Scalar tracked_energy(const ComplexVector<Scalar>& reference, Scalar k, Scalar shift,
                      const FourierPotential<Scalar>& pot, int n) {
  const auto h = build_hamiltonian(k, shift, pot, n);
  const auto sol = solve(h);
  Eigen::Index best = 0;
  const Scalar overlap = (sol.vectors.adjoint() * reference).cwiseAbs2().maxCoeff(&best);
  if (overlap < Scalar(0.5)) {
    std::ostringstream os;
    os << "band tracking ambiguous near k = " << k << " (max overlap " << overlap << " < 0.5)";
    throw DegeneratePointError(os.str());
  }
  return rayleigh_energy(h, ComplexVector<Scalar>(sol.vectors.col(best)));
}

/// Energies (minus, centre, plus) of one band on a symmetric k-stencil of
/// half-width dk around k. The stencil is applied through the vector
/// potential so that it crosses zone edges without relabelling plane waves.
template <typename Scalar>
std::array<Scalar, 3> band_stencil(Scalar k, int band, const FourierPotential<Scalar>& pot, int n, Scalar shift,
                                   Scalar dk) {
  const Scalar a = pot.lattice_constant();
  const Scalar kr = reduce_to_zone(k, a);
  const auto h = build_hamiltonian(kr, shift, pot, n);
  const auto centre = solve(h);
  if (band < 0 || band >= centre.bands())
    throw InvalidInput("band index " + std::to_string(band) + " out of range");
  const ComplexVector<Scalar> ref = centre.vectors.col(band);
  return {tracked_energy(ref, kr, shift - dk, pot, n), rayleigh_energy(h, ref),
          tracked_energy(ref, kr, shift + dk, pot, n)};
}

}  // namespace detail

template <typename Scalar>
Scalar band_energy(Scalar k, int band, const FourierPotential<Scalar>& pot, int n = kDefaultTruncation,
                   Scalar shift = Scalar(0)) {
  const auto sol = solve_bands(reduce_to_zone(k, pot.lattice_constant()), shift, pot, n);
  if (band < 0 || band >= sol.bands())
    throw InvalidInput("band index " + std::to_string(band) + " out of range");
  return sol.energies(band);
}

/// d omega / dk by central difference, dk = 1e-5 G, band tracked by overlap.
template <typename Scalar>
Scalar group_velocity(Scalar k, int band, const FourierPotential<Scalar>& pot, int n = kDefaultTruncation,
                      Scalar shift = Scalar(0)) {
  const Scalar dk = Scalar(1e-5) * reciprocal_vector(pot.lattice_constant());
  const auto e = detail::band_stencil(k, band, pot, n, shift, dk);
  return (e[2] - e[0]) / (Scalar(2) * dk);
}

/// d^2 epsilon / dk^2 by second central difference, dk = 1e-4 G.
template <typename Scalar>
Scalar band_curvature(Scalar k, int band, const FourierPotential<Scalar>& pot, int n = kDefaultTruncation,
                      Scalar shift = Scalar(0)) {
  const Scalar dk = Scalar(1e-4) * reciprocal_vector(pot.lattice_constant());
  const auto e = detail::band_stencil(k, band, pot, n, shift, dk);
  return (e[2] - Scalar(2) * e[1] + e[0]) / (dk * dk);
}

/// m* / m_e = 1 / curvature. Throws InfiniteMassError at inflection points.
template <typename Scalar>
Scalar effective_mass(Scalar k, int band, const FourierPotential<Scalar>& pot, int n = kDefaultTruncation,
                      Scalar shift = Scalar(0)) {
  const Scalar c = band_curvature(k, band, pot, n, shift);
  if (std::abs(c) < Scalar(1e-12)) {
    std::ostringstream os;
    os << "band curvature vanishes at k = " << k << " (inflection point, infinite mass)";
    throw InfiniteMassError(os.str());
  }
  return Scalar(1) / c;
}

}  // namespace blochdyn
