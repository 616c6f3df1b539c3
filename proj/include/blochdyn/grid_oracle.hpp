#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "blochdyn/central_equation.hpp"
#include "blochdyn/errors.hpp"
#include "blochdyn/potential.hpp"

namespace blochdyn {

/// Lowest eigenstates of the real-space Hamiltonian on a ring of M periods,
/// each labelled by its Bloch momentum from the translation-by-a eigenvalue.
template <typename Scalar>
struct GridSpectrum {
  Scalar length = 0;
  Scalar a = 1;
  RealVector<Scalar> energies;
  RealVector<Scalar> k;            ///< reduced-zone labels, (-pi/a, pi/a]
  ComplexMatrix<Scalar> states;    ///< columns on x_j = j L / N, unit norm in sum |psi|^2 dx
};

/// Diagonalizes -1/2 d^2/dx^2 + V(x) on N points over L = periods * a with
/// periodic boundaries. The kinetic term is the exact Fourier-space operator
/// (a dense circulant matrix), the potential is sampled pointwise. Returns the
/// lowest `count` states; a degenerate cluster straddling the cutoff is kept whole.
template <typename Scalar>
GridSpectrum<Scalar> grid_ground_state(const FourierPotential<Scalar>& pot, int periods, Eigen::Index points,
                                       Eigen::Index count) {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (points < 2 || (points & (points - 1)) != 0) throw InvalidInput("grid size must be a power of two");
  if (periods < 8) throw InvalidInput("grid oracle needs at least 8 periods");
  if (count < 1 || count > points) throw InvalidInput("state count out of range");

  const Scalar a = pot.lattice_constant();
  const Scalar length = a * Scalar(periods);
  const Scalar dx = length / Scalar(points);
  const Scalar dk = Scalar(2) * std::numbers::pi_v<Scalar> / length;
  const Eigen::Index n = points;

  // T(j, j') = c((j - j') mod N), c(d) = (1/N) sum_m k_m^2/2 cos(k_m d dx).
  RealVector<Scalar> c = RealVector<Scalar>::Zero(n);
  for (Eigen::Index d = 0; d < n; ++d) {
    Scalar sum = 0;
    for (Eigen::Index m = 0; m < n; ++m) {
      const Scalar km = dk * Scalar(m < n / 2 ? m : m - n);
      sum += km * km / Scalar(2) * std::cos(km * Scalar(d) * dx);
    }
    c(d) = sum / Scalar(n);
  }
  Matrix h(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) h(i, j) = c((i - j + n) % n);
  for (Eigen::Index i = 0; i < n; ++i) h(i, i) += pot.evaluate(dx * Scalar(i));

  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success) throw EigenSolverError("grid Hamiltonian diagonalization failed");
  const auto& evals = es.eigenvalues();
  const Scalar tol = Scalar(1e-9) * std::max(Scalar(1), evals.cwiseAbs().maxCoeff());

  Eigen::Index keep = count;
  while (keep < n && std::abs(evals(keep) - evals(keep - 1)) < tol) ++keep;

  GridSpectrum<Scalar> out;
  out.length = length;
  out.a = a;
  out.energies = evals.head(keep);
  out.k.resize(keep);
  out.states = es.eigenvectors().leftCols(keep).template cast<std::complex<Scalar>>() / std::sqrt(dx);

  // Translation by one lattice constant acts in Fourier space as exp(i k_m a).
  Eigen::FFT<Scalar> fft;
  ComplexVector<Scalar> shift_phase(n);
  for (Eigen::Index m = 0; m < n; ++m) {
    const Scalar km = dk * Scalar(m < n / 2 ? m : m - n);
    shift_phase(m) = std::polar(Scalar(1), km * a);
  }
  auto translate = [&](const ComplexVector<Scalar>& psi) {
    ComplexVector<Scalar> phi(n), out_psi(n);
    fft.fwd(phi, psi);
    phi = phi.cwiseProduct(shift_phase);
    fft.inv(out_psi, phi);
    return out_psi;
  };

  for (Eigen::Index start = 0; start < keep;) {
    Eigen::Index stop = start + 1;
    while (stop < keep && std::abs(evals(stop) - evals(stop - 1)) < tol) ++stop;
    const Eigen::Index size = stop - start;
    ComplexMatrix<Scalar> block = out.states.middleCols(start, size);
    ComplexMatrix<Scalar> moved(n, size);
    for (Eigen::Index c2 = 0; c2 < size; ++c2) moved.col(c2) = translate(block.col(c2));
    const ComplexMatrix<Scalar> t_sub = block.adjoint() * moved * dx;
    Eigen::ComplexEigenSolver<ComplexMatrix<Scalar>> ces(t_sub);
    for (Eigen::Index c2 = 0; c2 < size; ++c2) out.k(start + c2) = std::arg(ces.eigenvalues()(c2)) / a;
    out.states.middleCols(start, size) = block * ces.eigenvectors();
    start = stop;
  }
  return out;
}

}  // namespace blochdyn
