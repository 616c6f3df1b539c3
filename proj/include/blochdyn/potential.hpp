#pragma once

#include <cmath>
#include <complex>
#include <cstdlib>
#include <map>
#include <numbers>
#include <random>
#include <span>
#include <string>

#include "blochdyn/errors.hpp"

namespace blochdyn {

/// Periodic 1D potential V(x) = sum_l V_l exp(i 2 pi l x / a), stored by its
/// Fourier coefficients. Hermitian (V_{-l} = conj V_l) so V(x) is real.
template <typename Scalar>
class FourierPotential {
 public:
  using Complex = std::complex<Scalar>;
  using CoefficientMap = std::map<int, Complex>;

  FourierPotential() = default;

  /// Validates Hermiticity; every stored l must have its partner -l.
  FourierPotential(Scalar a, CoefficientMap coeffs) : a_(a), coeffs_(std::move(coeffs)) {
    if (!(a_ > Scalar(0))) throw InvalidInput("lattice constant must be positive");
    for (const auto& [l, v] : coeffs_) {
      const auto partner = coeffs_.find(-l);
      const Complex expected = std::conj(v);
      const Complex got = partner == coeffs_.end() ? Complex(0) : partner->second;
      const Scalar tol = Scalar(1e-12) * std::max(Scalar(1), std::abs(v));
      if (std::abs(got - expected) > tol)
        throw InvalidInput("potential coefficients are not Hermitian at l = " + std::to_string(l) +
                           " (V_{-l} must equal conj(V_l))");
    }
    // Drop exact zeros so cutoff() reflects the harmonics actually present.
    std::erase_if(coeffs_, [](const auto& kv) { return kv.second == Complex(0); });
  }

  /// Builds a Hermitian set from V_0 and V_1..V_L; negative harmonics are conjugates.
  static FourierPotential from_harmonics(Scalar a, Scalar v0, std::span<const Complex> positive) {
    CoefficientMap m;
    if (v0 != Scalar(0)) m[0] = Complex(v0);
    for (std::size_t i = 0; i < positive.size(); ++i) {
      const int l = static_cast<int>(i) + 1;
      m[l] = positive[i];
      m[-l] = std::conj(positive[i]);
    }
    return FourierPotential(a, std::move(m));
  }

  Scalar lattice_constant() const { return a_; }
  Scalar reciprocal() const { return Scalar(2) * std::numbers::pi_v<Scalar> / a_; }
  const CoefficientMap& coefficients() const { return coeffs_; }

  Complex coefficient(int l) const {
    const auto it = coeffs_.find(l);
    return it == coeffs_.end() ? Complex(0) : it->second;
  }

  /// Largest |l| with a nonzero coefficient (0 for an empty or constant potential).
  int cutoff() const {
    int L = 0;
    for (const auto& [l, v] : coeffs_) L = std::max(L, std::abs(l));
    return L;
  }

  /// V_l = V_{-l} for all l, i.e. V(x) = V(-x).
  bool is_symmetric(Scalar tol = Scalar(1e-14)) const {
    for (const auto& [l, v] : coeffs_)
      if (std::abs(v - coefficient(-l)) > tol) return false;
    return true;
  }

  Complex evaluate_complex(Scalar x) const {
    Complex sum(0);
    const Scalar g = reciprocal();
    for (const auto& [l, v] : coeffs_) sum += v * std::polar(Scalar(1), g * Scalar(l) * x);
    return sum;
  }

  Scalar evaluate(Scalar x) const { return evaluate_complex(x).real(); }

  /// dV/dx.
  Scalar derivative(Scalar x) const {
    Complex sum(0);
    const Scalar g = reciprocal();
    for (const auto& [l, v] : coeffs_)
      sum += Complex(0, g * Scalar(l)) * v * std::polar(Scalar(1), g * Scalar(l) * x);
    return sum.real();
  }

 private:
  Scalar a_ = Scalar(1);
  CoefficientMap coeffs_;
};

/// V(x) = 2 amplitude cos(2 pi x / a): coefficients V_{+1} = V_{-1} = amplitude.
template <typename Scalar>
FourierPotential<Scalar> single_cosine(Scalar a, Scalar amplitude) {
  typename FourierPotential<Scalar>::CoefficientMap m;
  m[1] = amplitude;
  m[-1] = amplitude;
  return FourierPotential<Scalar>(a, std::move(m));
}

/// Random real symmetric potential; harmonics 1..L have a random sign and a
/// magnitude uniform in [min_amplitude, max_amplitude].
template <typename Scalar, typename Rng>
FourierPotential<Scalar> random_symmetric_potential(Scalar a, int L, Scalar max_amplitude, Rng& rng,
                                                    Scalar min_amplitude = Scalar(0)) {
  std::uniform_real_distribution<Scalar> dist(min_amplitude, max_amplitude);
  std::bernoulli_distribution sign;
  typename FourierPotential<Scalar>::CoefficientMap m;
  for (int l = 1; l <= L; ++l) {
    const Scalar v = sign(rng) ? dist(rng) : -dist(rng);
    m[l] = v;
    m[-l] = v;
  }
  return FourierPotential<Scalar>(a, std::move(m));
}

/// Random Hermitian potential (complex harmonics, generally not symmetric).
template <typename Scalar, typename Rng>
FourierPotential<Scalar> random_hermitian_potential(Scalar a, int L, Scalar max_amplitude, Rng& rng) {
  std::uniform_real_distribution<Scalar> dist(-max_amplitude, max_amplitude);
  typename FourierPotential<Scalar>::CoefficientMap m;
  m[0] = dist(rng);
  for (int l = 1; l <= L; ++l) {
    const std::complex<Scalar> v(dist(rng), dist(rng));
    m[l] = v;
    m[-l] = std::conj(v);
  }
  return FourierPotential<Scalar>(a, std::move(m));
}

}  // namespace blochdyn
