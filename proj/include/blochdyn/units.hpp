#pragma once

#include <array>
#include <string_view>

namespace blochdyn {

namespace si {
inline constexpr double hbar = 1.054571817e-34;       // J s
inline constexpr double electron_mass = 9.1093837015e-31;  // kg
inline constexpr double elementary_charge = 1.602176634e-19;  // C
inline constexpr double mu0 = 1.25663706212e-6;       // N A^-2
inline constexpr double electron_volt = elementary_charge;  // J
inline constexpr double angstrom = 1e-10;             // m
}  // namespace si

enum class Dimension {
  length,
  time,
  energy,
  electric_field,
  magnetic_field,
  wavevector,
  velocity,
};

inline constexpr std::array<Dimension, 7> kAllDimensions = {
    Dimension::length,         Dimension::time,       Dimension::energy,
    Dimension::electric_field, Dimension::magnetic_field, Dimension::wavevector,
    Dimension::velocity};

/// Throws InvalidInput for anything outside the seven supported tags.
Dimension parse_dimension(std::string_view tag);
std::string_view to_string(Dimension d);

/// Natural units with hbar = m_e = e = 1 and the unit of length set to a
/// reference length (normally the lattice constant). Derived scales:
///   energy   hbar^2 / (m a^2)       time     m a^2 / hbar
///   velocity hbar / (m a)           E-field  hbar^2 / (e m a^3)
///   B-field  hbar / (e a^2)         wavevector 1 / a
class UnitSystem {
 public:
  explicit UnitSystem(double a_ref_meters = si::angstrom);

  double a_ref() const { return a_ref_; }

  /// SI value of one internal unit of the given dimension.
  double scale(Dimension d) const;

  double to_internal(double si_value, Dimension d) const { return si_value / scale(d); }
  double to_si(double internal_value, Dimension d) const { return internal_value * scale(d); }

  double energy_from_ev(double ev) const {
    return to_internal(ev * si::electron_volt, Dimension::energy);
  }
  double energy_to_ev(double internal) const {
    return to_si(internal, Dimension::energy) / si::electron_volt;
  }

 private:
  double a_ref_;
  std::array<double, 7> scales_;
};

}  // namespace blochdyn
