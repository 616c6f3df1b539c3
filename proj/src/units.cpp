#include "blochdyn/units.hpp"

#include <cmath>
#include <string>

#include "blochdyn/errors.hpp"

namespace blochdyn {

namespace {

constexpr std::array<std::string_view, 7> kNames = {
    "length", "time", "energy", "electric_field", "magnetic_field", "wavevector", "velocity"};

}  // namespace

Dimension parse_dimension(std::string_view tag) {
  for (std::size_t i = 0; i < kNames.size(); ++i)
    if (kNames[i] == tag) return kAllDimensions[i];
  throw InvalidInput("unknown dimension tag '" + std::string(tag) + "'");
}

std::string_view to_string(Dimension d) { return kNames[static_cast<std::size_t>(d)]; }

UnitSystem::UnitSystem(double a_ref_meters) : a_ref_(a_ref_meters) {
  if (!(a_ref_meters > 0.0) || !std::isfinite(a_ref_meters))
    throw InvalidInput("reference length must be positive and finite");
  const double a = a_ref_;
  const double hbar = si::hbar;
  const double m = si::electron_mass;
  const double e = si::elementary_charge;

  const double energy = hbar * hbar / (m * a * a);
  const double time = hbar / energy;
  scales_[static_cast<std::size_t>(Dimension::length)] = a;
  scales_[static_cast<std::size_t>(Dimension::time)] = time;
  scales_[static_cast<std::size_t>(Dimension::energy)] = energy;
  scales_[static_cast<std::size_t>(Dimension::electric_field)] = energy / (e * a);
  scales_[static_cast<std::size_t>(Dimension::magnetic_field)] = hbar / (e * a * a);
  scales_[static_cast<std::size_t>(Dimension::wavevector)] = 1.0 / a;
  scales_[static_cast<std::size_t>(Dimension::velocity)] = a / time;
}

double UnitSystem::scale(Dimension d) const {
  const auto i = static_cast<std::size_t>(d);
  if (i >= scales_.size()) throw InvalidInput("unknown dimension tag");
  return scales_[i];
}

}  // namespace blochdyn
