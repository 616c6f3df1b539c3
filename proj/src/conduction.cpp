#include "blochdyn/conduction.hpp"

#include <numbers>

#include "blochdyn/units.hpp"

namespace blochdyn {

double solenoid_shift(double turns_per_meter, double current_amperes, double area_m2, double radius_m) {
  if (turns_per_meter < 0 || current_amperes < 0 || !(area_m2 > 0) || !(radius_m > 0))
    throw InvalidInput("solenoid parameters must be positive");
  const double b = si::mu0 * turns_per_meter * current_amperes;
  const double a_loop = b * area_m2 / (2.0 * std::numbers::pi * radius_m);
  return si::elementary_charge * a_loop / si::hbar;
}

double fractional_displacement(double k0, double shift) {
  if (!(k0 > 0)) throw InvalidInput("reference wavevector must be positive");
  return shift / k0;
}

}  // namespace blochdyn
