#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "blochdyn/central_equation.hpp"
#include "blochdyn/potential.hpp"
#include "blochdyn/semiclassical.hpp"
#include "blochdyn/units.hpp"

namespace blochdyn {

struct SolenoidSpec {
  double turns_per_m = 0;
  double current_A = 0;
  double area_m2 = 0;
  double radius_m = 0;
  std::optional<double> reference_shift_per_m;  ///< an externally quoted eA/hbar to set beside the formula
};

/// Everything below is stored in internal units unless the name says otherwise.
struct DynamicsSpec {
  Vec3<double> k0 = Vec3<double>::Zero();
  std::optional<Vec3<double>> x0;  ///< absent: origin, or the orbit centre for magnetic runs
  int band = 0;
  double duration = 0;
  double dt = 0;
};

struct PacketSpec {
  long grid_points = 0;
  double length = 0;
  double sigma = 0;
  double center = 0;
};

struct ConductionSpec {
  int band = 0;
  int k_points = 256;
  double fraction = 0.5;
  double shift = 0;
  double probe_shift = 0;
};

struct BandsSpec {
  int k_points = 101;
  int count = 3;
};

struct Scenario {
  std::string name;
  UnitSystem units;
  std::optional<FourierPotential<double>> potential;
  int truncation = kDefaultTruncation;
  Vec3<double> E = Vec3<double>::Zero();
  double B = 0;
  std::optional<SolenoidSpec> solenoid;
  std::optional<DynamicsSpec> dynamics;
  std::optional<PacketSpec> packet;
  std::optional<ConductionSpec> conduction;
  BandsSpec bands;
  std::string prefix;
  long stride = 1;
};

/// Parses a version-1 scenario document. Every physical quantity carries a
/// unit suffix (_internal or an SI-style suffix such as _eV, _V_per_m, _T,
/// _per_m, _zone, _fs); unknown or duplicate keys, wrong types and missing
/// required fields raise ConfigError with the line and column of the
/// offending text where it can be located.
Scenario parse_scenario(std::string_view text);

Scenario load_scenario(const std::filesystem::path& path);

}  // namespace blochdyn
