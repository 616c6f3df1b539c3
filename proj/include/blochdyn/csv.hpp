#pragma once

#include <initializer_list>
#include <ostream>
#include <string>
#include <vector>

#include "blochdyn/quantum.hpp"
#include "blochdyn/semiclassical.hpp"
#include "blochdyn/split_step.hpp"
#include "blochdyn/units.hpp"

namespace blochdyn {

/// Round-trip exact text for a double ("%.17g"); non-finite values print as
/// nan, inf, -inf.
std::string format_double(double value);

/// Comma-separated rows with a fixed header. Optional comment lines start
/// with '#' and precede the header.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::vector<std::string> columns, const std::vector<std::string>& comments = {});

  void row(std::initializer_list<double> values);
  void row(const std::vector<double>& values);

 private:
  std::ostream& out_;
  std::size_t width_;
};

/// Columns t, kx, ky, x, y, vx, vy, r in internal units, r = |(x, y)|. The
/// comment line names the equation tag and the run parameters.
void write_trajectory_csv(std::ostream& out, const Trajectory<double>& traj, long stride = 1);

/// Columns t, gap_eV, Hdot_norm, omega_bar_star, bound_rhs, fidelity. Only
/// the gap is converted; the rest stay internal.
void write_adiabatic_csv(std::ostream& out, const AdiabaticReport<double>& report, const UnitSystem& units);

/// Columns x, re_psi, im_psi.
void write_snapshot_csv(std::ostream& out, const GridState<double>& state);

}  // namespace blochdyn
