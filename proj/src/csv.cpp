#include "blochdyn/csv.hpp"

#include <cmath>
#include <cstdio>

#include "blochdyn/errors.hpp"

namespace blochdyn {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

CsvWriter::CsvWriter(std::ostream& out, std::vector<std::string> columns, const std::vector<std::string>& comments)
    : out_(out), width_(columns.size()) {
  for (const auto& c : comments) out_ << "# " << c << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << '\n';
}

void CsvWriter::row(std::initializer_list<double> values) { row(std::vector<double>(values)); }

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != width_) throw InvalidInput("CSV row width does not match the header");
  for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_double(values[i]);
  out_ << '\n';
}

void write_trajectory_csv(std::ostream& out, const Trajectory<double>& traj, long stride) {
  std::string meta = "equation_tag=" + std::string(to_string(traj.tag)) + " method=" + traj.meta.method +
                     " dt=" + format_double(traj.meta.dt);
  for (const auto& [key, value] : traj.meta.parameters) meta += " " + key + "=" + format_double(value);
  CsvWriter csv(out, {"t", "kx", "ky", "x", "y", "vx", "vy", "r"}, {meta});
  stride = std::max(stride, 1L);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (i % static_cast<std::size_t>(stride) != 0 && i + 1 != traj.size()) continue;
    const auto& k = traj.k[i];
    const auto& x = traj.x[i];
    const auto& v = traj.v[i];
    csv.row({traj.times[i], k.x(), k.y(), x.x(), x.y(), v.x(), v.y(), std::hypot(x.x(), x.y())});
  }
}

void write_adiabatic_csv(std::ostream& out, const AdiabaticReport<double>& report, const UnitSystem& units) {
  CsvWriter csv(out, {"t", "gap_eV", "Hdot_norm", "omega_bar_star", "bound_rhs", "fidelity"});
  for (const auto& s : report.samples)
    csv.row({s.t, units.energy_to_ev(s.gap), s.hdot_norm, s.omega_bar_star, s.bound_rhs, s.fidelity});
}

void write_snapshot_csv(std::ostream& out, const GridState<double>& state) {
  CsvWriter csv(out, {"x", "re_psi", "im_psi"});
  for (Eigen::Index j = 0; j < state.points(); ++j)
    csv.row({state.position(j), state.psi(j).real(), state.psi(j).imag()});
}

}  // namespace blochdyn
