#include "blochdyn/commands.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <map>
#include <numbers>

#include "blochdyn/central_equation.hpp"
#include "blochdyn/conduction.hpp"
#include "blochdyn/csv.hpp"
#include "blochdyn/errors.hpp"
#include "blochdyn/parallel.hpp"
#include "blochdyn/quantum.hpp"
#include "blochdyn/scenario.hpp"
#include "blochdyn/semiclassical.hpp"
#include "blochdyn/split_step.hpp"

namespace blochdyn {

namespace {

using Json = nlohmann::ordered_json;
using V3 = Vec3<double>;
constexpr double pi = std::numbers::pi;

struct Context {
  const CommandOptions& options;
  const Scenario& scenario;
  std::vector<std::string> files;

  std::filesystem::path path(const std::string& kind, const std::string& ext) const {
    return options.out_dir / (scenario.prefix + "_" + kind + "." + ext);
  }

  void write(const std::string& kind, const std::string& ext, const std::function<void(std::ostream&)>& body) {
    const auto p = path(kind, ext);
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + p.string() + " for writing");
    body(f);
    if (!f) throw std::runtime_error("failed writing " + p.string());
    files.push_back(p.filename().string());
  }
};

const FourierPotential<double>& need_potential(const Scenario& s) {
  if (!s.potential) throw ConfigError("this command needs a 'potential' block");
  return *s.potential;
}

const DynamicsSpec& need_dynamics(const Scenario& s) {
  if (!s.dynamics) throw ConfigError("this command needs a 'dynamics' block");
  return *s.dynamics;
}

Json vec_json(const V3& v) { return Json::array({v.x(), v.y(), v.z()}); }

Json run_bands(Context& ctx) {
  const auto& s = ctx.scenario;
  const auto& pot = need_potential(s);
  const auto& u = s.units;
  const double a = pot.lattice_constant();
  const int nk = s.bands.k_points, nb = s.bands.count;
  if (nb > 2 * s.truncation + 1) throw ConfigError("'bands.count' exceeds the number of plane waves");
  struct Row {
    double k, e, v, m;
  };
  std::vector<Row> rows(static_cast<std::size_t>(nk) * nb);
  parallel_for(static_cast<std::size_t>(nk), ctx.options.threads, [&](std::size_t i) {
    const double k = -pi / a + reciprocal_vector(a) * static_cast<double>(i) / (nk - 1);
    for (int b = 0; b < nb; ++b) {
      double m = 0;
      try {
        m = effective_mass(k, b, pot, s.truncation);
      } catch (const InfiniteMassError&) {
        m = std::numeric_limits<double>::infinity();
      }
      rows[i * nb + b] = {k, band_energy(k, b, pot, s.truncation), group_velocity(k, b, pot, s.truncation), m};
    }
  });
  ctx.write("bands", "csv", [&](std::ostream& out) {
    CsvWriter csv(out, {"k", "band", "energy_eV", "v_g_SI", "m_star_ratio"},
                  {"k in 1/m, v_g in m/s, m_star in units of the electron mass"});
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      csv.row({u.to_si(r.k, Dimension::wavevector), static_cast<double>(i % nb), u.energy_to_ev(r.e),
               u.to_si(r.v, Dimension::velocity), r.m});
    }
  });
  Json report;
  report["k_points"] = nk;
  report["bands"] = nb;
  if (nb >= 2) {
    const auto edge = solve_bands(pi / a, 0.0, pot, s.truncation);
    const double gap = edge.energies(1) - edge.energies(0);
    report["zone_edge_gap_eV"] = u.energy_to_ev(gap);
    report["zone_edge_gap_internal"] = gap;
    report["two_abs_V1_eV"] = u.energy_to_ev(2 * std::abs(pot.coefficient(1)));
  }
  return report;
}

Json run_wavepacket(Context& ctx) {
  const auto& s = ctx.scenario;
  const auto& d = need_dynamics(s);
  const V3 x0 = d.x0.value_or(V3::Zero());
  const bool periodic = s.potential && !s.potential->coefficients().empty();
  Json report;
  Trajectory<double> tr;
  if (periodic) {
    tr = evolve_periodic_E<double>(d.k0.x(), d.band, *s.potential, s.truncation, s.E.x(), d.duration, d.dt, x0.x());
  } else {
    tr = evolve_free_E<double>(d.k0, s.E, d.duration, d.dt, x0);
  }
  ctx.write("trajectory", "csv", [&](std::ostream& out) { write_trajectory_csv(out, tr, ctx.scenario.stride); });
  report["equation_tag"] = std::string(to_string(tr.tag));
  report["steps"] = tr.size() - 1;
  report["final_x_internal"] = vec_json(tr.x.back());
  report["final_k_internal"] = vec_json(tr.k.back());
  if (s.packet) {
    const auto& p = *s.packet;
    const auto psi = gaussian_packet(p.length, p.grid_points, p.center, d.k0.x(), p.sigma);
    std::function<double(double)> potential = [E = s.E.x()](double x) { return E * x; };
    if (periodic) potential = [E = s.E.x(), pot = *s.potential](double x) { return pot.evaluate(x) + E * x; };
    const auto r = split_step<double>(psi, potential, d.duration, d.dt, s.stride);
    ctx.write("centroid", "csv", [&](std::ostream& out) {
      CsvWriter csv(out, {"t", "x_mean", "k_mean", "x_sigma", "norm"});
      for (std::size_t i = 0; i < r.times.size(); ++i)
        csv.row({r.times[i], r.x_mean[i], r.k_mean[i], r.x_sigma[i], r.norm[i]});
    });
    ctx.write("snapshot", "csv", [&](std::ostream& out) { write_snapshot_csv(out, r.final_state); });
    double k_dev = 0;
    for (std::size_t i = 0; i < r.times.size(); ++i)
      k_dev = std::max(k_dev, std::abs(r.k_mean[i] - (d.k0.x() - s.E.x() * r.times[i])));
    report["packet_final_x_mean"] = r.x_mean.back();
    report["packet_final_k_mean"] = r.k_mean.back();
    report["max_k_deviation_from_free_closed_form"] = k_dev;
    report["norm_drift"] = std::abs(r.norm.back() - 1.0);
  }
  return report;
}

V3 magnetic_start(const Scenario& s, const DynamicsSpec& d) {
  if (s.B == 0) throw ConfigError("this command needs a nonzero 'field.B_<unit>'");
  return d.x0 ? *d.x0 : centered_start(d.k0, s.B);
}

Json run_cyclotron(Context& ctx) {
  const auto& s = ctx.scenario;
  const auto& d = need_dynamics(s);
  const auto tr = evolve_fundamental<double>(d.k0, magnetic_start(s, d), s.E, s.B, d.duration, d.dt);
  ctx.write("trajectory", "csv", [&](std::ostream& out) { write_trajectory_csv(out, tr, s.stride); });
  double r_min = std::numeric_limits<double>::infinity(), r_max = 0;
  for (const auto& x : tr.x) {
    const double r = std::hypot(x.x(), x.y());
    r_min = std::min(r_min, r);
    r_max = std::max(r_max, r);
  }
  Json report;
  report["omega_c_internal"] = s.B;
  report["period_internal"] = 2 * pi / std::abs(s.B);
  report["expected_radius_internal"] = d.k0.head<2>().norm() / std::abs(s.B);
  report["radius_min_internal"] = r_min;
  report["radius_max_internal"] = r_max;
  report["steps"] = tr.size() - 1;
  return report;
}

Json run_compare(Context& ctx) {
  const auto& s = ctx.scenario;
  const auto& d = need_dynamics(s);
  const auto r = compare_fundamental_lorentz<double>(d.k0, magnetic_start(s, d), s.E, s.B, d.duration, d.dt);
  ctx.write("fundamental", "csv", [&](std::ostream& out) { write_trajectory_csv(out, r.fundamental, s.stride); });
  ctx.write("lorentz", "csv", [&](std::ostream& out) { write_trajectory_csv(out, r.lorentz, s.stride); });
  Json report;
  report["E_internal"] = vec_json(s.E);
  report["B_internal"] = s.B;
  report["max_position_divergence_internal"] = r.max_position;
  report["max_velocity_divergence_internal"] = r.max_velocity;
  return report;
}

Json run_adiabatic(Context& ctx) {
  const auto& s = ctx.scenario;
  const auto& pot = need_potential(s);
  const auto& d = need_dynamics(s);
  const auto& u = s.units;
  const auto run = integrate_basis(d.k0.x(), pot, s.truncation, s.E.x(), d.duration, d.dt, std::nullopt, s.stride);
  ctx.write("adiabatic", "csv", [&](std::ostream& out) { write_adiabatic_csv(out, run.report, u); });
  double omega_max = 0, gap_min = std::numeric_limits<double>::infinity();
  for (const auto& smp : run.report.samples) {
    omega_max = std::max(omega_max, smp.omega_bar_star);
    gap_min = std::min(gap_min, smp.gap);
  }
  const auto& first = run.report.samples.front();
  Json report;
  report["E_internal"] = s.E.x();
  report["E_V_per_m"] = u.to_si(s.E.x(), Dimension::electric_field);
  report["steps"] = make_time_grid(d.duration, d.dt).steps;
  report["samples"] = run.report.samples.size();
  report["initial_gap_eV"] = u.energy_to_ev(first.gap);
  report["min_gap_eV"] = u.energy_to_ev(gap_min);
  report["initial_hbar_omega_bar_star_eV"] = u.energy_to_ev(first.omega_bar_star);
  report["max_hbar_omega_bar_star_eV"] = u.energy_to_ev(omega_max);
  report["final_fidelity"] = run.report.samples.back().fidelity;
  report["min_fidelity"] = run.report.min_fidelity();
  report["bound_chain_holds"] = run.report.chain_holds();
  report["max_norm_drift"] = run.max_norm_drift;
  return report;
}

Json run_conduction(Context& ctx) {
  const auto& s = ctx.scenario;
  const auto& pot = need_potential(s);
  if (!s.conduction) throw ConfigError("this command needs a 'conduction' block");
  const auto& c = *s.conduction;
  const auto& u = s.units;
  BandFilling<double> f;
  f.band = c.band;
  f.grid_points = c.k_points;
  f.fraction = c.fraction;
  f.shift = c.shift;
  const double v = velocity_sum(f, pot, s.truncation, ctx.options.threads);
  const auto kind = classify(f, pot, s.truncation, c.probe_shift, ctx.options.threads);
  Json report;
  report["band"] = c.band;
  report["k_points"] = c.k_points;
  report["fraction"] = c.fraction;
  report["occupied"] = f.occupied_count();
  report["shift_internal"] = c.shift;
  report["shift_per_m"] = u.to_si(c.shift, Dimension::wavevector);
  report["probe_shift_internal"] = c.probe_shift;
  report["net_velocity_internal"] = v;
  report["net_velocity_m_per_s"] = u.to_si(v, Dimension::velocity);
  report["classification"] = to_string(kind);
  return report;
}

Json run_solenoid(Context& ctx) {
  const auto& s = ctx.scenario;
  if (!s.solenoid) throw ConfigError("this command needs a 'field.solenoid' block");
  const auto& sol = *s.solenoid;
  const double shift = solenoid_shift(sol.turns_per_m, sol.current_A, sol.area_m2, sol.radius_m);
  const double a_si = s.units.to_si(s.potential ? s.potential->lattice_constant() : 1.0, Dimension::length);
  const double k0 = pi / (2 * a_si);
  Json report;
  report["turns_per_m"] = sol.turns_per_m;
  report["current_A"] = sol.current_A;
  report["area_m2"] = sol.area_m2;
  report["radius_m"] = sol.radius_m;
  report["B_T"] = si::mu0 * sol.turns_per_m * sol.current_A;
  report["eA_over_hbar_per_m"] = shift;
  report["half_filling_k0_per_m"] = k0;
  report["fractional_displacement"] = fractional_displacement(k0, shift);
  if (sol.reference_shift_per_m) {
    report["reference_eA_over_hbar_per_m"] = *sol.reference_shift_per_m;
    report["reference_fractional_displacement"] = fractional_displacement(k0, *sol.reference_shift_per_m);
    report["formula_over_reference"] = shift / *sol.reference_shift_per_m;
  }
  return report;
}

int run_validate(const CommandOptions& options, std::ostream& out) {
  AcceptanceOptions ao;
  ao.seed = options.seed;
  ao.threads = options.threads;
  const auto results = run_acceptance(ao, &out);
  int failed = 0;
  for (const auto& r : results) failed += r.passed ? 0 : 1;
  out << (failed ? "acceptance: " + std::to_string(failed) + " of " + std::to_string(results.size()) + " failed"
                 : "acceptance: all " + std::to_string(results.size()) + " criteria passed")
      << std::endl;
  return failed ? kExitAcceptance : kExitOk;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"bands",     "wavepacket", "cyclotron", "compare-eom",
                                                 "adiabatic", "conduction", "solenoid",  "validate"};
  return names;
}

int run_command(const CommandOptions& options, std::ostream& out, std::ostream& err) {
  try {
    if (options.threads < 1) throw InvalidInput("--threads must be at least 1");
    if (options.command == "validate") return run_validate(options, out);

    static const std::map<std::string, std::function<Json(Context&)>> table = {
        {"bands", run_bands},         {"wavepacket", run_wavepacket}, {"cyclotron", run_cyclotron},
        {"compare-eom", run_compare}, {"adiabatic", run_adiabatic},   {"conduction", run_conduction},
        {"solenoid", run_solenoid},
    };
    const auto it = table.find(options.command);
    if (it == table.end()) throw InvalidInput("unknown command '" + options.command + "'");
    if (!options.scenario) throw InvalidInput("'" + options.command + "' needs --scenario");

    const Scenario scenario = load_scenario(*options.scenario);
    std::filesystem::create_directories(options.out_dir);
    Context ctx{options, scenario, {}};
    Json report;
    report["command"] = options.command;
    report["scenario"] = scenario.name;
    report["a_ref_m"] = scenario.units.a_ref();
    report["result"] = it->second(ctx);
    ctx.files.push_back(ctx.path(options.command, "json").filename().string());
    report["files"] = ctx.files;
    const std::string text = report.dump(2) + "\n";
    ctx.write(options.command, "json", [&](std::ostream& f) { f << text; });
    out << text;
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error";
    if (e.line() > 0) err << " at line " << e.line() << ", column " << e.column();
    err << ": " << e.what() << std::endl;
    return kExitConfig;
  } catch (const InvalidInput& e) {
    err << "invalid input: " << e.what() << std::endl;
    return kExitConfig;
  } catch (const PhysicsError& e) {
    err << "physics error: " << e.what() << std::endl;
    return kExitPhysics;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << std::endl;
    return 1;
  }
}

}  // namespace blochdyn
