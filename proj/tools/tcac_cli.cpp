// Command line front end: validate, solve, sweep, fit, eval, sf, map.
// Exit codes: 0 success, 1 domain failure, 2 input or parse failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tcac/design_io.hpp"
#include "tcac/emission.hpp"
#include "tcac/errors.hpp"
#include "tcac/oracle.hpp"
#include "tcac/route_map.hpp"
#include "tcac/study.hpp"

using namespace tcac;
namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0, kDomain = 1, kInput = 2;

struct Globals {
  std::string cable;
  std::string out_dir = ".";
  std::string resolution = "coarse";
  int workers = 1;
};

struct RunSettings {
  double freq = 50.0;
  double amps = 0.0;  // 0: rated current
  std::string bonding = "SB";
};

int exit_code(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::ParseError:
    case ErrorKind::Io: return kInput;
    default: return kDomain;
  }
}

std::string out_path(const Globals& g, const std::string& name) {
  fs::create_directories(g.out_dir);
  return (fs::path(g.out_dir) / name).string();
}

CableDesign require_design(const Globals& g) {
  if (g.cable.empty()) throw Error(ErrorKind::ParseError, "no cable design given (-c/--cable)");
  return load_design(g.cable);
}

OperatingConditions conditions_for(const CableDesign& d, const RunSettings& s) {
  const double amps = s.amps > 0 ? s.amps : d.rated_current;
  if (!(amps > 0)) throw Error(ErrorKind::InvalidArgument, "no current given and the design has no rated current");
  if (!(s.freq > 0)) throw Error(ErrorKind::InvalidArgument, "frequency must be > 0");
  return OperatingConditions::balanced(amps, s.freq, bonding_from_string(s.bonding));
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

nlohmann::json complex_json(Complex c) { return {{"abs", std::abs(c)}, {"re", c.real()}, {"im", c.imag()}}; }

bool magnetic(const CableDesign& d) {
  for (const auto& l : d.armor_layers)
    if (l.wire_material.is_nonlinear() || std::abs(l.wire_material.mu_r - Complex(1.0, 0.0)) > 1e-12) return true;
  return false;
}

// ---- validate -------------------------------------------------------------------

int cmd_validate(const Globals& g) {
  const CableDesign d = require_design(g);
  const auto issues = validate_design(d);
  for (const auto& v : issues) std::cout << v.code << ": " << v.message << "\n";
  if (!issues.empty()) return kDomain;
  std::cout << d.name << ": valid";
  if (d.armored()) {
    const CableDesign c = commensurate_design(d);
    const PeriodicCell cell = periodic_cell(c);
    std::cout << "; periodic cell " << fmt("%.7g", cell.length) << " m, rotation " << fmt("%.7g", cell.rotation)
              << " rad";
    for (std::size_t i = 0; i < c.armor_layers.size(); ++i)
      if (c.armor_layers[i].lay_length != d.armor_layers[i].lay_length)
        std::cout << "; layer " << i << " lay adjusted " << d.armor_layers[i].lay_length << " -> "
                  << fmt("%.7g", c.armor_layers[i].lay_length) << " m";
  }
  std::cout << "\n";
  return kOk;
}

// ---- solve ----------------------------------------------------------------------

void write_profile(const std::string& path, double amps, const std::vector<double>& radii, const ProbeResult& p) {
  MFProfileSet set;
  for (std::size_t i = 0; i < radii.size(); ++i) set.push_back({amps, radii[i], p.b_meter_uT[i]});
  save_profiles(set, path);
}

int cmd_solve(const Globals& g, const RunSettings& rs, const std::string& probe_line, double angle_deg, bool oracle,
              const std::string& mesh_out) {
  const CableDesign d = require_design(g);
  const OperatingConditions cond = conditions_for(d, rs);
  const std::vector<double> radii = parse_probe_line(probe_line);
  const double angle = angle_deg * kPi / 180.0;
  const double amps = std::abs(cond.phase_currents[0]);

  if (oracle) {
    if (magnetic(d)) throw Error(ErrorKind::InvalidArgument, "--oracle needs a non-magnetic design (armor mu_r = 1)");
    std::vector<Eigen::Vector3d> pts;
    for (double r : radii) pts.emplace_back(r * std::cos(angle), r * std::sin(angle), 0.0);
    const std::vector<Complex> currents(cond.phase_currents.begin(), cond.phase_currents.end());
    const ProbeResult p = cable_filament_field(d, currents, pts);
    write_probe_csv(out_path(g, "probe.csv"), pts, p);
    write_profile(out_path(g, "profile.csv"), amps, radii, p);
    std::cout << "oracle (core filaments only, no induced currents): " << pts.size() << " points\n";
    for (std::size_t i = 0; i < radii.size(); ++i)
      std::cout << "  r = " << fmt("%.4g", radii[i]) << " m  B = " << fmt("%.5g", p.b_meter_uT[i]) << " uT\n";
    return kOk;
  }

  CaseOptions opt;
  opt.mesh = MeshOptions::for_resolution(resolution_from_string(g.resolution));
  opt.probe_radii = radii;
  opt.probe_angle = angle;
  if (!mesh_out.empty()) export_mesh(*build_cell_mesh(d, opt.mesh).mesh, mesh_out);
  const CaseReport r = run_case(d, cond, opt);

  write_probe_csv(out_path(g, "probe.csv"), r.probe_points, r.probe);
  write_profile(out_path(g, "profile.csv"), amps, radii, r.probe);
  nlohmann::json j;
  j["design"] = r.design.name;
  j["resolution"] = g.resolution;
  j["frequency_Hz"] = cond.frequency;
  j["current_A"] = amps;
  j["bonding"] = to_string(cond.bonding);
  j["cell"] = {{"length_m", r.cell_length}, {"rotation_rad", r.cell_rotation}, {"edges", r.num_edges}, {"tets", r.num_tets}};
  for (const auto& c : r.phase_currents) j["phase_currents_A"].push_back(complex_json(c));
  for (const auto& c : r.sheath_currents) j["sheath_currents_A"].push_back(complex_json(c));
  j["sheath_current_A"] = r.sheath_current;
  j["losses_W_per_m"] = {{"conductors", r.losses.conductors},
                         {"sheaths", r.losses.sheaths},
                         {"armor", r.losses.armor},
                         {"gauge", r.losses.other}};
  j["R_mOhm_per_km"] = r.impedance.resistance;
  j["X_mOhm_per_km"] = r.impedance.reactance;
  j["power_balance"] = r.power_balance;
  j["periodic_residual"] = r.periodic_residual;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["seconds"] = r.seconds;
  std::ofstream(out_path(g, "solve.json")) << j.dump(2) << "\n";

  std::cout << r.design.name << " " << g.resolution << ", " << fmt("%.4g", amps) << " A " << to_string(cond.bonding)
            << " at " << cond.frequency << " Hz: cell " << fmt("%.6g", r.cell_length) << " m, " << r.num_edges
            << " edges, " << fmt("%.1f", r.seconds) << " s\n";
  std::cout << "  sheath current " << fmt("%.2f", r.sheath_current) << " A";
  for (const auto& c : r.sheath_currents) std::cout << " " << fmt("%.3g", std::abs(c));
  std::cout << "\n  losses W/m: conductors " << fmt("%.3f", r.losses.conductors) << ", sheaths "
            << fmt("%.3f", r.losses.sheaths) << ", armor " << fmt("%.3f", r.losses.armor) << "\n";
  std::cout << "  R " << fmt("%.3f", r.impedance.resistance) << " X " << fmt("%.3f", r.impedance.reactance)
            << " mOhm/km\n";
  if (!r.converged) std::cout << "  warning: permeability iteration did not converge\n";
  for (std::size_t i = 0; i < radii.size(); ++i)
    std::cout << "  r = " << fmt("%.4g", radii[i]) << " m  B = " << fmt("%.5g", r.probe.b_meter_uT[i]) << " uT\n";
  return kOk;
}

// ---- sweep ----------------------------------------------------------------------

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorKind::ParseError, "bad number '" + item + "' in list '" + s + "'");
    }
  }
  if (out.empty()) throw Error(ErrorKind::ParseError, "empty value list");
  return out;
}

int cmd_sweep(const Globals& g, const RunSettings& rs, const std::string& param, const std::string& values,
              double probe_r) {
  const CableDesign d = require_design(g);
  const OperatingConditions cond = conditions_for(d, rs);
  const SweepParameter p = sweep_parameter_from_string(param);
  const std::vector<double> v = parse_list(values);
  CaseOptions opt;
  opt.mesh = MeshOptions::for_resolution(resolution_from_string(g.resolution));
  opt.probe_radii = {probe_r};
  const auto rows = run_sweep(d, cond, opt, p, v, g.workers);

  const std::string path = out_path(g, "sweep.csv");
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  out << "parameter,value,ok,B_uT,r_m,I_s_A,R_mOhm_km,X_mOhm_km,loss_conductors_W_m,loss_sheaths_W_m,loss_armor_W_m,"
         "error\n";
  out.precision(10);
  int ok = 0;
  for (const auto& row : rows) {
    out << to_string(p) << ',' << row.value << ',' << (row.ok ? 1 : 0) << ',';
    if (row.ok) {
      ++ok;
      const auto& r = row.report;
      out << r.probe.b_meter_uT[0] << ',' << probe_r << ',' << r.sheath_current << ',' << r.impedance.resistance << ','
          << r.impedance.reactance << ',' << r.losses.conductors << ',' << r.losses.sheaths << ',' << r.losses.armor
          << ",\n";
      std::cout << to_string(p) << " = " << row.value << ": B(" << probe_r << ") = " << fmt("%.5g", r.probe.b_meter_uT[0])
                << " uT, I_s = " << fmt("%.2f", r.sheath_current) << " A, R = " << fmt("%.3f", r.impedance.resistance)
                << ", X = " << fmt("%.3f", r.impedance.reactance) << " mOhm/km\n";
    } else {
      std::string e = row.error;
      std::replace(e.begin(), e.end(), ',', ';');
      out << ",,,,,,,," << e << "\n";
      std::cout << to_string(p) << " = " << row.value << ": failed: " << row.error << "\n";
    }
  }
  std::cout << ok << "/" << rows.size() << " rows solved, table in " << path << "\n";
  return ok > 0 ? kOk : kDomain;
}

// ---- fit / eval -----------------------------------------------------------------

int cmd_fit(const Globals& g, const std::string& in, const std::string& label, std::string coeff_out) {
  const MFProfileSet set = load_profiles(in);
  FitOptions fo;
  fo.label = label;
  const FitResult r = fit_coefficients(set, fo);
  if (coeff_out.empty()) coeff_out = out_path(g, "fit.json");
  save_fit(r.fit, coeff_out);
  const std::string qpath = out_path(g, "fit_quality.csv");
  std::ofstream q(qpath);
  q << "I_A,r_m,B_ref_uT,B_fit_uT,eps_pct\n";
  q.precision(8);
  for (std::size_t i = 0; i < set.size(); ++i)
    q << set[i].current << ',' << set[i].r << ',' << set[i].b_uT << ',' << set[i].b_uT * (1.0 + r.quality.eps[i]) << ','
      << 100.0 * r.quality.eps[i] << "\n";
  std::cout << "fitted " << set.size() << " samples (" << r.currents.size() << " currents): R^2 = "
            << fmt("%.6f", r.quality.r_squared) << ", max |eps| = " << fmt("%.2f", 100.0 * r.quality.max_abs_eps)
            << " %\ncoefficients in " << coeff_out << ", per-point errors in " << qpath << "\n";
  return kOk;
}

int cmd_eval(const std::string& coeffs, double amps, const std::string& rlist, bool force) {
  const EmissionFit f = load_fit(coeffs);
  for (double r : parse_list(rlist)) {
    if (!f.validity.contains(amps, r) && !force)
      std::cerr << "warning: I = " << amps << " A, r = " << r << " m is outside the validity range of '" << f.label
                << "'; value is extrapolated\n";
    std::cout << "I = " << amps << " A  r = " << r << " m  B = " << fmt("%.6g", eval_fit(f, amps, r, true)) << " uT\n";
  }
  return kOk;
}

// ---- sf / map -------------------------------------------------------------------

int cmd_sf(const Globals& g, const std::string& base, const std::string& shielded) {
  const MFProfileSet sf = shielding_factor(load_profiles(base), load_profiles(shielded));
  const std::string path = out_path(g, "sf.csv");
  save_profiles(sf, path, "SF");
  for (const auto& s : sf)
    std::cout << "I = " << s.current << " A  r = " << fmt("%.4g", s.r) << " m  SF = " << fmt("%.4f", s.b_uT) << "\n";
  std::cout << "table in " << path << "\n";
  return kOk;
}

int cmd_map(const Globals& g, const std::string& route_file, const std::string& coeffs, double amps, double half_width,
            double pitch, double threshold) {
  RouteProfile route = load_route(route_file);
  route.model = load_fit(coeffs);
  if (amps > 0) route.current = amps;
  if (!(route.current > 0)) throw Error(ErrorKind::InvalidArgument, "no current: pass --amps or set current_A in the route");
  const EmissionMap m = map_route(route, half_width, pitch);
  const std::string path = out_path(g, "map.csv");
  export_map(m, path);

  if (!(threshold >= 0)) {
    // Default: 1.5 x the above-cable field at the median burial depth.
    std::vector<double> depths;
    for (const auto& v : route.vertices) depths.push_back(v.depth);
    std::nth_element(depths.begin(), depths.begin() + depths.size() / 2, depths.end());
    const double r = std::max(depths[depths.size() / 2], route.model.validity.r_min);
    threshold = 1.5 * eval_fit(route.model, route.current, r, true);
  }
  const auto spots = detect_hotspots(m, threshold);
  const std::string hpath = out_path(g, "hotspots.csv");
  std::ofstream h(hpath);
  h << "rank,peak_uT,easting,northing,chainage_begin_m,chainage_end_m,cells\n";
  h.precision(10);
  int clamped = 0;
  for (unsigned char f : m.flags) clamped += (f & kClampedToRMin) ? 1 : 0;
  std::cout << route.name << " with '" << route.model.label << "' at " << route.current << " A: " << m.nx << " x "
            << m.ny << " cells (" << clamped << " clamped to r_min), threshold " << fmt("%.4g", threshold) << " uT\n";
  for (std::size_t i = 0; i < spots.size(); ++i) {
    const auto& s = spots[i];
    h << i + 1 << ',' << s.peak_uT << ',' << s.peak_location.x() << ',' << s.peak_location.y() << ',' << s.chainage_begin
      << ',' << s.chainage_end << ',' << s.cells.size() << "\n";
    std::cout << "  hot spot " << i + 1 << ": peak " << fmt("%.4g", s.peak_uT) << " uT, chainage "
              << fmt("%.1f", s.chainage_begin) << "-" << fmt("%.1f", s.chainage_end) << " m\n";
  }
  std::cout << "map in " << path << ", hot spots in " << hpath << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Magnetic field toolkit for three-core armored cables"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("-c,--cable", g.cable, "cable design JSON (bundled names resolve via TCAC_DATA_DIR)");
  app.add_option("--out-dir", g.out_dir, "directory for output files");
  app.add_option("--resolution", g.resolution, "mesh resolution")->check(CLI::IsMember({"coarse", "medium", "fine"}));
  app.add_option("--workers", g.workers, "parallel sweep workers")->check(CLI::PositiveNumber);

  auto add_run = [](CLI::App* c, RunSettings& rs) {
    c->add_option("--freq", rs.freq, "frequency, Hz");
    c->add_option("--amps", rs.amps, "balanced phase current, A RMS (default: rated)");
    c->add_option("--bonding", rs.bonding, "sheath bonding")->check(CLI::IsMember({"SB", "SP"}));
  };

  auto* validate = app.add_subcommand("validate", "check a cable design");

  RunSettings solve_rs;
  std::string probe_line = "0.15:5:40log", mesh_out;
  double probe_angle = 0.0;
  bool use_oracle = false;
  auto* solve = app.add_subcommand("solve", "solve one operating point and probe B along a line");
  add_run(solve, solve_rs);
  solve->add_option("--probe-line", probe_line, "start:stop:count[log], m");
  solve->add_option("--probe-angle", probe_angle, "direction of the probe line, degrees");
  solve->add_flag("--oracle", use_oracle, "Biot-Savart filaments instead of FEM (non-magnetic designs)");
  solve->add_option("--export-mesh", mesh_out, "also write the cell mesh");

  RunSettings sweep_rs;
  std::string sweep_param, sweep_values;
  double sweep_r = 0.5;
  auto* sweep = app.add_subcommand("sweep", "solve once per parameter value");
  add_run(sweep, sweep_rs);
  sweep->add_option("--param", sweep_param, "core_lay, armor_lay, armor_mu, armor_sigma, sheath_thickness, "
                                            "wire_diameter or frequency (SI units)")->required();
  sweep->add_option("--values", sweep_values, "comma separated values")->required();
  sweep->add_option("--probe-r", sweep_r, "probe distance, m");

  std::string fit_in, fit_label = "fitted", fit_out;
  auto* fit = app.add_subcommand("fit", "fit emission coefficients to profiles");
  fit->add_option("--in", fit_in, "profile CSV (I_A,r_m,B_uT)")->required();
  fit->add_option("--label", fit_label, "label stored with the coefficients");
  fit->add_option("--out", fit_out, "coefficient file (default out-dir/fit.json)");

  std::string eval_coeffs, eval_r;
  double eval_amps = 0.0;
  bool eval_force = false;
  auto* eval = app.add_subcommand("eval", "evaluate the emission model");
  eval->add_option("--coeffs", eval_coeffs, "coefficient JSON")->required();
  eval->add_option("--amps", eval_amps, "phase current, A")->required();
  eval->add_option("--r", eval_r, "distance(s), m, comma separated")->required();
  eval->add_flag("--force", eval_force, "silence the validity warning");

  std::string sf_base, sf_shielded;
  auto* sf = app.add_subcommand("sf", "shielding factor of two profile sets");
  sf->add_option("--base", sf_base, "reference profile CSV (e.g. unarmored)")->required();
  sf->add_option("--shielded", sf_shielded, "shielded profile CSV")->required();

  std::string map_route_file, map_coeffs;
  double map_amps = 0.0, map_half = 20.0, map_pitch = 1.0, map_threshold = -1.0;
  auto* map = app.add_subcommand("map", "seabed field map along a route");
  map->add_option("--route", map_route_file, "route JSON")->required();
  map->add_option("--coeffs", map_coeffs, "coefficient JSON")->required();
  map->add_option("--amps", map_amps, "phase current, A (default: route file)");
  map->add_option("--half-width", map_half, "corridor half width, m");
  map->add_option("--pitch", map_pitch, "grid pitch, m");
  map->add_option("--threshold", map_threshold, "hot spot threshold, uT (default: 1.5 x field at median depth)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInput;
  }

  try {
    if (*validate) return cmd_validate(g);
    if (*solve) return cmd_solve(g, solve_rs, probe_line, probe_angle, use_oracle, mesh_out);
    if (*sweep) return cmd_sweep(g, sweep_rs, sweep_param, sweep_values, sweep_r);
    if (*fit) return cmd_fit(g, fit_in, fit_label, fit_out);
    if (*eval) return cmd_eval(eval_coeffs, eval_amps, eval_r, eval_force);
    if (*sf) return cmd_sf(g, sf_base, sf_shielded);
    if (*map) return cmd_map(g, map_route_file, map_coeffs, map_amps, map_half, map_pitch, map_threshold);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e);
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDomain;
  }
  return kOk;
}
