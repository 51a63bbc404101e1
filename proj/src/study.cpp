#include "tcac/study.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

#include "tcac/errors.hpp"

namespace tcac {

namespace {

bool has_nonlinear_armor(const CableDesign& d) {
  for (const auto& l : d.armor_layers)
    if (l.wire_material.is_nonlinear()) return true;
  return false;
}

}  // namespace

CaseReport run_case(const CableDesign& design, const OperatingConditions& conditions, const CaseOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  const CellMesh cell = build_cell_mesh(design, options.mesh);
  CaseReport r;
  r.design = cell.design;
  r.cell_length = cell.mesh->length;
  r.cell_rotation = cell.mesh->rotation;
  r.num_edges = cell.mesh->num_edges();
  r.num_tets = cell.mesh->num_tets();

  const FieldSolution s = has_nonlinear_armor(cell.design)
                              ? solve_nonlinear(cell.mesh, cell.design, conditions, options.fem)
                              : solve(cell.mesh, cell.design, conditions, options.fem);
  const auto currents = conductor_currents(s);
  for (std::size_t k = 0; k < s.circuits.size(); ++k) {
    if (s.circuits[k].kind == Circuit::Kind::Phase) r.phase_currents.push_back(currents[k]);
    if (s.circuits[k].kind == Circuit::Kind::Sheath) r.sheath_currents.push_back(currents[k]);
  }
  for (const Complex& i : r.sheath_currents) r.sheath_current += std::abs(i) / static_cast<double>(r.sheath_currents.size());
  r.losses = region_losses(s);
  r.injected_power = injected_power(s);
  r.impedance = series_impedance(s);
  r.power_balance = std::abs(r.injected_power.real() - r.losses.total()) / std::abs(r.injected_power.real());
  r.periodic_residual = periodic_constraint_residual(s);
  r.circuit_residual = circuit_constraint_residual(s);
  r.iterations = s.iterations;
  r.converged = s.converged;
  r.stats = s.stats;

  for (double rad : options.probe_radii)
    r.probe_points.emplace_back(rad * std::cos(options.probe_angle), rad * std::sin(options.probe_angle), 0.0);
  if (!r.probe_points.empty()) r.probe = probe_b_field(s, r.probe_points);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

SweepParameter sweep_parameter_from_string(const std::string& s) {
  if (s == "core_lay") return SweepParameter::CoreLay;
  if (s == "armor_lay") return SweepParameter::ArmorLay;
  if (s == "armor_mu") return SweepParameter::ArmorMu;
  if (s == "armor_sigma") return SweepParameter::ArmorConductivity;
  if (s == "sheath_thickness") return SweepParameter::SheathThickness;
  if (s == "wire_diameter") return SweepParameter::WireDiameter;
  if (s == "frequency") return SweepParameter::Frequency;
  throw Error(ErrorKind::InvalidArgument,
              "unknown sweep parameter '" + s +
                  "' (core_lay, armor_lay, armor_mu, armor_sigma, sheath_thickness, wire_diameter, frequency)");
}

const char* to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::CoreLay: return "core_lay";
    case SweepParameter::ArmorLay: return "armor_lay";
    case SweepParameter::ArmorMu: return "armor_mu";
    case SweepParameter::ArmorConductivity: return "armor_sigma";
    case SweepParameter::SheathThickness: return "sheath_thickness";
    case SweepParameter::WireDiameter: return "wire_diameter";
    case SweepParameter::Frequency: return "frequency";
  }
  return "?";
}

CableDesign apply_parameter(const CableDesign& design, SweepParameter p, double v) {
  if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "sweep value is not finite");
  CableDesign d = design;
  const auto need_armor = [&] {
    if (!d.armored()) throw Error(ErrorKind::InvalidArgument, std::string(to_string(p)) + " needs an armored design");
  };
  switch (p) {
    case SweepParameter::CoreLay:
      d.core_lay_length = v;
      break;
    case SweepParameter::ArmorLay:
      need_armor();
      for (auto& l : d.armor_layers) l.lay_length = v;
      break;
    case SweepParameter::ArmorMu:
      need_armor();
      for (auto& l : d.armor_layers) {
        l.wire_material.curve.clear();
        l.wire_material.mu_r = Complex(v, 0.0);
      }
      break;
    case SweepParameter::ArmorConductivity:
      need_armor();
      for (auto& l : d.armor_layers) l.wire_material.conductivity = v;
      break;
    case SweepParameter::SheathThickness:
      d.sheath_thickness = v;
      break;
    case SweepParameter::WireDiameter: {
      need_armor();
      // Each layer keeps its bore and wire gap; outer layers move out with it.
      double grow = 0.0;
      for (auto& l : d.armor_layers) {
        const double bore = l.inner_radius() + grow;
        const double gap = 2.0 * kPi * l.wire_circle_radius() / l.wire_count - l.wire_diameter;
        const double rc = bore + 0.5 * v;
        int n = static_cast<int>(std::lround(2.0 * kPi * rc / (v + gap)));
        if (l.pattern == WirePattern::SteelPlusPE && n % 2) --n;
        grow += v - l.wire_diameter;
        l.wire_diameter = v;
        l.wire_count = n;
        l.outer_diameter = 2.0 * (bore + v);
      }
      break;
    }
    case SweepParameter::Frequency:
      break;
  }
  if (const auto issues = validate_design(d); !issues.empty())
    throw Error(ErrorKind::InvalidArgument, std::string(to_string(p)) + " = " + std::to_string(v) + ": " +
                                                issues.front().message);
  return d;
}

std::vector<SweepRow> run_sweep(const CableDesign& design, const OperatingConditions& conditions,
                                const CaseOptions& options, SweepParameter parameter,
                                const std::vector<double>& values, int workers) {
  std::vector<SweepRow> rows(values.size());
  const auto run_one = [&](std::size_t i) {
    SweepRow& row = rows[i];
    row.value = values[i];
    try {
      OperatingConditions c = conditions;
      if (parameter == SweepParameter::Frequency) {
        if (!(values[i] > 0)) throw Error(ErrorKind::InvalidArgument, "frequency must be > 0");
        c.frequency = values[i];
      }
      row.report = run_case(apply_parameter(design, parameter, values[i]), c, options);
      row.ok = true;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  };
  workers = std::max(1, std::min<int>(workers, static_cast<int>(values.size())));
  if (workers == 1) {
    for (std::size_t i = 0; i < values.size(); ++i) run_one(i);
    return rows;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < values.size(); i = next++) run_one(i);
    });
  for (auto& t : pool) t.join();
  return rows;
}

}  // namespace tcac
