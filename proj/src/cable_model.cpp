#include "tcac/cable_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tcac/errors.hpp"

namespace tcac {

namespace {

double inverse_lay(double lay) { return std::isfinite(lay) ? 1.0 / lay : 0.0; }

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

const char* to_string(WirePattern p) {
  switch (p) {
    case WirePattern::AllSteel: return "AllSteel";
    case WirePattern::SteelPlusPE: return "SteelPlusPE";
    case WirePattern::NonMagneticSteel: return "NonMagneticSteel";
  }
  return "AllSteel";
}

WirePattern wire_pattern_from_string(const std::string& s) {
  if (s == "AllSteel") return WirePattern::AllSteel;
  if (s == "SteelPlusPE") return WirePattern::SteelPlusPE;
  if (s == "NonMagneticSteel") return WirePattern::NonMagneticSteel;
  throw Error(ErrorKind::ParseError, "unknown wire pattern '" + s + "'");
}

const char* to_string(Bonding b) { return b == Bonding::SinglePoint ? "SP" : "SB"; }

Bonding bonding_from_string(const std::string& s) {
  if (s == "SP" || s == "SinglePoint") return Bonding::SinglePoint;
  if (s == "SB" || s == "SolidBonding") return Bonding::SolidBonding;
  throw Error(ErrorKind::InvalidArgument, "unknown bonding '" + s + "' (expected SP or SB)");
}

double CableDesign::trefoil_radius() const { return core_outer_diameter / std::sqrt(3.0); }

double CableDesign::jacket_outer_radius() const {
  double r = core_bundle_radius();
  for (const auto& layer : armor_layers) r = std::max(r, layer.outer_radius());
  return r + jacket_thickness;
}

Eigen::Vector3d HelixPath::point(double z) const {
  const double a = angle(z);
  return {axis_radius * std::cos(a), axis_radius * std::sin(a), z};
}

Eigen::Vector3d HelixPath::derivative(double z) const {
  if (straight()) return {0.0, 0.0, 1.0};
  const double k = 2.0 * kPi / pitch;
  const double a = angle(z);
  return {-axis_radius * k * std::sin(a), axis_radius * k * std::cos(a), 1.0};
}

OperatingConditions OperatingConditions::balanced(double amps, double frequency, Bonding bonding) {
  OperatingConditions c;
  c.frequency = frequency;
  c.bonding = bonding;
  for (int k = 0; k < 3; ++k) c.phase_currents[k] = std::polar(amps, -2.0 * kPi * k / 3.0);
  return c;
}

std::vector<Violation> validate_design(const CableDesign& d) {
  std::vector<Violation> out;
  auto add = [&](const std::string& code, const std::string& msg) { out.push_back({code, msg}); };

  const bool dims_ok = d.conductor_diameter > 0 && d.sheath_outer_diameter > 0 &&
                       d.sheath_thickness > 0 && d.core_outer_diameter > 0 && d.jacket_thickness >= 0;
  if (!dims_ok) add("positive_dimensions", "all core diameters and thicknesses must be > 0");
  if (!(d.core_lay_length > 0)) add("core_lay_length", "core lay length must be > 0, got " + fmt(d.core_lay_length));

  if (dims_ok) {
    if (!(d.conductor_diameter < d.sheath_outer_diameter - 2.0 * d.sheath_thickness))
      add("conductor_in_sheath", "conductor diameter must be below the sheath inner diameter");
    if (!(d.sheath_outer_diameter <= d.core_outer_diameter))
      add("sheath_in_core", "sheath outer diameter exceeds the core outer diameter");
  }

  if (d.armor_layers.size() > 2) add("armor_layer_count", "at most two armor layers are supported");

  for (std::size_t k = 0; k < d.armor_layers.size(); ++k) {
    const auto& a = d.armor_layers[k];
    const std::string id = "layer " + std::to_string(k) + ": ";
    if (a.wire_count <= 0 || !(a.wire_diameter > 0) || !(a.outer_diameter > 2.0 * a.wire_diameter)) {
      add("armor_dimensions", id + "wire count, wire diameter and layer diameter must be positive");
      continue;
    }
    if (a.wire_count * a.wire_diameter > kPi * (a.outer_diameter - a.wire_diameter))
      add("wire_overlap", id + std::to_string(a.wire_count) + " wires of " + fmt(a.wire_diameter * 1e3) +
                              " mm do not fit on the layer circle");
    if (!(std::abs(a.lay_length) > 0) || !std::isfinite(a.lay_length))
      add("armor_lay_length", id + "lay length must be finite and non-zero");
    else if (d.core_lay_length > 0 && std::abs(inverse_lay(a.lay_length) - inverse_lay(d.core_lay_length)) <
                                          1e-12 * std::abs(inverse_lay(a.lay_length)))
      add("degenerate_unilay", id + "unilay armor with the core lay length has no relative twist");
    if (a.pattern == WirePattern::SteelPlusPE && a.wire_count % 2 != 0)
      add("pattern_parity", id + "alternating steel/PE layers need an even wire count");
    if (a.wire_material.conductivity < 0) add("material", id + "negative wire conductivity");
    if (k == 0 && dims_ok && d.core_bundle_radius() > a.inner_radius())
      add("trefoil_fit", "cores (bundle radius " + fmt(d.core_bundle_radius() * 1e3) +
                             " mm) do not fit inside the armor (inner radius " + fmt(a.inner_radius() * 1e3) + " mm)");
    if (k > 0 && a.inner_radius() < d.armor_layers[k - 1].outer_radius())
      add("layer_overlap", id + "overlaps the layer beneath it");
  }

  auto check_material = [&](const MaterialProps& m, const std::string& what) {
    if (m.conductivity < 0) add("material", what + " conductivity must be >= 0");
    if (m.is_nonlinear()) {
      if (m.curve.size() < 2) add("material", what + " permeability curve needs at least 2 points");
      for (std::size_t i = 1; i < m.curve.size(); ++i)
        if (!(m.curve[i].field_strength > m.curve[i - 1].field_strength)) {
          add("material", what + " permeability curve must be strictly increasing in H");
          break;
        }
    } else if (m.mu_r.real() < 1.0) {
      add("material", what + " relative permeability real part must be >= 1");
    }
  };
  check_material(d.conductor_material, "conductor");
  check_material(d.sheath_material, "sheath");
  for (std::size_t k = 0; k < d.armor_layers.size(); ++k)
    check_material(d.armor_layers[k].wire_material, "armor layer " + std::to_string(k));
  return out;
}

double crossing_pitch(double core_lay, double armor_lay) {
  if (!(core_lay > 0) || armor_lay == 0.0)
    throw Error(ErrorKind::InvalidArgument, "crossing pitch needs L_c > 0 and L_a != 0");
  const double delta = std::abs(inverse_lay(core_lay) - inverse_lay(armor_lay));
  if (delta <= 1e-14 * std::max(std::abs(inverse_lay(core_lay)), std::abs(inverse_lay(armor_lay))))
    throw Error(ErrorKind::DegeneratePeriodicity, "core and armor have the same lay (no relative twist)");
  return 1.0 / delta;
}

double rotation_angle(double length, double core_lay) {
  if (!(length > 0) || !(core_lay > 0))
    throw Error(ErrorKind::InvalidArgument, "rotation angle needs L > 0 and L_c > 0");
  return 2.0 * kPi * length * inverse_lay(core_lay);
}

PeriodicCell periodic_cell(const CableDesign& d) {
  if (d.armor_layers.empty())
    throw Error(ErrorKind::InvalidArgument, "periodic length is defined by the armor; design has none");
  const double inv_c = inverse_lay(d.core_lay_length);

  // Cell length that advances layer k by m wire-pattern positions.
  auto length_for = [&](const ArmorLayer& a, int m) {
    return m * crossing_pitch(d.core_lay_length, a.lay_length) / a.symmetry_order();
  };

  PeriodicCell cell;
  if (d.armor_layers.size() == 1) {
    cell.length = length_for(d.armor_layers[0], 1);
  } else {
    const auto& a0 = d.armor_layers[0];
    const auto& a1 = d.armor_layers[1];
    const double base1 = length_for(a1, 1);
    bool found = false;
    for (int m0 = 1; m0 <= a0.symmetry_order() && !found; ++m0) {
      const double len = length_for(a0, m0);
      const long m1 = std::lround(len / base1);
      if (m1 < 1 || m1 > a1.symmetry_order()) continue;
      if (std::abs(m1 * base1 - len) <= 1e-9 * len) {
        cell.length = len;
        found = true;
      }
    }
    if (!found)
      throw Error(ErrorKind::NoPeriodicLength,
                  "no common rotated-periodic cell with at most one full pattern shift per layer; "
                  "consider commensurate_design()");
  }
  cell.rotation = 2.0 * kPi * cell.length * inv_c;
  for (const auto& a : d.armor_layers) {
    const double shift = cell.length * (inverse_lay(a.lay_length) - inv_c) * a.wire_count;
    cell.wire_shift.push_back(static_cast<int>(std::lround(shift)));
  }
  return cell;
}

double periodic_length(const CableDesign& d) { return periodic_cell(d).length; }

double armor_mapping_residual(const CableDesign& d, const PeriodicCell& cell) {
  double worst = 0.0;
  for (const auto& a : d.armor_layers) {
    const double slot = 2.0 * kPi / a.symmetry_order();
    // Rotation of the wires relative to the rotated end face.
    const double rel = cell.rotation - 2.0 * kPi * cell.length * inverse_lay(a.lay_length);
    const double r = std::remainder(rel, slot);
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

CableDesign commensurate_design(const CableDesign& d, double max_relative_change, int max_shift) {
  try {
    periodic_cell(d);
    return d;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NoPeriodicLength) throw;
  }
  const double inv_c = inverse_lay(d.core_lay_length);
  const auto& a0 = d.armor_layers[0];
  const double len0 = crossing_pitch(d.core_lay_length, a0.lay_length) / a0.symmetry_order();
  for (int m0 = 1; m0 <= max_shift; ++m0) {
    const double len = m0 * len0;
    CableDesign out = d;
    bool ok = true;
    for (std::size_t k = 1; k < d.armor_layers.size() && ok; ++k) {
      auto& a = out.armor_layers[k];
      const double n = a.symmetry_order();
      const double rel = inv_c - inverse_lay(a.lay_length);  // signed relative twist
      const long m = std::lround(len * n * std::abs(rel));
      if (m < 1) { ok = false; break; }
      const double new_rel = std::copysign(m / (n * len), rel);
      const double new_inv = inv_c - new_rel;
      if (new_inv == 0.0 || std::signbit(new_inv) != std::signbit(inverse_lay(a.lay_length))) { ok = false; break; }
      const double new_lay = 1.0 / new_inv;
      if (std::abs(new_lay - a.lay_length) > max_relative_change * std::abs(a.lay_length)) { ok = false; break; }
      a.lay_length = new_lay;
    }
    if (!ok) continue;
    try {
      periodic_cell(out);
      return out;
    } catch (const Error&) {
    }
  }
  throw Error(ErrorKind::NoPeriodicLength, "no commensurate adjustment within " +
                                               fmt(max_relative_change * 100) + "% of the lay lengths");
}

double default_cell_length(const CableDesign& d) {
  if (!std::isfinite(d.core_lay_length)) return 0.02;
  return std::min(d.core_lay_length / 200.0, 0.05);
}

HelixPath phase_centerline(const CableDesign& d, int phase_index) {
  if (phase_index < 0 || phase_index > 2) throw Error(ErrorKind::InvalidArgument, "phase index must be 0..2");
  return {d.trefoil_radius(), d.core_lay_length, 2.0 * kPi * phase_index / 3.0};
}

HelixPath armor_wire_centerline(const CableDesign& d, int layer, int wire_index) {
  if (layer < 0 || layer >= static_cast<int>(d.armor_layers.size()))
    throw Error(ErrorKind::InvalidArgument, "no armor layer " + std::to_string(layer));
  const auto& a = d.armor_layers[layer];
  if (wire_index < 0 || wire_index >= a.wire_count)
    throw Error(ErrorKind::InvalidArgument, "wire index out of range");
  return {a.wire_circle_radius(), a.lay_length, 2.0 * kPi * wire_index / a.wire_count};
}

Complex permeability_at(const MaterialProps& m, double h) {
  if (h < 0) throw Error(ErrorKind::InvalidArgument, "field strength must be >= 0");
  if (!m.is_nonlinear()) return m.mu_r;
  const auto& c = m.curve;
  if (h <= c.front().field_strength) return c.front().mu_r;
  if (h >= c.back().field_strength) return c.back().mu_r;
  auto it = std::upper_bound(c.begin(), c.end(), h,
                             [](double v, const PermeabilityPoint& p) { return v < p.field_strength; });
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double t = (std::log10(h) - std::log10(lo.field_strength)) /
                   (std::log10(hi.field_strength) - std::log10(lo.field_strength));
  return lo.mu_r + t * (hi.mu_r - lo.mu_r);
}

CableDesign reference_cable1() {
  CableDesign d;
  d.name = "cable1";
  d.rated_voltage_kV = 132;
  d.rated_current = 732;
  d.conductor_cross_section_mm2 = 800;
  d.conductor_diameter = 35e-3;
  d.sheath_outer_diameter = 87.6e-3;
  d.sheath_thickness = 3.7e-3;
  d.core_outer_diameter = 92.4e-3;
  d.core_lay_length = 2.8;
  d.ambient_temperature = 5;
  d.conductor_material = MaterialProps::conductor(51e6);
  d.sheath_material = MaterialProps::conductor(4.5e6);
  ArmorLayer a;
  a.wire_count = 114;
  a.wire_diameter = 5.6e-3;
  a.outer_diameter = 214.6e-3;
  a.lay_length = -3.5;
  a.pattern = WirePattern::AllSteel;
  a.wire_material = MaterialProps::conductor(5.2e6, {300.0, 0.0});
  d.armor_layers.push_back(a);
  return d;
}

CableDesign reference_cable2() {
  CableDesign d;
  d.name = "cable2";
  d.rated_voltage_kV = 220;
  d.rated_current = 655;
  d.conductor_cross_section_mm2 = 500;
  d.conductor_diameter = 26.2e-3;
  d.sheath_outer_diameter = 83.4e-3;
  d.sheath_thickness = 2.9e-3;
  d.core_outer_diameter = 89.2e-3;
  d.core_lay_length = 3.5;
  d.ambient_temperature = 20;
  d.conductor_material = MaterialProps::conductor(59e6);
  d.sheath_material = MaterialProps::conductor(4.5e6);
  ArmorLayer inner;
  inner.wire_count = 110;
  inner.wire_diameter = 5.6e-3;
  inner.outer_diameter = 211e-3;
  inner.lay_length = -3.0;
  inner.wire_material = MaterialProps::conductor(4.03e6, {300.0, 0.0});
  ArmorLayer outer = inner;
  outer.wire_count = 119;
  outer.outer_diameter = 228e-3;
  outer.lay_length = 2.3;
  d.armor_layers = {inner, outer};
  return d;
}

CableDesign without_armor(const CableDesign& design) {
  CableDesign d = design;
  d.armor_layers.clear();
  d.name = design.name + "-unarmored";
  return d;
}

CableDesign cable2_layout(const std::string& layout) {
  CableDesign d = reference_cable2();
  if (layout == "StD") {
    d.name = "cable2-StD";
    return d;
  }
  if (layout == "unarmored") return without_armor(d);
  d.armor_layers.resize(1);
  auto& a = d.armor_layers[0];
  if (layout == "StS") {
    a.pattern = WirePattern::AllSteel;
  } else if (layout == "St+PE") {
    a.pattern = WirePattern::SteelPlusPE;
  } else if (layout == "StA") {
    a.pattern = WirePattern::NonMagneticSteel;
    a.wire_material.mu_r = {1.0, 0.0};
  } else {
    throw Error(ErrorKind::InvalidArgument, "unknown armor layout '" + layout + "'");
  }
  d.name = "cable2-" + layout;
  return d;
}

}  // namespace tcac
