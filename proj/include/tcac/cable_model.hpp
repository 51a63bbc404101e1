#pragma once

// Parametric description of three-core armored cables and the helical
// geometry that goes with it. Everything here is SI: metres, S/m, A/m.

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace tcac {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kMu0 = 4.0e-7 * kPi;
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// One sample of a tabulated permeability curve. mu = mu' - j mu''.
struct PermeabilityPoint {
  double field_strength;  // A/m
  Complex mu_r;
};

struct MaterialProps {
  double conductivity = 0.0;              // S/m
  Complex mu_r{1.0, 0.0};                 // used when `curve` is empty
  std::vector<PermeabilityPoint> curve;   // strictly increasing in H

  bool is_nonlinear() const { return !curve.empty(); }

  static MaterialProps insulator() { return {}; }
  static MaterialProps conductor(double sigma, Complex mu = {1.0, 0.0}) {
    MaterialProps m;
    m.conductivity = sigma;
    m.mu_r = mu;
    return m;
  }
};

enum class WirePattern { AllSteel, SteelPlusPE, NonMagneticSteel };

const char* to_string(WirePattern p);
WirePattern wire_pattern_from_string(const std::string& s);

struct ArmorLayer {
  int wire_count = 0;
  double wire_diameter = 0.0;       // m
  double outer_diameter = 0.0;      // m, over the wires
  double lay_length = 0.0;          // m, signed: < 0 contralay, > 0 unilay
  WirePattern pattern = WirePattern::AllSteel;
  MaterialProps wire_material;

  double wire_circle_radius() const { return 0.5 * (outer_diameter - wire_diameter); }
  double inner_radius() const { return 0.5 * outer_diameter - wire_diameter; }
  double outer_radius() const { return 0.5 * outer_diameter; }
  /// Order of the rotational symmetry of the wire pattern.
  int symmetry_order() const {
    return pattern == WirePattern::SteelPlusPE ? wire_count / 2 : wire_count;
  }
  /// True if wire `index` is a steel (conducting) wire rather than a PE separator.
  bool is_steel(int index) const {
    return pattern != WirePattern::SteelPlusPE || index % 2 == 0;
  }
  MaterialProps material_of(int index) const {
    return is_steel(index) ? wire_material : MaterialProps::insulator();
  }
};

struct CableDesign {
  std::string name;
  double rated_voltage_kV = 0.0;
  double rated_current = 0.0;             // A
  double conductor_cross_section_mm2 = 0.0;
  double conductor_diameter = 0.0;        // m
  double sheath_outer_diameter = 0.0;     // m
  double sheath_thickness = 0.0;          // m
  double core_outer_diameter = 0.0;       // m
  double core_lay_length = 0.0;           // m, may be +inf for straight cores
  double jacket_thickness = 0.005;        // m, serving over the outermost layer
  double ambient_temperature = 20.0;      // degC, informational only
  std::vector<ArmorLayer> armor_layers;
  MaterialProps conductor_material;
  MaterialProps sheath_material;

  bool armored() const { return !armor_layers.empty(); }
  double trefoil_radius() const;
  double core_bundle_radius() const { return trefoil_radius() + 0.5 * core_outer_diameter; }
  double sheath_inner_radius() const { return 0.5 * sheath_outer_diameter - sheath_thickness; }
  /// Radius over everything (armor or core bundle) plus the jacket.
  double jacket_outer_radius() const;
};

struct HelixPath {
  double axis_radius = 0.0;
  double pitch = kInfinity;   // signed; infinite means a straight line
  double phase = 0.0;         // angle at z = 0

  bool straight() const { return !std::isfinite(pitch); }
  double angle(double z) const { return straight() ? phase : 2.0 * kPi * z / pitch + phase; }
  Eigen::Vector3d point(double z) const;
  /// d point / dz
  Eigen::Vector3d derivative(double z) const;
};

enum class Bonding { SinglePoint, SolidBonding };

const char* to_string(Bonding b);
Bonding bonding_from_string(const std::string& s);

struct OperatingConditions {
  double frequency = 50.0;
  std::array<Complex, 3> phase_currents{};
  Bonding bonding = Bonding::SolidBonding;

  double omega() const { return 2.0 * kPi * frequency; }

  /// Positive-sequence set a, b, c with the given RMS magnitude.
  static OperatingConditions balanced(double amps, double frequency = 50.0,
                                      Bonding bonding = Bonding::SolidBonding);
};

struct Violation {
  std::string code;
  std::string message;
};

std::vector<Violation> validate_design(const CableDesign& design);

/// Distance over which a core meets the same armor wire again.
double crossing_pitch(double core_lay, double armor_lay);

/// Periodic cell: length, rotation of the end face and the number of wire
/// positions each armor layer advances (relative to the cores) over the cell.
struct PeriodicCell {
  double length = 0.0;
  double rotation = 0.0;
  std::vector<int> wire_shift;
};

/// Shortest rotated-periodic cell for an armored design.
PeriodicCell periodic_cell(const CableDesign& design);
double periodic_length(const CableDesign& design);

double rotation_angle(double length, double core_lay);

/// Largest angular distance (rad) between an armor wire position rotated by
/// the cell and its nearest wire slot, over all layers.
double armor_mapping_residual(const CableDesign& design, const PeriodicCell& cell);

/// Returns a copy of the design whose outer armor lay lengths are nudged
/// (by at most `max_relative_change`) so that a short periodic cell exists.
/// The innermost layer and the cores are never modified; designs that
/// already have an exact cell are returned unchanged.
CableDesign commensurate_design(const CableDesign& design, double max_relative_change = 0.02,
                                int max_shift = 64);

/// Cell length used for designs without armor (any length is periodic).
double default_cell_length(const CableDesign& design);

HelixPath phase_centerline(const CableDesign& design, int phase_index);
HelixPath armor_wire_centerline(const CableDesign& design, int layer, int wire_index);

/// Complex relative permeability at field strength H (A/m). Tabulated
/// curves are interpolated linearly in log10(H) and clamped at the ends.
Complex permeability_at(const MaterialProps& material, double field_strength);

// Reference designs from the published data set.
CableDesign reference_cable1();
CableDesign reference_cable2();

/// Cable 2 armor variants: "StA", "St+PE", "StS", "StD", "unarmored".
CableDesign cable2_layout(const std::string& layout);
CableDesign without_armor(const CableDesign& design);

}  // namespace tcac
