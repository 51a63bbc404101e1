#include <doctest.h>

#include <cmath>

#include <Eigen/Geometry>

#include "tcac/cable_model.hpp"
#include "tcac/errors.hpp"

using namespace tcac;

namespace {

int count_code(const std::vector<Violation>& v, const std::string& code) {
  int n = 0;
  for (const auto& x : v) n += x.code == code;
  return n;
}

// Exhaustive search over wire-position shifts of both layers for the
// shortest length that maps every wire onto a wire of its own layer.
double brute_force_two_layer_length(const CableDesign& d) {
  const auto& a0 = d.armor_layers[0];
  const auto& a1 = d.armor_layers[1];
  const double rel0 = std::abs(1.0 / d.core_lay_length - 1.0 / a0.lay_length);
  const double rel1 = std::abs(1.0 / d.core_lay_length - 1.0 / a1.lay_length);
  double best = INFINITY;
  for (int m0 = 1; m0 <= a0.wire_count; ++m0) {
    const double len = m0 / (a0.wire_count * rel0);
    for (int m1 = 1; m1 <= a1.wire_count; ++m1) {
      // angular mismatch of layer 1 over len, in radians
      const double resid = 2.0 * kPi * std::abs(len * rel1 - static_cast<double>(m1) / a1.wire_count);
      if (resid < 1e-9) best = std::min(best, len);
    }
  }
  return best;
}

}  // namespace

TEST_CASE("crossing pitch") {
  CHECK(crossing_pitch(2.8, -3.5) == doctest::Approx(1.5555556).epsilon(1e-7));
  CHECK(crossing_pitch(2.8, 3.5) == doctest::Approx(14.0).epsilon(1e-12));
  CHECK_THROWS_AS(crossing_pitch(2.8, 2.8), Error);
  try {
    crossing_pitch(2.8, 2.8);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegeneratePeriodicity);
  }
  // symmetric, and the contralay form adds inverse pitches
  CHECK(crossing_pitch(3.5, 2.8) == doctest::Approx(crossing_pitch(2.8, 3.5)).epsilon(1e-14));
  CHECK(1.0 / crossing_pitch(2.8, -3.5) == doctest::Approx(1.0 / 2.8 + 1.0 / 3.5).epsilon(1e-14));
  CHECK(crossing_pitch(2.8, 2.81) > 700.0);
}

TEST_CASE("periodic cell of Cable 1") {
  const CableDesign c1 = reference_cable1();
  CHECK(validate_design(c1).empty());
  const PeriodicCell cell = periodic_cell(c1);
  CHECK(cell.length == doctest::Approx(0.0136452).epsilon(1e-6));
  CHECK(cell.length * 114 == doctest::Approx(crossing_pitch(2.8, -3.5)).epsilon(1e-14));
  // independent evaluation of 2 pi L / L_c with L = CP / N
  const double l_ref = 1.0 / (114.0 * (1.0 / 2.8 + 1.0 / 3.5));
  CHECK(cell.length == doctest::Approx(l_ref).epsilon(1e-12));
  CHECK(cell.rotation == doctest::Approx(2.0 * kPi * l_ref / 2.8).epsilon(1e-12));
  CHECK(rotation_angle(cell.length, 2.8) == doctest::Approx(cell.rotation).epsilon(1e-14));
  CHECK(rotation_angle(2.8, 2.8) == doctest::Approx(2.0 * kPi));
  CHECK(armor_mapping_residual(c1, cell) < 1e-9);
  CHECK(std::abs(cell.wire_shift[0]) == 1);

  CableDesign uni = c1;
  uni.armor_layers[0].lay_length = 3.5;
  CHECK(periodic_length(uni) == doctest::Approx(0.1228070).epsilon(1e-6));

  CableDesign equal = c1;
  equal.armor_layers[0].lay_length = 2.8;
  CHECK_THROWS_AS(periodic_length(equal), Error);
}

TEST_CASE("periodic cell of the double armor against brute force") {
  const CableDesign raw = reference_cable2();
  CHECK(validate_design(raw).empty());
  const CableDesign d = commensurate_design(raw);
  CHECK(d.armor_layers[0].lay_length == raw.armor_layers[0].lay_length);
  CHECK(d.core_lay_length == raw.core_lay_length);
  const double change = std::abs(d.armor_layers[1].lay_length / raw.armor_layers[1].lay_length - 1.0);
  CHECK(change <= 0.02);
  const PeriodicCell cell = periodic_cell(d);
  CHECK(cell.length == doctest::Approx(brute_force_two_layer_length(d)).epsilon(1e-9));
  CHECK(armor_mapping_residual(d, cell) < 1e-9);
  // already commensurate designs come back unchanged
  const CableDesign again = commensurate_design(d);
  CHECK(again.armor_layers[1].lay_length == d.armor_layers[1].lay_length);
}

TEST_CASE("design validation") {
  CHECK(validate_design(reference_cable1()).empty());
  CHECK(validate_design(reference_cable2()).empty());
  for (const char* l : {"StA", "St+PE", "StS", "StD", "unarmored"}) CHECK(validate_design(cable2_layout(l)).empty());

  CableDesign crowded = reference_cable1();
  crowded.armor_layers[0].wire_count = 200;
  CHECK(count_code(validate_design(crowded), "wire_overlap") == 1);

  CableDesign flat = reference_cable1();
  flat.core_lay_length = 0.0;
  CHECK(count_code(validate_design(flat), "core_lay_length") == 1);
}

TEST_CASE("helical paths") {
  const CableDesign c1 = reference_cable1();
  const HelixPath p0 = phase_centerline(c1, 0);
  CHECK(p0.axis_radius == doctest::Approx(c1.core_outer_diameter / std::sqrt(3.0)));
  const Eigen::Vector3d a = p0.point(0.0);
  CHECK(a.x() == doctest::Approx(p0.axis_radius));
  CHECK(a.y() == doctest::Approx(0.0));
  const Eigen::Vector3d b = p0.point(c1.core_lay_length);
  CHECK((b.head<2>() - a.head<2>()).norm() < 1e-12);

  const Eigen::Vector3d p1 = phase_centerline(c1, 1).point(0.0);
  const Eigen::Vector2d rot = Eigen::Rotation2Dd(2.0 * kPi / 3.0) * a.head<2>();
  CHECK((p1.head<2>() - rot).norm() < 1e-12);

  // derivative against a central difference
  const double z = 0.37, h = 1e-6;
  const Eigen::Vector3d fd = (p0.point(z + h) - p0.point(z - h)) / (2 * h);
  CHECK((fd - p0.derivative(z)).norm() < 1e-7);

  const HelixPath w0 = armor_wire_centerline(c1, 0, 0);
  CHECK(w0.axis_radius == doctest::Approx(0.5 * (214.6e-3 - 5.6e-3)));
  CHECK(w0.phase == doctest::Approx(0.0));
  const HelixPath w7 = armor_wire_centerline(c1, 0, 7);
  CHECK(w7.phase == doctest::Approx(2.0 * kPi * 7 / 114));
  // contralay wires turn the other way
  CHECK(w0.angle(0.1) < w0.angle(0.0));
  CHECK(p0.angle(0.1) > p0.angle(0.0));
}

TEST_CASE("permeability lookup") {
  const MaterialProps steel = MaterialProps::conductor(4e6, {300.0, 0.0});
  CHECK(permeability_at(steel, 0.0) == Complex(300.0, 0.0));
  CHECK(permeability_at(steel, 5e4) == Complex(300.0, 0.0));

  MaterialProps curve;
  curve.curve = {{10.0, {100.0, -10.0}}, {1000.0, {200.0, -40.0}}};
  CHECK(std::abs(permeability_at(curve, 10.0) - Complex(100.0, -10.0)) < 1e-12);
  CHECK(std::abs(permeability_at(curve, 1e6) - Complex(200.0, -40.0)) < 1e-12);
  CHECK(std::abs(permeability_at(curve, 1.0) - Complex(100.0, -10.0)) < 1e-12);
  // halfway in log10 H
  CHECK(std::abs(permeability_at(curve, 100.0) - Complex(150.0, -25.0)) < 1e-9);
}

TEST_CASE("balanced conditions") {
  const auto c = OperatingConditions::balanced(745.0, 50.0, Bonding::SinglePoint);
  Complex sum = 0.0;
  for (const auto& i : c.phase_currents) {
    CHECK(std::abs(i) == doctest::Approx(745.0));
    sum += i;
  }
  CHECK(std::abs(sum) < 1e-9);
  CHECK(bonding_from_string("SB") == Bonding::SolidBonding);
  CHECK(bonding_from_string("SP") == Bonding::SinglePoint);
}
