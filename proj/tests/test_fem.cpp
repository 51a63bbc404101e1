#include <doctest.h>

#include <cmath>

#include "tcac/errors.hpp"
#include "tcac/fem.hpp"
#include "tcac/oracle.hpp"
#include "tcac/study.hpp"

using namespace tcac;

namespace {

// Small domain to keep unit runs short.
MeshOptions small_mesh() {
  MeshOptions o = MeshOptions::for_resolution(Resolution::Coarse);
  o.medium_radius = 1.2;
  return o;
}

// Cores only: insulating sheaths and a weak conductor so the current spreads
// uniformly and the cores act like line currents outside.
CableDesign line_current_cable(double core_lay) {
  CableDesign d = without_armor(reference_cable1());
  d.core_lay_length = core_lay;
  d.sheath_material = MaterialProps::insulator();
  d.conductor_material.conductivity = 1e5;
  return d;
}

struct Solved {
  CellMesh cell;
  FieldSolution sol;
};

Solved solve_case(const CableDesign& d, const OperatingConditions& c, const MeshOptions& m = small_mesh()) {
  Solved s{build_cell_mesh(d, m), {}};
  s.sol = solve(s.cell.mesh, s.cell.design, c);
  return s;
}

}  // namespace

TEST_CASE("armored cell: balance, periodicity and bonding") {
  const CableDesign d = reference_cable1();
  const auto sp = OperatingConditions::balanced(745.0, 50.0, Bonding::SinglePoint);
  const Solved s = solve_case(d, sp);

  const double p = injected_power(s.sol).real();
  CHECK(p > 0.0);
  CHECK(std::abs(p - region_losses(s.sol).total()) / p < 0.01);
  CHECK(periodic_constraint_residual(s.sol) < 1e-8);
  CHECK(circuit_constraint_residual(s.sol) < 1e-8);

  const auto currents = conductor_currents(s.sol);
  for (std::size_t k = 0; k < s.sol.circuits.size(); ++k) {
    const Circuit& c = s.sol.circuits[k];
    if (c.kind == Circuit::Kind::Sheath) CHECK(std::abs(currents[k]) < 1e-6 * 745.0);
    if (c.kind == Circuit::Kind::Phase) CHECK(std::abs(currents[k]) == doctest::Approx(745.0).epsilon(1e-9));
  }

  // solid bonding draws circulating sheath current and adds loss
  const Solved sb = solve_case(d, OperatingConditions::balanced(745.0, 50.0, Bonding::SolidBonding));
  const auto isb = conductor_currents(sb.sol);
  for (std::size_t k = 0; k < sb.sol.circuits.size(); ++k)
    if (sb.sol.circuits[k].kind == Circuit::Kind::Sheath) CHECK(std::abs(isb[k]) > 0.05 * 745.0);
  CHECK(region_losses(sb.sol).sheaths > region_losses(s.sol).sheaths);
  CHECK(series_impedance(sb.sol).resistance > series_impedance(s.sol).resistance);
}

TEST_CASE("solution is linear in the source currents") {
  // the gauge-regularized system resolves edge values to about 1e-7
  const double tol = 1e-6;
  const CableDesign d = reference_cable1();
  const Solved a = solve_case(d, OperatingConditions::balanced(300.0, 50.0, Bonding::SolidBonding));
  const double k = 745.0 / 300.0;
  const FieldSolution b = solve(a.cell.mesh, a.cell.design, OperatingConditions::balanced(745.0, 50.0, Bonding::SolidBonding));
  CHECK((b.edge_values - k * a.sol.edge_values).norm() <= tol * b.edge_values.norm());
  const std::vector<Eigen::Vector3d> pts{{0.4, 0.0, 0.0}, {0.0, 0.9, 0.003}};
  const ProbeResult pa = probe_b_field(a.sol, pts), pb = probe_b_field(b, pts);
  for (std::size_t n = 0; n < pts.size(); ++n) CHECK(pb.b_meter_uT[n] == doctest::Approx(k * pa.b_meter_uT[n]).epsilon(tol));

  // phase rotation of every source rotates the field
  OperatingConditions rot = OperatingConditions::balanced(300.0, 50.0, Bonding::SolidBonding);
  const Complex turn = std::polar(1.0, 0.4);
  for (auto& i : rot.phase_currents) i *= turn;
  const FieldSolution c = solve(a.cell.mesh, a.cell.design, rot);
  CHECK((c.edge_values - turn * a.sol.edge_values).norm() <= tol * c.edge_values.norm());
}

TEST_CASE("parallel cores match the two-dimensional closed form") {
  const CableDesign d = line_current_cable(kInfinity);
  const auto cond = OperatingConditions::balanced(745.0, 50.0, Bonding::SinglePoint);
  const Solved s = solve_case(d, cond);
  CHECK(s.cell.mesh->rotation == 0.0);
  for (double r : {0.3, 0.5, 0.8}) {
    CAPTURE(r);
    const Eigen::Vector3d p(r, 0.0, 0.0);
    const double fem = probe_b_field(s.sol, {p}).b_meter_uT[0];
    const double ref = meter_magnitude_uT(parallel_threephase_field(d.core_outer_diameter, cond.phase_currents, p));
    CHECK(fem == doctest::Approx(ref).epsilon(0.05));
  }
}

TEST_CASE("twisted cores match the filament field") {
  const CableDesign d = line_current_cable(2.8);
  const auto cond = OperatingConditions::balanced(745.0, 50.0, Bonding::SinglePoint);
  const Solved s = solve_case(d, cond);
  const std::vector<Eigen::Vector3d> pts{{0.3, 0.0, 0.0}, {0.5, 0.0, 0.0}};
  const ProbeResult fem = probe_b_field(s.sol, pts);
  const ProbeResult ref = cable_filament_field(s.cell.design, {cond.phase_currents.begin(), cond.phase_currents.end()}, pts);
  for (std::size_t k = 0; k < pts.size(); ++k) {
    CAPTURE(pts[k].x());
    CHECK(fem.b_meter_uT[k] == doctest::Approx(ref.b_meter_uT[k]).epsilon(0.10));
  }
}

TEST_CASE("probe outside the domain") {
  const Solved s = solve_case(line_current_cable(kInfinity), OperatingConditions::balanced(100.0));
  try {
    probe_b_field(s.sol, {{5.0, 0.0, 0.0}});
    FAIL("expected PointOutsideDomain");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::PointOutsideDomain);
  }
}

TEST_CASE("sweep keeps order and records failures") {
  CaseOptions opt;
  opt.mesh = small_mesh();
  const auto rows = run_sweep(without_armor(reference_cable1()), OperatingConditions::balanced(745.0), opt,
                              SweepParameter::SheathThickness, {2.7e-3, -1.0, 4.7e-3}, 2);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].ok);
  CHECK(!rows[1].ok);
  CHECK(!rows[1].error.empty());
  CHECK(rows[2].ok);
  CHECK(rows[0].value == 2.7e-3);
  CHECK(rows[2].report.sheath_current > rows[0].report.sheath_current);

  const CableDesign thick = apply_parameter(reference_cable1(), SweepParameter::WireDiameter, 6.6e-3);
  CHECK(thick.armor_layers[0].wire_diameter == 6.6e-3);
  CHECK(thick.armor_layers[0].wire_count < reference_cable1().armor_layers[0].wire_count);
  CHECK(validate_design(thick).empty());
  CHECK_THROWS_AS(sweep_parameter_from_string("nope"), Error);
}
