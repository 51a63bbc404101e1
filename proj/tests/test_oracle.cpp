#include <doctest.h>

#include <cmath>

#include <Eigen/Geometry>

#include "tcac/errors.hpp"
#include "tcac/oracle.hpp"

using namespace tcac;
using Eigen::Vector3d;

namespace {

// Field of an infinite straight line current along z through (x0, y0).
Eigen::Vector3cd line_field(double x0, double y0, Complex i, const Vector3d& p) {
  const double dx = p.x() - x0, dy = p.y() - y0;
  const double r2 = dx * dx + dy * dy;
  const Complex k = kMu0 * i / (2.0 * kPi * r2);
  return Eigen::Vector3cd(-k * dy, k * dx, 0.0);
}

// Midpoint-rule Biot-Savart of a polyline sampled from f on [t0, t1].
template <class F>
Vector3d polyline_field(F f, double t0, double t1, int n, const Vector3d& p) {
  Vector3d b = Vector3d::Zero();
  Vector3d prev = f(t0);
  for (int k = 1; k <= n; ++k) {
    const Vector3d next = f(t0 + (t1 - t0) * k / n);
    const Vector3d dl = next - prev;
    const Vector3d r = p - 0.5 * (prev + next);
    b += dl.cross(r) / std::pow(r.norm(), 3);
    prev = next;
  }
  return b * (kMu0 / (4.0 * kPi));
}

// Semi-infinite axial line from z = z0 to +inf (dir = +1) or -inf to z0 (dir = -1).
Vector3d semi_infinite_axis_field(double z0, int dir, const Vector3d& p) {
  const double rho = std::hypot(p.x(), p.y());
  const double u = (z0 - p.z()) / std::hypot(rho, z0 - p.z());
  const double mag = kMu0 / (4.0 * kPi * rho) * (dir > 0 ? 1.0 - u : 1.0 + u);
  return Vector3d(-p.y() / rho, p.x() / rho, 0.0) * mag;
}

}  // namespace

TEST_CASE("parallel three-phase closed form") {
  const auto c = OperatingConditions::balanced(745.0);
  const double s = 0.1;
  const double a = s / std::sqrt(3.0);
  for (const Vector3d& p : {Vector3d(0.5, 0.0, 0.0), Vector3d(-0.3, 0.8, 2.0), Vector3d(2.0, -1.0, 0.0)}) {
    Eigen::Vector3cd want = Eigen::Vector3cd::Zero();
    for (int k = 0; k < 3; ++k)
      want += line_field(a * std::cos(2 * kPi * k / 3), a * std::sin(2 * kPi * k / 3), c.phase_currents[k], p);
    const Eigen::Vector3cd got = parallel_threephase_field(s, c.phase_currents, p);
    CHECK((got - want).norm() <= 1e-12 * want.norm());
  }
}

TEST_CASE("straight filaments are exact") {
  HelixPath line;
  line.axis_radius = 0.2;
  line.phase = 0.5;
  const Vector3d p(1.0, 0.3, 7.0);
  const Eigen::Vector3cd got = helix_filament_field(line, Complex(100.0, 20.0), p);
  const Eigen::Vector3cd want =
      line_field(0.2 * std::cos(0.5), 0.2 * std::sin(0.5), Complex(100.0, 20.0), p);
  CHECK((got - want).norm() <= 1e-12 * want.norm());

  const Vector3d on_line(0.2 * std::cos(0.5), 0.2 * std::sin(0.5), 3.0);
  try {
    helix_filament_field(line, 1.0, on_line);
    FAIL("expected PointOnFilament");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::PointOnFilament);
  }
}

TEST_CASE("helix with closure against brute-force quadrature") {
  HelixPath h;
  h.axis_radius = 0.06;
  h.pitch = -2.8;
  h.phase = 0.3;
  OracleOptions opt;
  opt.span_pitches = 1.0;
  opt.min_half_span = 3.0;
  opt.abs_tol = 1e-14;
  for (const Vector3d& p : {Vector3d(0.5, 0.0, 0.0), Vector3d(0.0, 0.25, 0.4), Vector3d(-1.5, 1.0, -0.2)}) {
    CAPTURE(p.transpose());
    const double half = std::max(opt.span_pitches * std::abs(h.pitch), opt.min_half_span);
    const double z0 = p.z() - half, z1 = p.z() + half;
    Vector3d want = polyline_field([&](double z) { return h.point(z); }, z0, z1, 400000, p);
    // radial legs between the axis and the helix ends, then the axial tails
    const Vector3d e0 = h.point(z0), e1 = h.point(z1);
    want += polyline_field([&](double t) { return Vector3d(t * e0.x(), t * e0.y(), z0); }, 0.0, 1.0, 2000, p);
    want += polyline_field([&](double t) { return Vector3d((1 - t) * e1.x(), (1 - t) * e1.y(), z1); }, 0.0, 1.0, 2000, p);
    want += semi_infinite_axis_field(z0, -1, p) + semi_infinite_axis_field(z1, +1, p);

    const Eigen::Vector3cd got = helix_filament_field(h, 1.0, p, opt);
    CHECK((got.real() - want).norm() <= 1e-6 * want.norm());
    CHECK(got.imag().norm() == 0.0);
  }
}

TEST_CASE("long pitch helix tends to a straight line") {
  HelixPath h;
  h.axis_radius = 0.05;
  h.pitch = 1e7;
  const Vector3d p(0.7, 0.1, 0.0);
  const Eigen::Vector3cd got = helix_filament_field(h, 10.0, p);
  const Eigen::Vector3cd want = line_field(0.05, 0.0, 10.0, p);
  CHECK((got - want).norm() <= 1e-6 * want.norm());
}

TEST_CASE("twisted cable far field decays faster than parallel") {
  const CableDesign d = reference_cable1();
  const auto c = OperatingConditions::balanced(745.0);
  std::vector<Complex> cur(c.phase_currents.begin(), c.phase_currents.end());
  const std::vector<Vector3d> pts{{1.0, 0.0, 0.0}, {3.0, 0.0, 0.0}};
  const ProbeResult twisted = cable_filament_field(d, cur, pts);
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const double par = meter_magnitude_uT(parallel_threephase_field(d.core_outer_diameter, c.phase_currents, pts[k]));
    CHECK(twisted.b_meter_uT[k] < par);
  }
  // the twisted profile falls faster than 1/r^2
  CHECK(twisted.b_meter_uT[0] / twisted.b_meter_uT[1] > 9.0);

  CableDesign straight = d;
  straight.core_lay_length = kInfinity;
  const ProbeResult s = cable_filament_field(straight, cur, pts);
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const double par = meter_magnitude_uT(parallel_threephase_field(d.core_outer_diameter, c.phase_currents, pts[k]));
    CHECK(s.b_meter_uT[k] == doctest::Approx(par).epsilon(1e-10));
  }
}
