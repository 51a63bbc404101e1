#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "tcac/design_io.hpp"
#include "tcac/errors.hpp"
#include "tcac/route_map.hpp"

using namespace tcac;

namespace {

RouteProfile straight_route(double depth, double current, const std::string& coeffs = "coeffs-contralay.json") {
  RouteProfile r;
  r.name = "straight";
  r.vertices = {{0.0, 0.0, depth}, {100.0, 0.0, depth}};
  r.current = current;
  r.model = load_fit(resolve_data_file(coeffs));
  return r;
}

// 1.5 m burial with one 0.5 m dip around chainage 150.
RouteProfile dipped_route() {
  RouteProfile r = straight_route(1.5, 745.0);
  r.vertices = {{0, 0, 1.5}, {120, 0, 1.5}, {150, 0, 0.5}, {180, 0, 1.5}, {300, 0, 1.5}};
  return r;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("tcac_test_" + name)).string();
}

}  // namespace

TEST_CASE("field directly above the cable") {
  const RouteProfile r = straight_route(1.0, 450.0);
  unsigned char f = 0xff;
  CHECK(seabed_field(r, {50.0, 0.0}, &f) == doctest::Approx(2.92).epsilon(0.01));
  CHECK(f == 0);
  CHECK(seabed_field(straight_route(1.0, 450.0, "coeffs-unilay.json"), {50.0, 0.0}) > seabed_field(r, {50.0, 0.0}));

  // five metres of slant distance at 100 A
  const RouteProfile far = straight_route(3.0, 100.0);
  CHECK(seabed_field(far, {50.0, 4.0}, &f) == doctest::Approx(3.25e-5).epsilon(0.02));
  CHECK(f == 0);
}

TEST_CASE("distance clamping and extrapolation flags") {
  const RouteProfile r = straight_route(0.05, 450.0);
  unsigned char f = 0;
  const double b = seabed_field(r, {50.0, 0.0}, &f);
  CHECK((f & kClampedToRMin) != 0);
  CHECK(b == doctest::Approx(eval_fit(r.model, 450.0, r.model.validity.r_min)));
  seabed_field(r, {50.0, 30.0}, &f);
  CHECK((f & kOutsideValidity) != 0);
}

TEST_CASE("route geometry") {
  const RouteProfile r = dipped_route();
  const RoutePosition p = locate_on_route(r, {135.0, -2.0});
  CHECK(p.chainage == doctest::Approx(135.0));
  CHECK(p.lateral == doctest::Approx(2.0));
  CHECK(p.depth == doctest::Approx(1.0));

  RouteProfile bad = r;
  bad.vertices.resize(1);
  CHECK_THROWS_AS(validate_route(bad), Error);
  bad = r;
  bad.vertices[2].depth = -0.1;
  CHECK_THROWS_AS(validate_route(bad), Error);
  bad = r;
  bad.vertices[2] = bad.vertices[1];
  CHECK_THROWS_AS(validate_route(bad), Error);
}

TEST_CASE("map covers the corridor") {
  const RouteProfile r = dipped_route();
  const EmissionMap m = map_route(r, 20.0, 2.0);
  CHECK(m.x0 <= -20.0);
  CHECK(m.x0 + (m.nx - 1) * m.pitch >= 300.0 + 20.0 - m.pitch);
  CHECK(m.y0 <= -20.0);
  CHECK(m.y0 + (m.ny - 1) * m.pitch >= 20.0 - m.pitch);
  CHECK(m.label == r.model.label);
  for (double b : m.b_uT) CHECK(b >= 0.0);
}

TEST_CASE("lateral offset never raises the field") {
  const RouteProfile r = dipped_route();
  for (double x : {60.0, 140.0, 150.0, 250.0}) {
    double prev = INFINITY;
    for (double s = 0.0; s <= 20.0; s += 0.25) {
      const double b = seabed_field(r, {x, s});
      CHECK(b <= prev);
      prev = b;
    }
  }
}

TEST_CASE("shallower burial raises the field") {
  for (double d : {0.4, 1.0, 1.8, 3.0}) CHECK(seabed_field(straight_route(d / 2, 745.0), {50, 0}) > seabed_field(straight_route(d, 745.0), {50, 0}));
}

TEST_CASE("rigid motions leave the map values unchanged") {
  const RouteProfile r = dipped_route();
  RouteProfile moved = r;
  const double a = 0.7, tx = 4.5e5, ty = 6.1e6;
  for (auto& v : moved.vertices) {
    const double x = v.x, y = v.y;
    v.x = std::cos(a) * x - std::sin(a) * y + tx;
    v.y = std::sin(a) * x + std::cos(a) * y + ty;
  }
  for (const Eigen::Vector2d& p : {Eigen::Vector2d(10, 3), Eigen::Vector2d(149, -1.5), Eigen::Vector2d(290, 12)}) {
    const Eigen::Vector2d q(std::cos(a) * p.x() - std::sin(a) * p.y() + tx, std::sin(a) * p.x() + std::cos(a) * p.y() + ty);
    CHECK(seabed_field(moved, q) == doctest::Approx(seabed_field(r, p)).epsilon(1e-9));
  }
}

TEST_CASE("hot spots") {
  const EmissionMap m = map_route(dipped_route(), 10.0, 1.0);
  const double above_deep = seabed_field(dipped_route(), {50.0, 0.0});

  const auto one = detect_hotspots(m, 1.5 * above_deep);
  REQUIRE(one.size() == 1);
  const double mid = 0.5 * (one[0].chainage_begin + one[0].chainage_end);
  CHECK(mid == doctest::Approx(150.0).epsilon(0.02));
  CHECK(std::abs(one[0].peak_location.x() - 150.0) <= 1.0);
  CHECK(one[0].peak_uT == doctest::Approx(*std::max_element(m.b_uT.begin(), m.b_uT.end())));

  const auto all = detect_hotspots(m, 0.0);
  REQUIRE(all.size() == 1);
  CHECK(static_cast<int>(all[0].cells.size()) == m.size());

  const EmissionMap flat = map_route(straight_route(1.5, 745.0), 10.0, 1.0);
  const double top = *std::max_element(flat.b_uT.begin(), flat.b_uT.end());
  CHECK(detect_hotspots(flat, top * 1.0001).empty());

  // two dips give two regions, the shallower first
  RouteProfile two = dipped_route();
  two.vertices = {{0, 0, 1.5}, {40, 0, 1.5}, {60, 0, 0.7}, {80, 0, 1.5}, {200, 0, 1.5}, {220, 0, 0.4}, {240, 0, 1.5}, {300, 0, 1.5}};
  const auto both = detect_hotspots(map_route(two, 10.0, 1.0), 1.5 * above_deep);
  REQUIRE(both.size() == 2);
  CHECK(both[0].peak_uT > both[1].peak_uT);
  CHECK(std::abs(both[0].peak_location.x() - 220.0) <= 1.0);
}

TEST_CASE("map export round trip") {
  const EmissionMap m = map_route(dipped_route(), 5.0, 2.5);
  const std::string path = temp_path("map.csv");
  export_map(m, path);
  {
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "easting,northing,B_uT,clamped_flag");
  }
  const EmissionMap back = import_map(path);
  std::remove(path.c_str());
  CHECK(back.nx == m.nx);
  CHECK(back.ny == m.ny);
  CHECK(back.x0 == m.x0);
  CHECK(back.y0 == m.y0);
  CHECK(back.pitch == doctest::Approx(m.pitch).epsilon(1e-12));
  CHECK(back.b_uT == m.b_uT);
  CHECK(back.flags == m.flags);

  EmissionMap empty;
  export_map(empty, path);
  std::ifstream in(path);
  std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::remove(path.c_str());
  CHECK(all == "easting,northing,B_uT,clamped_flag\n");
}

TEST_CASE("bundled route file") {
  const RouteProfile r = load_route(resolve_data_file("route.json"));
  CHECK(r.vertices.size() >= 2);
  CHECK_NOTHROW(validate_route(r));
  CHECK_THROWS_AS(load_route(temp_path("no_such_route.json")), Error);
}
