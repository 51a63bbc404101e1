#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "tcac/errors.hpp"
#include "tcac/volume_mesh.hpp"

using namespace tcac;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("tcac_test_" + name)).string();
}

}  // namespace

TEST_CASE("cross section areas") {
  for (const CableDesign& d : {reference_cable1(), without_armor(reference_cable1()), commensurate_design(cable2_layout("St+PE"))}) {
    CAPTURE(d.name);
    const PlanarMesh m = build_cross_section(d, Resolution::Coarse);
    double total = 0.0;
    for (int t = 0; t < m.num_triangles(); ++t) {
      REQUIRE(m.triangle_area(t) > 0.0);
      total += m.triangle_area(t);
    }
    // polygonal outer boundary with area-corrected ring radius
    CHECK(total == doctest::Approx(kPi * m.outer_radius * m.outer_radius).epsilon(1e-9));

    const auto got = region_areas(m);
    for (const auto& [tag, want] : nominal_region_areas(d)) {
      CAPTURE(tag.str());
      REQUIRE(got.count(tag));
      CHECK(got.at(tag) == doctest::Approx(want).epsilon(1e-6));
    }
  }
}

TEST_CASE("region tags print and parse") {
  for (const RegionTag& t : {RegionTag::conductor(2), RegionTag::wire(1, 17), RegionTag::medium(), RegionTag::separator(0, 3)})
    CHECK(RegionTag::parse(t.str()) == t);
  CHECK_THROWS_AS(RegionTag::parse("Bogus(1)"), Error);
}

TEST_CASE("extruded cell") {
  const CableDesign d = reference_cable1();
  const PlanarMesh section = build_cross_section(d, Resolution::Coarse);
  const PeriodicCell cell = periodic_cell(d);
  const VolumeMesh m = twisted_extrude(section, d, cell.length, 4);

  double vol = 0.0;
  for (int t = 0; t < m.num_tets(); ++t) {
    REQUIRE(m.tet_volume(t) > 0.0);
    vol += m.tet_volume(t);
  }
  double area = 0.0;
  for (int t = 0; t < section.num_triangles(); ++t) area += section.triangle_area(t);
  // twisted prisms cut chords off the helical faces
  CHECK(vol == doctest::Approx(area * cell.length).epsilon(1e-3));
  CHECK(m.rotation == doctest::Approx(cell.rotation).epsilon(1e-14));
  CHECK(periodic_node_residual(m, m.rotation) < 1e-9);
  CHECK(m.periodic.size() == m.top_edges.size());

  // every region of the section survives extrusion
  const auto regions = m.regions();
  CHECK(std::find(regions.begin(), regions.end(), RegionTag::wire(0, 113)) != regions.end());
  CHECK(std::find(regions.begin(), regions.end(), RegionTag::stretch()) != regions.end());
}

TEST_CASE("slices must cover the armor shift") {
  const CableDesign d = commensurate_design(reference_cable2());
  const PeriodicCell cell = periodic_cell(d);
  int need = 0;
  for (int s : cell.wire_shift) need = std::max(need, std::abs(s));
  REQUIRE(need > 1);
  const PlanarMesh section = build_cross_section(d, Resolution::Coarse);
  try {
    twisted_extrude(section, d, cell.length, need - 1);
    FAIL("expected a slice-count error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidArgument);
  }
  const CellMesh built = build_cell_mesh(d, Resolution::Coarse);
  CHECK(periodic_node_residual(*built.mesh, built.mesh->rotation) < 1e-9);
}

TEST_CASE("mesh export round trip is exact") {
  const CellMesh c = build_cell_mesh(without_armor(reference_cable1()), Resolution::Coarse);
  const std::string path = temp_path("mesh.txt");
  export_mesh(*c.mesh, path);
  const VolumeMesh back = import_mesh(path);
  std::remove(path.c_str());
  const VolumeMesh& m = *c.mesh;
  REQUIRE(back.num_nodes() == m.num_nodes());
  REQUIRE(back.num_tets() == m.num_tets());
  bool same = back.length == m.length && back.rotation == m.rotation && back.medium_radius == m.medium_radius &&
              back.outer_radius == m.outer_radius;
  for (int i = 0; i < m.num_nodes() && same; ++i) same = back.nodes[i] == m.nodes[i];
  for (int t = 0; t < m.num_tets() && same; ++t) same = back.tets[t] == m.tets[t] && back.tet_tags[t] == m.tet_tags[t];
  CHECK(same);
  CHECK(back.edges == m.edges);
  REQUIRE(back.periodic.size() == m.periodic.size());
  for (std::size_t i = 0; i < m.periodic.size(); ++i) {
    CHECK(back.periodic[i].destination == m.periodic[i].destination);
    CHECK(back.periodic[i].source == m.periodic[i].source);
    CHECK(back.periodic[i].sign == m.periodic[i].sign);
  }
}

TEST_CASE("mesh import rejects garbage") {
  const std::string path = temp_path("bad_mesh.txt");
  {
    FILE* f = std::fopen(path.c_str(), "w");
    std::fputs("NODES 3\n0 0\n", f);
    std::fclose(f);
  }
  CHECK_THROWS_AS(import_mesh(path), Error);
  std::remove(path.c_str());
  CHECK_THROWS_AS(import_mesh(temp_path("missing.txt")), Error);
}
