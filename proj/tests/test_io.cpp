#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>

#include "tcac/design_io.hpp"
#include "tcac/errors.hpp"
#include "tcac/field_profile.hpp"

using namespace tcac;

namespace {

void check_same(const CableDesign& a, const CableDesign& b) {
  CHECK(a.name == b.name);
  CHECK(a.conductor_diameter == doctest::Approx(b.conductor_diameter).epsilon(1e-12));
  CHECK(a.core_outer_diameter == doctest::Approx(b.core_outer_diameter).epsilon(1e-12));
  CHECK(a.core_lay_length == doctest::Approx(b.core_lay_length).epsilon(1e-12));
  CHECK(a.sheath_thickness == doctest::Approx(b.sheath_thickness).epsilon(1e-12));
  CHECK(a.sheath_material.conductivity == doctest::Approx(b.sheath_material.conductivity).epsilon(1e-12));
  REQUIRE(a.armor_layers.size() == b.armor_layers.size());
  for (std::size_t k = 0; k < a.armor_layers.size(); ++k) {
    CHECK(a.armor_layers[k].wire_count == b.armor_layers[k].wire_count);
    CHECK(a.armor_layers[k].pattern == b.armor_layers[k].pattern);
    CHECK(a.armor_layers[k].lay_length == doctest::Approx(b.armor_layers[k].lay_length).epsilon(1e-12));
    CHECK(a.armor_layers[k].wire_diameter == doctest::Approx(b.armor_layers[k].wire_diameter).epsilon(1e-12));
    CHECK(a.armor_layers[k].wire_material.mu_r == b.armor_layers[k].wire_material.mu_r);
  }
}

ErrorKind kind_of(const std::string& text) {
  try {
    design_from_json_text(text);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::Io;
}

}  // namespace

TEST_CASE("design json round trip") {
  for (const CableDesign& d : {reference_cable1(), reference_cable2(), cable2_layout("St+PE"), without_armor(reference_cable1())}) {
    CAPTURE(d.name);
    check_same(design_from_json_text(design_to_json_text(d)), d);
  }
  const std::string path = (std::filesystem::temp_directory_path() / "tcac_test_design.json").string();
  save_design(reference_cable2(), path);
  check_same(load_design(path), reference_cable2());
  std::remove(path.c_str());
}

TEST_CASE("bundled designs match the built-in references") {
  check_same(load_design(resolve_data_file("cable1.json")), reference_cable1());
  check_same(load_design(resolve_data_file("cable2.json")), reference_cable2());
  for (const char* l : {"StA", "StPE", "StS", "unarmored"}) {
    CAPTURE(l);
    CHECK(validate_design(load_design(resolve_data_file(std::string("cable2-") + l + ".json"))).empty());
  }
}

TEST_CASE("malformed designs") {
  CHECK(kind_of("{") == ErrorKind::ParseError);
  CHECK(kind_of("[]") == ErrorKind::ParseError);
  CHECK(kind_of(R"({"name": "x"})") == ErrorKind::ParseError);
  std::string text = design_to_json_text(reference_cable1());
  const auto at = text.find("\"AllSteel\"");
  REQUIRE(at != std::string::npos);
  text.replace(at, 10, "\"Copper\"");
  CHECK(kind_of(text) == ErrorKind::ParseError);
  try {
    load_design("/nonexistent/design.json");
    FAIL("expected an I/O error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Io);
  }
}

TEST_CASE("data directory override") {
  const std::string dir = (std::filesystem::temp_directory_path() / "tcac_test_data").string();
  std::filesystem::create_directories(dir);
  save_design(reference_cable1(), dir + "/only_here.json");
  const char* old = std::getenv("TCAC_DATA_DIR");
  const std::string saved = old ? old : "";
  setenv("TCAC_DATA_DIR", dir.c_str(), 1);
  CHECK(data_dir() == dir);
  CHECK(resolve_data_file("only_here.json") == dir + "/only_here.json");
  if (old)
    setenv("TCAC_DATA_DIR", saved.c_str(), 1);
  else
    unsetenv("TCAC_DATA_DIR");
  std::filesystem::remove_all(dir);
}

TEST_CASE("probe line specs") {
  const auto lin = parse_probe_line("0.5:2:4");
  REQUIRE(lin.size() == 4);
  CHECK(lin[0] == 0.5);
  CHECK(lin[1] == doctest::Approx(1.0));
  CHECK(lin[3] == 2.0);

  const auto lg = parse_probe_line("0.15:5:40log");
  REQUIRE(lg.size() == 40);
  CHECK(lg.front() == 0.15);
  CHECK(lg.back() == 5.0);
  for (std::size_t k = 1; k + 1 < lg.size(); ++k) CHECK(lg[k] / lg[k - 1] == doctest::Approx(lg[k + 1] / lg[k]));

  CHECK(parse_probe_line("1:1:1") == std::vector<double>{1.0});
  for (const char* bad : {"", "1:2", "a:2:3", "1:2:0", "2:1:3", "0:1:3", "1:2:3x", "-1:2:3"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_probe_line(bad), Error);
  }
}
