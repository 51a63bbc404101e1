#include "tcac/design_io.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tcac/errors.hpp"

#ifndef TCAC_DEFAULT_DATA_DIR
#define TCAC_DEFAULT_DATA_DIR "data"
#endif

namespace tcac {

using nlohmann::json;

namespace {

double lay_from_json(const json& j) {
  if (j.is_null()) return kInfinity;
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "infinity" || s == "straight") return kInfinity;
    throw Error(ErrorKind::ParseError, "lay length string must be 'inf', got '" + s + "'");
  }
  return j.get<double>();
}

json lay_to_json(double v) { return std::isfinite(v) ? json(v) : json("inf"); }

MaterialProps material_from_json(const json& j) {
  MaterialProps m;
  m.conductivity = j.value("conductivity_MS_per_m", 0.0) * 1e6;
  if (j.contains("relative_permeability")) {
    const auto& mu = j.at("relative_permeability");
    if (mu.is_number()) {
      m.mu_r = {mu.get<double>(), 0.0};
    } else if (mu.is_object() && mu.contains("curve")) {
      for (const auto& row : mu.at("curve")) {
        if (!row.is_array() || row.size() != 3)
          throw Error(ErrorKind::ParseError, "permeability curve rows are [H_A_per_m, mu_real, mu_loss]");
        m.curve.push_back({row[0].get<double>(), {row[1].get<double>(), -row[2].get<double>()}});
      }
    } else if (mu.is_object()) {
      m.mu_r = {mu.value("real", 1.0), -mu.value("loss", 0.0)};
    } else {
      throw Error(ErrorKind::ParseError, "relative_permeability must be a number, {real, loss} or {curve}");
    }
  }
  return m;
}

json material_to_json(const MaterialProps& m) {
  json j;
  j["conductivity_MS_per_m"] = m.conductivity * 1e-6;
  if (m.is_nonlinear()) {
    json curve = json::array();
    for (const auto& p : m.curve) curve.push_back({p.field_strength, p.mu_r.real(), -p.mu_r.imag()});
    j["relative_permeability"] = {{"curve", curve}};
  } else if (m.mu_r.imag() != 0.0) {
    j["relative_permeability"] = {{"real", m.mu_r.real()}, {"loss", -m.mu_r.imag()}};
  } else {
    j["relative_permeability"] = m.mu_r.real();
  }
  return j;
}

}  // namespace

CableDesign design_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ParseError, std::string("invalid JSON: ") + e.what());
  }
  try {
    CableDesign d;
    d.name = j.value("name", std::string("cable"));
    d.rated_voltage_kV = j.value("rated_voltage_kV", 0.0);
    d.rated_current = j.value("rated_current_A", 0.0);
    d.conductor_cross_section_mm2 = j.value("conductor_cross_section_mm2", 0.0);
    d.conductor_diameter = j.at("conductor_diameter_mm").get<double>() * 1e-3;
    d.sheath_outer_diameter = j.at("sheath_outer_diameter_mm").get<double>() * 1e-3;
    d.sheath_thickness = j.at("sheath_thickness_mm").get<double>() * 1e-3;
    d.core_outer_diameter = j.at("core_outer_diameter_mm").get<double>() * 1e-3;
    d.core_lay_length = lay_from_json(j.at("core_lay_length_m"));
    d.jacket_thickness = j.value("jacket_thickness_mm", 5.0) * 1e-3;
    d.ambient_temperature = j.value("ambient_temperature_C", 20.0);
    d.conductor_material = material_from_json(j.at("conductor_material"));
    d.sheath_material = material_from_json(j.at("sheath_material"));
    for (const auto& a : j.value("armor_layers", json::array())) {
      ArmorLayer layer;
      layer.wire_count = a.at("wire_count").get<int>();
      layer.wire_diameter = a.at("wire_diameter_mm").get<double>() * 1e-3;
      layer.outer_diameter = a.at("layer_outer_diameter_mm").get<double>() * 1e-3;
      layer.lay_length = a.at("lay_length_m").get<double>();
      layer.pattern = wire_pattern_from_string(a.value("wire_pattern", std::string("AllSteel")));
      layer.wire_material = material_from_json(a.at("wire_material"));
      d.armor_layers.push_back(layer);
    }
    return d;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("cable design: ") + e.what());
  }
}

std::string design_to_json_text(const CableDesign& d) {
  json j;
  j["name"] = d.name;
  j["rated_voltage_kV"] = d.rated_voltage_kV;
  j["rated_current_A"] = d.rated_current;
  j["conductor_cross_section_mm2"] = d.conductor_cross_section_mm2;
  j["conductor_diameter_mm"] = d.conductor_diameter * 1e3;
  j["sheath_outer_diameter_mm"] = d.sheath_outer_diameter * 1e3;
  j["sheath_thickness_mm"] = d.sheath_thickness * 1e3;
  j["core_outer_diameter_mm"] = d.core_outer_diameter * 1e3;
  j["core_lay_length_m"] = lay_to_json(d.core_lay_length);
  j["jacket_thickness_mm"] = d.jacket_thickness * 1e3;
  j["ambient_temperature_C"] = d.ambient_temperature;
  j["conductor_material"] = material_to_json(d.conductor_material);
  j["sheath_material"] = material_to_json(d.sheath_material);
  json layers = json::array();
  for (const auto& a : d.armor_layers) {
    layers.push_back({{"wire_count", a.wire_count},
                      {"wire_diameter_mm", a.wire_diameter * 1e3},
                      {"layer_outer_diameter_mm", a.outer_diameter * 1e3},
                      {"lay_length_m", a.lay_length},
                      {"wire_pattern", to_string(a.pattern)},
                      {"wire_material", material_to_json(a.wire_material)}});
  }
  j["armor_layers"] = layers;
  return j.dump(2) + "\n";
}

CableDesign load_design(const std::string& path) {
  std::ifstream in(resolve_data_file(path));
  if (!in) throw Error(ErrorKind::Io, "cannot open design file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return design_from_json_text(ss.str());
}

void save_design(const CableDesign& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
  out << design_to_json_text(d);
}

std::string data_dir() {
  if (const char* env = std::getenv("TCAC_DATA_DIR"); env && *env) return env;
  return TCAC_DEFAULT_DATA_DIR;
}

std::string resolve_data_file(const std::string& name) {
  namespace fs = std::filesystem;
  if (fs::exists(name)) return name;
  const fs::path candidate = fs::path(data_dir()) / name;
  if (fs::exists(candidate)) return candidate.string();
  return name;
}

}  // namespace tcac
