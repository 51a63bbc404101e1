#pragma once

#include <string>

#include "tcac/cable_model.hpp"

namespace tcac {

/// Cable designs on disk are JSON documents with lengths in millimetres
/// (`*_mm` keys), lay lengths in metres and conductivities in MS/m. They are
/// converted to SI on load.
CableDesign design_from_json_text(const std::string& text);
CableDesign load_design(const std::string& path);
std::string design_to_json_text(const CableDesign& design);
void save_design(const CableDesign& design, const std::string& path);

/// Directory holding bundled designs and coefficient files. Honors the
/// TCAC_DATA_DIR environment variable, falling back to the build-time path.
std::string data_dir();
/// `name` if it exists as given, otherwise `data_dir()/name`.
std::string resolve_data_file(const std::string& name);

}  // namespace tcac
