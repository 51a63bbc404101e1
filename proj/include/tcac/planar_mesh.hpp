#pragma once

// Cross-section triangulation of a cable and its surroundings. The section is
// built from concentric bands; every node belongs to a twist frame (frame 0
// turns with the cores, frame 1 + l with armor layer l). Bands of different
// frames meet in "strips": two rings with the same node count whose
// triangulation is re-chosen slice by slice during extrusion.

#include <array>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tcac/cable_model.hpp"

namespace tcac {

enum class RegionKind {
  Conductor,
  Insulation,
  Sheath,
  Filler,
  ArmorWire,
  PESeparator,
  Jacket,
  Medium,
  StretchLayer,
};

struct RegionTag {
  RegionKind kind = RegionKind::Filler;
  int a = -1;  // phase index, or armor layer
  int b = -1;  // wire index within the layer

  static RegionTag conductor(int k) { return {RegionKind::Conductor, k, -1}; }
  static RegionTag insulation(int k) { return {RegionKind::Insulation, k, -1}; }
  static RegionTag sheath(int k) { return {RegionKind::Sheath, k, -1}; }
  static RegionTag filler() { return {RegionKind::Filler, -1, -1}; }
  static RegionTag wire(int layer, int index) { return {RegionKind::ArmorWire, layer, index}; }
  static RegionTag separator(int layer, int index) { return {RegionKind::PESeparator, layer, index}; }
  static RegionTag jacket() { return {RegionKind::Jacket, -1, -1}; }
  static RegionTag medium() { return {RegionKind::Medium, -1, -1}; }
  static RegionTag stretch() { return {RegionKind::StretchLayer, -1, -1}; }

  /// e.g. "Conductor(0)", "ArmorWire(1,17)", "Medium". No whitespace.
  std::string str() const;
  static RegionTag parse(const std::string& text);

  friend bool operator==(const RegionTag&, const RegionTag&) = default;
  friend auto operator<=>(const RegionTag&, const RegionTag&) = default;
};

enum class Resolution { Coarse, Medium, Fine };

const char* to_string(Resolution r);
Resolution resolution_from_string(const std::string& s);

struct MeshOptions {
  Resolution resolution = Resolution::Coarse;
  int conductor_rings = 3;       // radial node rings inside a conductor
  int insulation_rings = 1;      // intermediate rings in the insulation
  int sheath_layers = 1;         // radial element layers across a sheath
  int sheath_nodes = 36;         // nodes around a sheath
  double filler_size = 8e-3;     // target edge length in the filler, m
  int slot_cells = 4;            // angular cells per armor wire slot
  int wire_cells = 3;            // of which covered by the wire (slot_cells - wire_cells odd)
  int wire_layers = 1;           // radial element layers across a wire
  double medium_growth = 0.12;   // radial step / radius in the medium
  int medium_min_nodes = 32;     // angular node floor in the medium
  double medium_max_step = 0.2;  // m, radial step cap in the medium
  int stretch_rings = 3;
  double medium_radius = 0.0;    // <= 0: default
  double stretch_thickness = 0.0;  // <= 0: default
  int n_slices = 4;

  static MeshOptions for_resolution(Resolution r);
};

/// Two rings of equal node count M joined across a twist-frame boundary.
/// inner[j] sits at angle phase + j*2pi/M and outer[j] at phase + (j+1/2)*2pi/M
/// (at z = 0).
struct Strip {
  std::vector<int> inner;
  std::vector<int> outer;
  int inner_frame = 0;
  int outer_frame = 0;
  RegionTag tag;
};

struct PlanarMesh {
  std::vector<Eigen::Vector2d> nodes;
  std::vector<int> node_frame;
  std::vector<std::array<int, 3>> triangles;  // counter-clockwise
  std::vector<RegionTag> tags;
  std::vector<int> triangle_strip;            // strip id or -1
  std::vector<Strip> strips;
  std::vector<double> frame_lay;              // lay length per frame (inf: no twist)
  std::vector<int> outer_loop;                // boundary nodes at outer_radius, CCW
  double medium_radius = 0.0;
  double outer_radius = 0.0;

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }
  double triangle_area(int t) const;
};

/// Default radius of the physical medium for a design.
double default_medium_radius(const CableDesign& design);

PlanarMesh build_cross_section(const CableDesign& design, const MeshOptions& options);
PlanarMesh build_cross_section(const CableDesign& design, Resolution resolution);

/// Total triangle area per region tag.
std::map<RegionTag, double> region_areas(const PlanarMesh& mesh);

/// Nominal cross-section areas of the cable's regions from the design data.
std::map<RegionTag, double> nominal_region_areas(const CableDesign& design);

}  // namespace tcac
