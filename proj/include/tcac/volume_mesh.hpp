#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tcac/cable_model.hpp"
#include "tcac/planar_mesh.hpp"

namespace tcac {

struct PeriodicEdge {
  int destination;  // edge on z = L
  int source;       // edge on z = 0
  int sign;         // +1 if the global orientations agree
};

/// Tetrahedral mesh of one periodic cell. Edges are numbered canonically
/// (lexicographic in their sorted node pair), so the numbering is a pure
/// function of the tetrahedra.
struct VolumeMesh {
  std::vector<Eigen::Vector3d> nodes;
  std::vector<std::array<int, 4>> tets;      // positive volume
  std::vector<RegionTag> tet_tags;

  std::vector<std::array<int, 2>> edges;     // (lo, hi) node ids, lo < hi
  std::vector<std::array<int, 6>> tet_edges; // local edges (01,02,03,12,13,23)
  std::vector<std::array<signed char, 6>> tet_edge_signs;

  std::vector<int> bottom_edges;   // z = 0
  std::vector<int> top_edges;      // z = L
  std::vector<int> outer_edges;    // on the cylinder r = outer_radius
  std::vector<PeriodicEdge> periodic;

  double length = 0.0;
  double rotation = 0.0;
  double medium_radius = 0.0;
  double outer_radius = 0.0;

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int num_tets() const { return static_cast<int>(tets.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }
  double tet_volume(int t) const;
  /// Distinct region tags in order.
  std::vector<RegionTag> regions() const;
};

/// Extrudes the section over [0, length] with each twist frame rotating
/// rigidly at 2 pi z / lay. Strips re-triangulate as the frames slide past
/// each other; slabs where a strip flips use a centre node per cell.
VolumeMesh twisted_extrude(const PlanarMesh& planar, const CableDesign& design, double length, int n_slices);

/// Rebuilds edges and boundary sets from nodes and tets. End faces are the
/// nodes at z = 0 and z = length, the outer boundary the nodes at the
/// largest radius.
void finalize_topology(VolumeMesh& mesh);

/// Matches every z = L node, rotated by -theta, to a z = 0 node and derives
/// the edge correspondence. Throws NonCongruentFaces with the worst residual.
std::vector<PeriodicEdge> periodic_face_map(const VolumeMesh& mesh, double theta);

/// Largest distance between a rotated z = L node and its matched z = 0 node.
double periodic_node_residual(const VolumeMesh& mesh, double theta);

struct CellMesh {
  CableDesign design;  // after the commensurate lay adjustment
  std::shared_ptr<const VolumeMesh> mesh;
};

/// Section plus extrusion over the shortest periodic cell. Armor lays are
/// nudged first if needed, and slices are raised to the largest wire shift.
CellMesh build_cell_mesh(const CableDesign& design, const MeshOptions& options);
CellMesh build_cell_mesh(const CableDesign& design, Resolution resolution);

void export_mesh(const VolumeMesh& mesh, const std::string& path);
VolumeMesh import_mesh(const std::string& path);

}  // namespace tcac
