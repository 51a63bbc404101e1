#pragma once

// Seabed-surface field maps along a buried cable route, from a fitted
// emission model evaluated at the slant distance to the cable.

#include <string>
#include <vector>

#include <Eigen/Core>

#include "tcac/emission.hpp"

namespace tcac {

struct RouteVertex {
  double x = 0.0;      // easting, m
  double y = 0.0;      // northing, m
  double depth = 0.0;  // burial depth below the seabed, m
};

struct RouteProfile {
  std::string name;
  std::vector<RouteVertex> vertices;
  double current = 0.0;  // A
  EmissionFit model;
};

/// Checks the vertex list; throws InvalidArgument on fewer than two vertices,
/// negative depths or zero-length segments.
void validate_route(const RouteProfile& route);

struct RoutePosition {
  double chainage = 0.0;  // along the route, m
  double lateral = 0.0;   // horizontal distance to the route, m
  double depth = 0.0;     // interpolated burial depth, m
};

/// Nearest point of the route polyline to (x, y).
RoutePosition locate_on_route(const RouteProfile& route, const Eigen::Vector2d& point);

enum MapFlag : unsigned char {
  kClampedToRMin = 1,    // r < r_min, evaluated at r_min
  kOutsideValidity = 2,  // extrapolated beyond r_max or the current range
};

/// B at a seabed point (uT); `flags` receives MapFlag bits.
double seabed_field(const RouteProfile& route, const Eigen::Vector2d& point, unsigned char* flags = nullptr);

/// Cell-centred grid, row-major with x fastest: value(ix, iy) at
/// (x0 + ix * pitch, y0 + iy * pitch).
struct EmissionMap {
  double x0 = 0.0, y0 = 0.0, pitch = 0.0;
  int nx = 0, ny = 0;
  std::vector<double> b_uT;
  std::vector<unsigned char> flags;
  std::vector<double> chainage;  // nearest route chainage per cell
  double current = 0.0;
  std::string label;

  int size() const { return nx * ny; }
  int index(int ix, int iy) const { return iy * nx + ix; }
  Eigen::Vector2d center(int i) const { return {x0 + (i % nx) * pitch, y0 + (i / nx) * pitch}; }
};

/// Grid over the route's bounding box grown by the corridor half width.
/// Cells are evaluated in parallel bands.
EmissionMap map_route(const RouteProfile& route, double corridor_half_width, double grid_pitch);

struct Hotspot {
  std::vector<int> cells;
  double peak_uT = 0.0;
  Eigen::Vector2d peak_location = Eigen::Vector2d::Zero();
  double chainage_begin = 0.0;
  double chainage_end = 0.0;
};

/// 4-connected regions of cells with B >= threshold, by peak descending.
std::vector<Hotspot> detect_hotspots(const EmissionMap& map, double threshold_uT);

/// CSV `easting,northing,B_uT,clamped_flag`; the flag holds the MapFlag bits.
void export_map(const EmissionMap& map, const std::string& path);
/// Rebuilds the grid from an exported file (chainage and metadata are not stored).
EmissionMap import_map(const std::string& path);

/// Route JSON: {"name": ..., "current_A": ..., "vertices": [{"x", "y", "depth"}, ...]}.
/// The emission model is not part of the file.
RouteProfile load_route(const std::string& path);

}  // namespace tcac
