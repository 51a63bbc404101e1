#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>

namespace tcac::detail {

/// Bowyer-Watson Delaunay triangulation of a point set. Returns CCW
/// triangles indexing `points`. Quadratic, meant for a few thousand points.
std::vector<std::array<int, 3>> delaunay(const std::vector<Eigen::Vector2d>& points);

}  // namespace tcac::detail
