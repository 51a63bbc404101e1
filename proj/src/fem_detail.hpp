#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "tcac/fem.hpp"

namespace tcac::detail {

inline constexpr int kEdgeNodes[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};

struct ElementGeometry {
  double volume = 0.0;
  std::array<Eigen::Vector3d, 4> grad;  // barycentric gradients
  std::array<Eigen::Vector3d, 6> curl;  // curl of the globally oriented edge functions
};

struct TetMaterial {
  double sigma = 0.0;  // includes the gauge value where not conductive
  bool conductive = false;
  Complex mu_r{1.0, 0.0};
  bool stretch = false;
};

ElementGeometry element_geometry(const VolumeMesh& mesh, int tet);
Eigen::Matrix<double, 6, 6> mass_matrix(const ElementGeometry& g, const std::array<signed char, 6>& signs);
Eigen::Matrix<double, 6, 1> axial_moments(const ElementGeometry& g, const std::array<signed char, 6>& signs);
/// Integral over the tet of the stretched reluctivity factor (Cartesian frame).
Eigen::Matrix3d stretch_tensor_integral(const VolumeMesh& mesh, int tet, double r_med, double r_ext);
std::vector<TetMaterial> tet_materials(const VolumeMesh& mesh, const CableDesign& design, const MuState& mu_state,
                                       const FemOptions& options);

}  // namespace tcac::detail
