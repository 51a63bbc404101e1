#pragma once

// Biot-Savart field of helical and straight line currents. Used to check the
// FEM on non-magnetic configurations and for quick twisted/parallel studies.

#include <array>
#include <vector>

#include <Eigen/Core>

#include "tcac/cable_model.hpp"
#include "tcac/field_profile.hpp"

namespace tcac {

struct OracleOptions {
  double span_pitches = 40.0;  // integrate +-span_pitches * |pitch| around the probe station
  double min_half_span = 10.0; // m, lower bound on the half span
  double abs_tol = 1e-10;      // T, total quadrature error budget
};

struct Filament {
  HelixPath path;
  Complex current;  // A, RMS phasor
};

/// Superposed field of all filaments. Each helix is integrated over the
/// finite span; beyond it the current returns radially to the cable axis and
/// continues as a semi-infinite straight line. Straight filaments are exact.
Eigen::Vector3cd filament_field(const std::vector<Filament>& filaments, const Eigen::Vector3d& point,
                                const OracleOptions& options = {});

Eigen::Vector3cd helix_filament_field(const HelixPath& path, Complex current, const Eigen::Vector3d& point,
                                      const OracleOptions& options = {});

/// Core filaments on the phase centrelines carrying `currents[0..2]`; when
/// six currents are given the last three are sheath currents on the same
/// paths (a thin tube acts outside like a line current on its axis).
ProbeResult cable_filament_field(const CableDesign& design, const std::vector<Complex>& currents,
                                 const std::vector<Eigen::Vector3d>& points, const OracleOptions& options = {});

/// 2D closed form for three infinite straight conductors on a trefoil of
/// centre spacing `spacing`, phase k at angle 2 pi k / 3.
Eigen::Vector3cd parallel_threephase_field(double spacing, const std::array<Complex, 3>& currents,
                                           const Eigen::Vector3d& point);

}  // namespace tcac
