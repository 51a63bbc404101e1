#pragma once

// Probe output shared by the FEM solver and the filament oracle so both can
// be diffed column by column.

#include <string>
#include <vector>

#include <Eigen/Core>

#include "tcac/cable_model.hpp"

namespace tcac {

struct ProbeResult {
  std::vector<Eigen::Vector3cd> b;  // T, complex RMS phasors
  std::vector<double> b_meter_uT;   // sqrt(|Bx|^2 + |By|^2 + |Bz|^2) in uT
};

/// Meter-equivalent magnitude in uT.
inline double meter_magnitude_uT(const Eigen::Vector3cd& b) { return std::sqrt(b.squaredNorm()) * 1e6; }

/// Columns x, y, z, ReBx, ImBx, ReBy, ImBy, ReBz, ImBz, Bm_uT.
void write_probe_csv(const std::string& path, const std::vector<Eigen::Vector3d>& points, const ProbeResult& result);

/// Parses `start:stop:count` or `start:stop:countlog` into radii (m).
std::vector<double> parse_probe_line(const std::string& spec);

}  // namespace tcac
