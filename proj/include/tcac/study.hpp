#pragma once

// One-call case runs (mesh, solve, diagnostics, probes) and the design
// substitutions used by parameter sweeps.

#include <string>
#include <vector>

#include "tcac/fem.hpp"

namespace tcac {

struct CaseOptions {
  MeshOptions mesh = MeshOptions::for_resolution(Resolution::Coarse);
  FemOptions fem;
  std::vector<double> probe_radii{0.5};
  double probe_angle = 0.0;  // rad, direction of the probe line in the z = 0 plane
};

struct CaseReport {
  CableDesign design;  // as meshed
  double cell_length = 0.0;
  double cell_rotation = 0.0;
  int num_edges = 0;
  int num_tets = 0;
  std::vector<Complex> phase_currents;
  std::vector<Complex> sheath_currents;
  double sheath_current = 0.0;  // mean |I| over the three sheaths, A
  Losses losses;
  Complex injected_power;
  Impedance impedance;
  double power_balance = 0.0;  // |Re S - losses| / Re S
  double periodic_residual = 0.0;
  double circuit_residual = 0.0;
  int iterations = 1;
  bool converged = true;
  SolveStats stats;
  double seconds = 0.0;
  std::vector<Eigen::Vector3d> probe_points;
  ProbeResult probe;
};

/// Nonlinear armor curves switch to the fixed-point solve automatically.
CaseReport run_case(const CableDesign& design, const OperatingConditions& conditions, const CaseOptions& options);

enum class SweepParameter {
  CoreLay,          // m
  ArmorLay,         // m, every layer
  ArmorMu,          // relative permeability of steel wires
  ArmorConductivity,  // S/m
  SheathThickness,  // m, outer diameter kept
  WireDiameter,     // m, wire count recomputed at constant wire gap
  Frequency,        // Hz, applied to the conditions
};

SweepParameter sweep_parameter_from_string(const std::string& s);
const char* to_string(SweepParameter p);

/// Design with one parameter replaced. Frequency leaves the design as is.
CableDesign apply_parameter(const CableDesign& design, SweepParameter parameter, double value);

struct SweepRow {
  double value = 0.0;
  bool ok = false;
  std::string error;
  CaseReport report;
};

/// One run per value; failures are recorded and the sweep continues. Rows
/// keep the order of `values` whatever the worker count.
std::vector<SweepRow> run_sweep(const CableDesign& design, const OperatingConditions& conditions,
                                const CaseOptions& options, SweepParameter parameter,
                                const std::vector<double>& values, int workers = 1);

}  // namespace tcac
