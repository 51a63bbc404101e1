#pragma once

// Frequency-domain eddy-current solver on the periodic cell. Unknowns are
// the circulations of A along mesh edges (lowest-order Whitney elements) and
// one axial driving gradient per conductive circuit.

#include <map>
#include <memory>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "tcac/cable_model.hpp"
#include "tcac/field_profile.hpp"
#include "tcac/volume_mesh.hpp"

namespace tcac {

using SparseMatrixC = Eigen::SparseMatrix<Complex>;
using MuState = std::map<RegionTag, Complex>;

struct FemOptions {
  double sigma_reg = 1.0;  // S/m, gauge conductivity in non-conducting regions
};

struct Circuit {
  enum class Kind { Phase, Sheath, Wire };
  Kind kind = Kind::Phase;
  RegionTag region;
  bool current_driven = false;  // else shorted: driving gradient fixed at zero
  Complex current{};            // prescribed current when current_driven, A
  double conductance = 0.0;     // integral of sigma over the region in the cell, S m
};

/// Builds the circuit list for a mesh: three phases, three sheaths, then
/// every steel armor wire present in the mesh.
std::vector<Circuit> make_circuits(const VolumeMesh& mesh, const CableDesign& design,
                                   const OperatingConditions& conditions);

/// Relative permeability of every magnetic region at the start of a solve.
MuState initial_mu_state(const VolumeMesh& mesh, const CableDesign& design);

struct LinearSystemSpec {
  SparseMatrixC matrix;     // (edges + circuits)^2, complex symmetric, scaled by mu0
  Eigen::VectorXcd rhs;
  int num_edges = 0;
  std::vector<Circuit> circuits;
  std::vector<char> dirichlet;   // per edge, tangential A = 0 on the outer boundary
  SparseMatrixC coupling;        // circuits x edges: integral of sigma z.W_e
  double omega = 0.0;

  int dimension() const { return matrix.rows(); }
};

LinearSystemSpec assemble_system(const VolumeMesh& mesh, const CableDesign& design,
                                 const OperatingConditions& conditions, const MuState& mu_state,
                                 const FemOptions& options = {});

/// System restricted to the free unknowns: destination edges are replaced by
/// their (signed) source edges, Dirichlet edges dropped. For edge DOFs the
/// rotation of the vector value is implicit: the circulation of A along an
/// edge is invariant when both the edge and the field are rotated.
struct ConstrainedSystem {
  SparseMatrixC matrix;
  Eigen::VectorXcd rhs;
  Eigen::SparseMatrix<double> expand;  // full = expand * reduced
};

ConstrainedSystem apply_periodicity(const LinearSystemSpec& system, const std::vector<PeriodicEdge>& map,
                                    double theta);

struct SolveStats {
  double factor_seconds = 0.0;
  double solve_seconds = 0.0;
  double residual = 0.0;  // relative, of the constrained system
};

/// Direct sparse solve of the constrained system. Returns full-length unknowns.
Eigen::VectorXcd solve_system(const ConstrainedSystem& system, SolveStats* stats = nullptr);

struct FieldSolution {
  std::shared_ptr<const VolumeMesh> mesh;
  CableDesign design;
  OperatingConditions conditions;
  MuState mu_state;
  FemOptions options;
  std::vector<Circuit> circuits;
  Eigen::VectorXcd edge_values;  // A circulations, Wb
  Eigen::VectorXcd gradients;    // per circuit, V/m
  SolveStats stats;
  int iterations = 1;
  bool converged = true;

  double omega() const { return conditions.omega(); }
};

FieldSolution solve(std::shared_ptr<const VolumeMesh> mesh, const CableDesign& design,
                    const OperatingConditions& conditions, const MuState& mu_state,
                    const FemOptions& options = {});

/// Solve with permeabilities taken from the constant values of the design.
FieldSolution solve(std::shared_ptr<const VolumeMesh> mesh, const CableDesign& design,
                    const OperatingConditions& conditions, const FemOptions& options = {});

/// Fixed point on the armor permeability: per wire, mu follows the tabulated
/// curve at the wire's mean |H|, with under-relaxation 0.5. Stops when the
/// largest relative change of mu is below 1e-3; after 25 iterations the last
/// iterate is returned with converged = false.
FieldSolution solve_nonlinear(std::shared_ptr<const VolumeMesh> mesh, const CableDesign& design,
                              const OperatingConditions& conditions, const FemOptions& options = {});

// ---- post-processing ----------------------------------------------------------

/// Flux density of each tetrahedron (mesh coordinates), T.
std::vector<Eigen::Vector3cd> element_b_fields(const FieldSolution& solution);

/// B at arbitrary points; z is reduced into the cell with the rotated
/// periodicity. Points beyond the physical medium raise PointOutsideDomain.
ProbeResult probe_b_field(const FieldSolution& solution, const std::vector<Eigen::Vector3d>& points);

/// Net axial current of every circuit, same order as solution.circuits.
std::vector<Complex> conductor_currents(const FieldSolution& solution);

struct Losses {
  double conductors = 0.0;  // W/m
  double sheaths = 0.0;
  double armor = 0.0;
  double other = 0.0;       // gauge-regularization dissipation
  double total() const { return conductors + sheaths + armor + other; }
};

Losses region_losses(const FieldSolution& solution);

/// Complex power injected by the driving gradients per metre, VA/m.
Complex injected_power(const FieldSolution& solution);

/// Time-average magnetic term omega * integral(nu' |B|^2) per metre.
double reactive_power(const FieldSolution& solution);

struct Impedance {
  double resistance = 0.0;  // mOhm/km
  double reactance = 0.0;   // mOhm/km
};

/// Positive-sequence series impedance from the complex power of a balanced solve.
Impedance series_impedance(const FieldSolution& solution);

/// max |a_dest - sign * a_src| / max |a|.
double periodic_constraint_residual(const FieldSolution& solution);

/// Largest |I_k - I_prescribed| / max(|I_prescribed|) over current-driven circuits.
double circuit_constraint_residual(const FieldSolution& solution);

}  // namespace tcac
