#include "tcac/fem.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include <Eigen/Dense>
#include <Eigen/UmfPackSupport>

#include "fem_detail.hpp"
#include "tcac/errors.hpp"

namespace tcac {

namespace detail {

ElementGeometry element_geometry(const VolumeMesh& m, int t) {
  ElementGeometry g;
  const auto& v = m.tets[t];
  Eigen::Matrix3d d;
  for (int k = 0; k < 3; ++k) d.col(k) = m.nodes[v[k + 1]] - m.nodes[v[0]];
  g.volume = d.determinant() / 6.0;
  const Eigen::Matrix3d inv = d.inverse();
  for (int k = 0; k < 3; ++k) g.grad[k + 1] = inv.row(k).transpose();
  g.grad[0] = -(g.grad[1] + g.grad[2] + g.grad[3]);
  for (int e = 0; e < 6; ++e) {
    const int i = kEdgeNodes[e][0], j = kEdgeNodes[e][1];
    g.curl[e] = 2.0 * g.grad[i].cross(g.grad[j]) * static_cast<double>(m.tet_edge_signs[t][e]);
  }
  return g;
}

Eigen::Matrix<double, 6, 6> mass_matrix(const ElementGeometry& g, const std::array<signed char, 6>& signs) {
  // integral of lambda_a lambda_b = V (1 + delta_ab) / 20
  auto ll = [&](int a, int b) { return g.volume * (a == b ? 2.0 : 1.0) / 20.0; };
  Eigen::Matrix4d gg;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) gg(a, b) = g.grad[a].dot(g.grad[b]);
  Eigen::Matrix<double, 6, 6> m;
  for (int e = 0; e < 6; ++e) {
    const int i = kEdgeNodes[e][0], j = kEdgeNodes[e][1];
    for (int f = e; f < 6; ++f) {
      const int k = kEdgeNodes[f][0], l = kEdgeNodes[f][1];
      const double v = ll(i, k) * gg(j, l) - ll(i, l) * gg(j, k) - ll(j, k) * gg(i, l) + ll(j, l) * gg(i, k);
      m(e, f) = m(f, e) = v * signs[e] * signs[f];
    }
  }
  return m;
}

Eigen::Matrix<double, 6, 1> axial_moments(const ElementGeometry& g, const std::array<signed char, 6>& signs) {
  // integral of z.W_e = V/4 (d_z lambda_j - d_z lambda_i)
  Eigen::Matrix<double, 6, 1> c;
  for (int e = 0; e < 6; ++e) {
    const int i = kEdgeNodes[e][0], j = kEdgeNodes[e][1];
    c(e) = 0.25 * g.volume * (g.grad[j].z() - g.grad[i].z()) * signs[e];
  }
  return c;
}

Eigen::Matrix3d stretch_tensor_integral(const VolumeMesh& m, int t, double r_med, double r_ext) {
  static constexpr double a = 0.5854101966249685, b = 0.1381966011250105;
  const auto& v = m.tets[t];
  const double vol = std::abs(m.tet_volume(t));
  Eigen::Matrix3d out = Eigen::Matrix3d::Zero();
  for (int q = 0; q < 4; ++q) {
    Eigen::Vector3d x = Eigen::Vector3d::Zero();
    for (int k = 0; k < 4; ++k) x += (k == q ? a : b) * m.nodes[v[k]];
    const double rho = std::hypot(x.x(), x.y());
    double sa = 1.0, sb = 1.0;
    if (rho > r_med) {
      const double rp = r_med + (rho - r_med) * (r_ext - r_med) / (r_ext - rho);
      sa = (r_ext - r_med) * (r_ext - r_med) / ((r_ext - rho) * (r_ext - rho));
      sb = rp / rho;
    }
    const double c = x.x() / rho, s = x.y() / rho;
    Eigen::Matrix3d rot;
    rot << c, -s, 0, s, c, 0, 0, 0, 1;
    const Eigen::Vector3d diag(sa / sb, sb / sa, 1.0 / (sa * sb));
    out += 0.25 * vol * rot * diag.asDiagonal() * rot.transpose();
  }
  return out;
}

std::vector<TetMaterial> tet_materials(const VolumeMesh& mesh, const CableDesign& design, const MuState& mu_state,
                                       const FemOptions& options) {
  std::map<RegionTag, TetMaterial> cache;
  std::vector<TetMaterial> out(mesh.tets.size());
  for (int t = 0; t < mesh.num_tets(); ++t) {
    const RegionTag& tag = mesh.tet_tags[t];
    auto it = cache.find(tag);
    if (it == cache.end()) {
      MaterialProps mat;
      switch (tag.kind) {
        case RegionKind::Conductor: mat = design.conductor_material; break;
        case RegionKind::Sheath: mat = design.sheath_material; break;
        case RegionKind::ArmorWire:
          if (tag.a < 0 || tag.a >= static_cast<int>(design.armor_layers.size()))
            throw Error(ErrorKind::InvalidArgument, "mesh region " + tag.str() + " not in design");
          mat = design.armor_layers[tag.a].material_of(tag.b);
          break;
        default: break;
      }
      TetMaterial tm;
      tm.sigma = mat.conductivity;
      tm.conductive = mat.conductivity > 0.0;
      tm.mu_r = mat.mu_r;
      if (mat.is_nonlinear()) tm.mu_r = mat.curve.front().mu_r;
      if (auto mu = mu_state.find(tag); mu != mu_state.end()) tm.mu_r = mu->second;
      if (tm.sigma < 0.0) throw Error(ErrorKind::SingularMaterial, "negative conductivity in " + tag.str());
      if (tm.mu_r.real() < 1.0 || tm.mu_r.imag() > 0.0)
        throw Error(ErrorKind::SingularMaterial, "relative permeability of " + tag.str() + " has mu' < 1 or gain");
      if (!tm.conductive) tm.sigma = options.sigma_reg;
      tm.stretch = tag.kind == RegionKind::StretchLayer;
      it = cache.emplace(tag, tm).first;
    }
    out[t] = it->second;
  }
  return out;
}

}  // namespace detail

using namespace detail;

std::vector<Circuit> make_circuits(const VolumeMesh& mesh, const CableDesign& design,
                                   const OperatingConditions& conditions) {
  std::vector<Circuit> c;
  for (int k = 0; k < 3; ++k) {
    Circuit ph;
    ph.kind = Circuit::Kind::Phase;
    ph.region = RegionTag::conductor(k);
    ph.current_driven = true;
    ph.current = conditions.phase_currents[k];
    c.push_back(ph);
  }
  for (int k = 0; k < 3; ++k) {
    Circuit sh;
    sh.kind = Circuit::Kind::Sheath;
    sh.region = RegionTag::sheath(k);
    // An insulating sheath has nothing to constrain.
    sh.current_driven = conditions.bonding == Bonding::SinglePoint && design.sheath_material.conductivity > 0.0;
    c.push_back(sh);
  }
  for (const auto& tag : mesh.regions()) {
    if (tag.kind != RegionKind::ArmorWire) continue;
    if (tag.a < 0 || tag.a >= static_cast<int>(design.armor_layers.size()))
      throw Error(ErrorKind::InvalidArgument, "mesh region " + tag.str() + " not in design");
    Circuit w;
    w.kind = Circuit::Kind::Wire;
    w.region = tag;
    c.push_back(w);
  }
  return c;
}

MuState initial_mu_state(const VolumeMesh& mesh, const CableDesign& design) {
  MuState s;
  for (const auto& tag : mesh.regions()) {
    if (tag.kind != RegionKind::ArmorWire) continue;
    const auto mat = design.armor_layers.at(tag.a).material_of(tag.b);
    s[tag] = mat.is_nonlinear() ? mat.curve.front().mu_r : mat.mu_r;
  }
  return s;
}

LinearSystemSpec assemble_system(const VolumeMesh& mesh, const CableDesign& design,
                                 const OperatingConditions& conditions, const MuState& mu_state,
                                 const FemOptions& options) {
  if (!(conditions.frequency > 0.0)) throw Error(ErrorKind::InvalidArgument, "frequency must be positive");
  if (!(options.sigma_reg > 0.0)) throw Error(ErrorKind::InvalidArgument, "sigma_reg must be positive");
  const double omega = conditions.omega();
  const int ne = mesh.num_edges();

  LinearSystemSpec sys;
  sys.omega = omega;
  sys.num_edges = ne;
  sys.circuits = make_circuits(mesh, design, conditions);
  const int nc = static_cast<int>(sys.circuits.size());
  std::map<RegionTag, int> circuit_of;
  for (int k = 0; k < nc; ++k) circuit_of[sys.circuits[k].region] = k;

  const auto mats = tet_materials(mesh, design, mu_state, options);

  std::vector<Eigen::Triplet<Complex>> trip;
  trip.reserve(mesh.tets.size() * 36 + 1000);
  std::vector<Eigen::Triplet<Complex>> ctrip;
  const Complex jw(0.0, omega);
  for (int t = 0; t < mesh.num_tets(); ++t) {
    const auto g = element_geometry(mesh, t);
    const auto& mt = mats[t];
    const auto& edges = mesh.tet_edges[t];
    const Complex inv_mu = 1.0 / mt.mu_r;
    Eigen::Matrix3d nu_int;
    if (mt.stretch) nu_int = stretch_tensor_integral(mesh, t, mesh.medium_radius, mesh.outer_radius);
    else nu_int = Eigen::Matrix3d::Identity() * g.volume;
    const auto mm = mass_matrix(g, mesh.tet_edge_signs[t]);
    for (int e = 0; e < 6; ++e) {
      const Eigen::Vector3d ne_curl = nu_int * g.curl[e];
      for (int f = 0; f < 6; ++f) {
        const Complex v = inv_mu * ne_curl.dot(g.curl[f]) + jw * kMu0 * mt.sigma * mm(e, f);
        trip.emplace_back(edges[e], edges[f], v);
      }
    }
    if (auto it = circuit_of.find(mesh.tet_tags[t]); it != circuit_of.end() && mt.conductive) {
      const int k = it->second;
      const auto c = axial_moments(g, mesh.tet_edge_signs[t]);
      for (int e = 0; e < 6; ++e) ctrip.emplace_back(k, edges[e], mt.sigma * c(e));
      sys.circuits[k].conductance += mt.sigma * g.volume;
    }
  }
  sys.coupling.resize(nc, ne);
  sys.coupling.setFromTriplets(ctrip.begin(), ctrip.end());

  // Circuit rows, symmetric form:
  //   edge rows:    ... - mu0 C_k^T g_k
  //   circuit rows: -mu0 C_k a + mu0 G_k / (j w) g_k = mu0 L I_k / (j w)
  sys.rhs = Eigen::VectorXcd::Zero(ne + nc);
  for (int col = 0; col < sys.coupling.outerSize(); ++col)
    for (SparseMatrixC::InnerIterator it(sys.coupling, col); it; ++it) {
      const int k = static_cast<int>(it.row()), e = static_cast<int>(it.col());
      if (!sys.circuits[k].current_driven) continue;
      trip.emplace_back(e, ne + k, -kMu0 * it.value());
      trip.emplace_back(ne + k, e, -kMu0 * it.value());
    }
  for (int k = 0; k < nc; ++k) {
    const auto& c = sys.circuits[k];
    const double scale = kMu0 * std::max(c.conductance, 1e-30) / omega;
    if (c.current_driven) {
      if (c.conductance <= 0.0)
        throw Error(ErrorKind::SingularMaterial, "current-driven circuit " + c.region.str() + " is not conductive");
      trip.emplace_back(ne + k, ne + k, kMu0 * c.conductance / jw);
      sys.rhs(ne + k) = kMu0 * mesh.length * c.current / jw;
    } else {
      trip.emplace_back(ne + k, ne + k, Complex(scale, 0.0));
    }
  }
  sys.matrix.resize(ne + nc, ne + nc);
  sys.matrix.setFromTriplets(trip.begin(), trip.end());

  sys.dirichlet.assign(ne, 0);
  for (int e : mesh.outer_edges) sys.dirichlet[e] = 1;
  return sys;
}

ConstrainedSystem apply_periodicity(const LinearSystemSpec& sys, const std::vector<PeriodicEdge>& map, double theta) {
  (void)theta;
  const int ne = sys.num_edges;
  const int n = sys.dimension();
  std::vector<int> target(n), sign(n, 1);
  for (int i = 0; i < n; ++i) target[i] = i;
  for (const auto& p : map) {
    if (p.destination < 0 || p.destination >= ne || p.source < 0 || p.source >= ne)
      throw Error(ErrorKind::InvalidArgument, "periodic map refers to unknown edges");
    target[p.destination] = p.source;
    sign[p.destination] = p.sign;
  }
  for (const auto& p : map)
    if (target[p.source] != p.source) throw Error(ErrorKind::InvalidArgument, "periodic map is not a single layer");

  std::vector<int> reduced(n, -1);
  int nr = 0;
  for (int i = 0; i < n; ++i) {
    const bool fixed = i < ne && sys.dirichlet[i];
    if (target[i] == i && !fixed) reduced[i] = nr++;
  }
  std::vector<Eigen::Triplet<double>> pt;
  pt.reserve(n);
  for (int i = 0; i < n; ++i) {
    const int r = reduced[target[i]];
    if (r >= 0 && !(i < ne && sys.dirichlet[i])) pt.emplace_back(i, r, static_cast<double>(sign[i]));
  }
  ConstrainedSystem cs;
  cs.expand.resize(n, nr);
  cs.expand.setFromTriplets(pt.begin(), pt.end());
  const SparseMatrixC p = cs.expand.cast<Complex>();
  const SparseMatrixC pt_ = p.transpose();
  cs.matrix = pt_ * sys.matrix * p;
  cs.matrix.makeCompressed();
  cs.rhs = pt_ * sys.rhs;
  return cs;
}

Eigen::VectorXcd solve_system(const ConstrainedSystem& cs, SolveStats* stats) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  // 64-bit indices: the int variant overflows its memory bookkeeping on large cells.
  using LongMatrix = Eigen::SparseMatrix<Complex, Eigen::ColMajor, SuiteSparse_long>;
  const LongMatrix a = cs.matrix;
  Eigen::UmfPackLU<LongMatrix> lu;
  // The matrix is structurally symmetric; nested dissection keeps 3D fill low.
  lu.umfpackControl()(UMFPACK_STRATEGY) = UMFPACK_STRATEGY_SYMMETRIC;
  lu.umfpackControl()(UMFPACK_ORDERING) = UMFPACK_ORDERING_METIS;
  lu.analyzePattern(a);
  if (lu.info() != Eigen::Success)
    throw Error(ErrorKind::FactorizationFailure, "sparse LU analysis failed (out of memory?)");
  lu.factorize(a);
  if (lu.info() != Eigen::Success) {
    const int code = lu.umfpackFactorizeReturncode();
    throw Error(ErrorKind::FactorizationFailure,
                "sparse LU failed (umfpack status " + std::to_string(code) + ")" +
                    (code == UMFPACK_ERROR_out_of_memory ? ": out of memory, use a coarser mesh"
                                                         : "; check gauge regularization and materials"));
  }
  const auto t1 = clock::now();
  Eigen::VectorXcd x = lu.solve(cs.rhs);
  const auto t2 = clock::now();
  const double bnorm = cs.rhs.norm();
  const double res = bnorm > 0 ? (cs.matrix * x - cs.rhs).norm() / bnorm : (cs.matrix * x).norm();
  if (stats) {
    stats->factor_seconds = std::chrono::duration<double>(t1 - t0).count();
    stats->solve_seconds = std::chrono::duration<double>(t2 - t1).count();
    stats->residual = res;
  }
  if (!x.allFinite()) throw Error(ErrorKind::FactorizationFailure, "solution is not finite");
  return cs.expand.cast<Complex>() * x;
}

FieldSolution solve(std::shared_ptr<const VolumeMesh> mesh, const CableDesign& design,
                    const OperatingConditions& conditions, const MuState& mu_state, const FemOptions& options) {
  if (!mesh) throw Error(ErrorKind::InvalidArgument, "no mesh");
  const auto sys = assemble_system(*mesh, design, conditions, mu_state, options);
  const auto cs = apply_periodicity(sys, mesh->periodic, mesh->rotation);
  FieldSolution s;
  s.mesh = mesh;
  s.design = design;
  s.conditions = conditions;
  s.mu_state = mu_state;
  s.options = options;
  s.circuits = sys.circuits;
  const Eigen::VectorXcd x = solve_system(cs, &s.stats);
  s.edge_values = x.head(sys.num_edges);
  s.gradients = x.tail(static_cast<Eigen::Index>(sys.circuits.size()));
  return s;
}

FieldSolution solve(std::shared_ptr<const VolumeMesh> mesh, const CableDesign& design,
                    const OperatingConditions& conditions, const FemOptions& options) {
  return solve(mesh, design, conditions, initial_mu_state(*mesh, design), options);
}

FieldSolution solve_nonlinear(std::shared_ptr<const VolumeMesh> mesh, const CableDesign& design,
                              const OperatingConditions& conditions, const FemOptions& options) {
  MuState mu = initial_mu_state(*mesh, design);
  bool any_curve = false;
  for (const auto& l : design.armor_layers) any_curve = any_curve || l.wire_material.is_nonlinear();
  FieldSolution s = solve(mesh, design, conditions, mu, options);
  if (!any_curve) return s;

  constexpr int kMaxIterations = 25;
  constexpr double kTolerance = 1e-3;
  for (int it = 1;; ++it) {
    // Mean |H| per wire, |H| the RMS resultant of the complex components.
    const auto b = element_b_fields(s);
    std::map<RegionTag, std::pair<double, double>> acc;  // sum |H| V, sum V
    for (int t = 0; t < mesh->num_tets(); ++t) {
      const auto& tag = mesh->tet_tags[t];
      auto m = mu.find(tag);
      if (m == mu.end()) continue;
      const double h = b[t].norm() / (kMu0 * std::abs(m->second));
      const double v = mesh->tet_volume(t);
      acc[tag].first += h * v;
      acc[tag].second += v;
    }
    double change = 0.0;
    for (auto& [tag, value] : mu) {
      const auto mat = design.armor_layers.at(tag.a).material_of(tag.b);
      if (!mat.is_nonlinear()) continue;
      const auto& a = acc[tag];
      const double h = a.second > 0 ? a.first / a.second : 0.0;
      const Complex target = permeability_at(mat, h);
      const Complex next = value + 0.5 * (target - value);
      change = std::max(change, std::abs(next - value) / std::abs(value));
      value = next;
    }
    s.iterations = it;
    if (change < kTolerance) {
      s.converged = true;
      return s;
    }
    if (it >= kMaxIterations) {
      s.converged = false;
      return s;
    }
    const int iterations = it;
    s = solve(mesh, design, conditions, mu, options);
    s.iterations = iterations + 1;
  }
}

std::vector<Eigen::Vector3cd> element_b_fields(const FieldSolution& s) {
  const auto& m = *s.mesh;
  std::vector<Eigen::Vector3cd> out(m.tets.size());
  for (int t = 0; t < m.num_tets(); ++t) {
    const auto g = element_geometry(m, t);
    Eigen::Vector3cd b = Eigen::Vector3cd::Zero();
    for (int e = 0; e < 6; ++e) b += s.edge_values(m.tet_edges[t][e]) * g.curl[e].cast<Complex>();
    out[t] = b;
  }
  return out;
}

std::vector<Complex> conductor_currents(const FieldSolution& s) {
  const auto& m = *s.mesh;
  const int nc = static_cast<int>(s.circuits.size());
  std::map<RegionTag, int> circuit_of;
  for (int k = 0; k < nc; ++k) circuit_of[s.circuits[k].region] = k;
  std::vector<Complex> axial(nc, 0.0);  // integral of sigma A_z
  std::vector<double> conductance(nc, 0.0);
  const auto mats = tet_materials(m, s.design, s.mu_state, s.options);
  for (int t = 0; t < m.num_tets(); ++t) {
    auto it = circuit_of.find(m.tet_tags[t]);
    if (it == circuit_of.end() || !mats[t].conductive) continue;
    const auto g = element_geometry(m, t);
    const auto c = axial_moments(g, m.tet_edge_signs[t]);
    Complex az = 0.0;
    for (int e = 0; e < 6; ++e) az += c(e) * s.edge_values(m.tet_edges[t][e]);
    axial[it->second] += mats[t].sigma * az;
    conductance[it->second] += mats[t].sigma * g.volume;
  }
  std::vector<Complex> out(nc);
  const Complex jw(0.0, s.omega());
  for (int k = 0; k < nc; ++k) out[k] = (conductance[k] * s.gradients(k) - jw * axial[k]) / m.length;
  return out;
}

namespace {

struct EnergyTerms {
  Losses losses;
  double reactive = 0.0;
};

EnergyTerms energy_terms(const FieldSolution& s) {
  const auto& m = *s.mesh;
  std::map<RegionTag, int> circuit_of;
  for (int k = 0; k < static_cast<int>(s.circuits.size()); ++k) circuit_of[s.circuits[k].region] = k;
  const auto mats = tet_materials(m, s.design, s.mu_state, s.options);
  const double w = s.omega();
  EnergyTerms out;
  for (int t = 0; t < m.num_tets(); ++t) {
    const auto g = element_geometry(m, t);
    const auto& mt = mats[t];
    Eigen::Matrix<Complex, 6, 1> a;
    for (int e = 0; e < 6; ++e) a(e) = s.edge_values(m.tet_edges[t][e]);
    const auto mm = mass_matrix(g, m.tet_edge_signs[t]);
    const double a_sq = (a.adjoint() * mm.cast<Complex>() * a)(0).real();
    Complex g_k = 0.0;
    Complex az = 0.0;
    if (auto it = circuit_of.find(m.tet_tags[t]); it != circuit_of.end() && mt.conductive) {
      g_k = s.gradients(it->second);
      const auto c = axial_moments(g, m.tet_edge_signs[t]);
      for (int e = 0; e < 6; ++e) az += c(e) * a(e);
    }
    // integral |g z - j w A|^2
    const Complex u_z = Complex(0.0, w) * az;
    const double e_sq = std::norm(g_k) * g.volume - 2.0 * (g_k * std::conj(u_z)).real() + w * w * a_sq;
    double p = mt.sigma * e_sq;

    Eigen::Vector3cd b = Eigen::Vector3cd::Zero();
    for (int e = 0; e < 6; ++e) b += a(e) * g.curl[e].cast<Complex>();
    Eigen::Matrix3d nu_int = mt.stretch ? stretch_tensor_integral(m, t, m.medium_radius, m.outer_radius)
                                        : Eigen::Matrix3d::Identity() * g.volume;
    const double b_sq = (b.adjoint() * nu_int.cast<Complex>() * b)(0).real();
    const Complex nu = 1.0 / (kMu0 * mt.mu_r);
    p += w * nu.imag() * b_sq;
    out.reactive += w * nu.real() * b_sq;

    switch (m.tet_tags[t].kind) {
      case RegionKind::Conductor: out.losses.conductors += p; break;
      case RegionKind::Sheath: out.losses.sheaths += p; break;
      case RegionKind::ArmorWire: out.losses.armor += p; break;
      default: out.losses.other += p; break;
    }
  }
  const double l = m.length;
  out.losses.conductors /= l;
  out.losses.sheaths /= l;
  out.losses.armor /= l;
  out.losses.other /= l;
  out.reactive /= l;
  return out;
}

}  // namespace

Losses region_losses(const FieldSolution& s) { return energy_terms(s).losses; }

double reactive_power(const FieldSolution& s) { return energy_terms(s).reactive; }

Complex injected_power(const FieldSolution& s) {
  const auto currents = conductor_currents(s);
  Complex total = 0.0;
  for (std::size_t k = 0; k < s.circuits.size(); ++k) total += s.gradients(k) * std::conj(currents[k]);
  return total;
}

Impedance series_impedance(const FieldSolution& s) {
  double i_sq = 0.0;
  for (const auto& c : s.conditions.phase_currents) i_sq += std::norm(c);
  if (i_sq <= 0.0) throw Error(ErrorKind::DivisionByZero, "impedance needs non-zero phase currents");
  const Complex z = injected_power(s) / i_sq;  // Ohm/m
  return {z.real() * 1e6, z.imag() * 1e6};
}

double periodic_constraint_residual(const FieldSolution& s) {
  const double scale = s.edge_values.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  double worst = 0.0;
  for (const auto& p : s.mesh->periodic)
    worst = std::max(worst, std::abs(s.edge_values(p.destination) - double(p.sign) * s.edge_values(p.source)));
  return worst / scale;
}

double circuit_constraint_residual(const FieldSolution& s) {
  const auto currents = conductor_currents(s);
  double scale = 0.0, worst = 0.0;
  for (const auto& c : s.conditions.phase_currents) scale = std::max(scale, std::abs(c));
  if (scale == 0.0) scale = 1.0;
  for (std::size_t k = 0; k < s.circuits.size(); ++k)
    if (s.circuits[k].current_driven) worst = std::max(worst, std::abs(currents[k] - s.circuits[k].current));
  return worst / scale;
}

}  // namespace tcac
