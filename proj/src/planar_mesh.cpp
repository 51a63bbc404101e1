#include "tcac/planar_mesh.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "delaunay.hpp"
#include "tcac/errors.hpp"

namespace tcac {

namespace {

constexpr double kTwoPi = 2.0 * kPi;

const char* kind_name(RegionKind k) {
  switch (k) {
    case RegionKind::Conductor: return "Conductor";
    case RegionKind::Insulation: return "Insulation";
    case RegionKind::Sheath: return "Sheath";
    case RegionKind::Filler: return "Filler";
    case RegionKind::ArmorWire: return "ArmorWire";
    case RegionKind::PESeparator: return "PESeparator";
    case RegionKind::Jacket: return "Jacket";
    case RegionKind::Medium: return "Medium";
    case RegionKind::StretchLayer: return "StretchLayer";
  }
  return "?";
}

// Radius at which a regular n-gon encloses the same area as the circle of radius r.
double area_radius(double r, int n) {
  const double a = kTwoPi / n;
  return r * std::sqrt(a / std::sin(a));
}

double cross(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c) {
  return (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x();
}

struct Ring {
  std::vector<int> ids;
  std::vector<double> angles;  // polar angle about the cable axis, increasing
};

class Builder {
 public:
  PlanarMesh mesh;

  int node(const Eigen::Vector2d& p, int frame) {
    mesh.nodes.push_back(p);
    mesh.node_frame.push_back(frame);
    return static_cast<int>(mesh.nodes.size()) - 1;
  }

  void tri(int a, int b, int c, const RegionTag& tag, int strip = -1) {
    const double s = cross(mesh.nodes[a], mesh.nodes[b], mesh.nodes[c]);
    const double scale = std::max({(mesh.nodes[b] - mesh.nodes[a]).squaredNorm(),
                                   (mesh.nodes[c] - mesh.nodes[a]).squaredNorm(), 1e-30});
    if (std::abs(s) <= 1e-10 * scale)
      throw Error(ErrorKind::MeshFailure, "degenerate triangle in region " + tag.str());
    if (s < 0) std::swap(b, c);
    mesh.triangles.push_back({a, b, c});
    mesh.tags.push_back(tag);
    mesh.triangle_strip.push_back(strip);
  }

  // Uniform ring about the origin: n nodes at phase + 2 pi i / n.
  Ring ring(double r, int n, double phase, int frame) {
    Ring out;
    for (int i = 0; i < n; ++i) {
      const double a = phase + kTwoPi * i / n;
      out.ids.push_back(node({r * std::cos(a), r * std::sin(a)}, frame));
      out.angles.push_back(a);
    }
    return out;
  }

  // Ring with `per_slot` nodes in each of `slots` slots. Slot k starts at
  // (k - 1/2) * 2pi/slots; node c of a slot sits at fraction (c + offset)/per_slot.
  Ring slot_ring(double r, int slots, int per_slot, double offset, int frame) {
    Ring out;
    const double d = kTwoPi / slots;
    for (int k = 0; k < slots; ++k) {
      for (int c = 0; c < per_slot; ++c) {
        const double a = (k - 0.5) * d + (c + offset) * d / per_slot;
        out.ids.push_back(node({r * std::cos(a), r * std::sin(a)}, frame));
        out.angles.push_back(a);
      }
    }
    return out;
  }

  // Triangulates the annulus between two closed rings by advancing along
  // both in angle. Ties go to the inner ring.
  void zipper(const Ring& in, const Ring& out, const std::function<RegionTag(const Eigen::Vector2d&)>& tag_of) {
    const int na = static_cast<int>(in.ids.size());
    const int nb = static_cast<int>(out.ids.size());
    const double a0 = in.angles[0];
    const double tol = 1e-9;
    auto key = [&](double a) {
      double k = std::fmod(a - a0 + tol, kTwoPi);
      if (k < 0) k += kTwoPi;
      return k - tol;
    };
    std::vector<double> kb(nb);
    for (int j = 0; j < nb; ++j) kb[j] = key(out.angles[j]);
    int jstart = 0;
    for (int j = 1; j < nb; ++j)
      if (kb[j] < kb[jstart]) jstart = j;
    double start_key = kb[jstart];
    if (start_key > tol) {
      // No outer node at a0: start with the last one before it.
      jstart = (jstart + nb - 1) % nb;
      start_key = kb[jstart] - kTwoPi;
    }
    auto in_key = [&](int step) {  // key of in node (0 + step)
      if (step >= na) return kTwoPi;
      return key(in.angles[step]);
    };
    std::vector<double> ob(nb + 1);
    ob[0] = start_key;
    for (int s = 1; s <= nb; ++s) {
      double k = kb[(jstart + s) % nb];
      while (k <= ob[s - 1] + 1e-12) k += kTwoPi;
      ob[s] = k;
    }
    int ia = 0, ib = 0;
    while (ia < na || ib < nb) {
      const int a_cur = in.ids[ia % na], a_next = in.ids[(ia + 1) % na];
      const int b_cur = out.ids[(jstart + ib) % nb], b_next = out.ids[(jstart + ib + 1) % nb];
      bool advance_in;
      if (ia >= na) advance_in = false;
      else if (ib >= nb) advance_in = true;
      else advance_in = in_key(ia + 1) <= ob[ib + 1] + tol;
      if (advance_in) {
        const Eigen::Vector2d c = (mesh.nodes[a_cur] + mesh.nodes[a_next] + mesh.nodes[b_cur]) / 3.0;
        tri(a_cur, a_next, b_cur, tag_of(c));
        ++ia;
      } else {
        const Eigen::Vector2d c = (mesh.nodes[a_cur] + mesh.nodes[b_next] + mesh.nodes[b_cur]) / 3.0;
        tri(a_cur, b_next, b_cur, tag_of(c));
        ++ib;
      }
    }
  }

  // Strip triangulation at z = 0 (flip parameter p = 0).
  void strip(const Ring& in, const Ring& out, int in_frame, int out_frame, const RegionTag& tag) {
    const int m = static_cast<int>(in.ids.size());
    if (static_cast<int>(out.ids.size()) != m)
      throw Error(ErrorKind::MeshFailure, "strip rings differ in node count");
    const int id = static_cast<int>(mesh.strips.size());
    mesh.strips.push_back({in.ids, out.ids, in_frame, out_frame, tag});
    for (int k = 0; k < m; ++k) {
      const int a0 = in.ids[k], a1 = in.ids[(k + 1) % m];
      const int b0 = out.ids[k], b1 = out.ids[(k + 1) % m];
      tri(a0, a1, b0, tag, id);
      tri(b0, b1, a1, tag, id);
    }
  }
};

// Local ring about a core centre, returned as absolute angles about the
// core centre and node ids.
struct CoreRing {
  std::vector<int> ids;
  std::vector<double> angles;  // about the core centre
};

void core_zipper(Builder& b, const CoreRing& in, const CoreRing& out, const RegionTag& tag) {
  Ring ri{in.ids, in.angles}, ro{out.ids, out.angles};
  b.zipper(ri, ro, [&](const Eigen::Vector2d&) { return tag; });
}

struct ArmorGeometry {
  double r_mid, t_w, r_in, r_out;
};

ArmorGeometry armor_geometry(const ArmorLayer& layer, const MeshOptions& opt) {
  const int n = layer.wire_count;
  const double area = 0.25 * kPi * layer.wire_diameter * layer.wire_diameter;
  const double r_mid = layer.wire_circle_radius();
  const double dphi = kTwoPi / (n * opt.slot_cells);
  // Area of n_w chord cells of radial extent t: n_w * r_mid * t * sin(dphi).
  const double t_w = area / (opt.wire_cells * r_mid * std::sin(dphi));
  return {r_mid, t_w, r_mid - 0.5 * t_w, r_mid + 0.5 * t_w};
}

}  // namespace

std::string RegionTag::str() const {
  std::ostringstream os;
  os << kind_name(kind);
  if (a >= 0 && b >= 0) os << '(' << a << ',' << b << ')';
  else if (a >= 0) os << '(' << a << ')';
  return os.str();
}

RegionTag RegionTag::parse(const std::string& text) {
  const auto open = text.find('(');
  const std::string name = text.substr(0, open);
  RegionTag t;
  bool found = false;
  for (int k = 0; k <= static_cast<int>(RegionKind::StretchLayer); ++k) {
    if (name == kind_name(static_cast<RegionKind>(k))) {
      t.kind = static_cast<RegionKind>(k);
      found = true;
    }
  }
  if (!found) throw Error(ErrorKind::ParseError, "unknown region tag '" + text + "'");
  if (open != std::string::npos) {
    const auto close = text.find(')', open);
    if (close == std::string::npos || close + 1 != text.size())
      throw Error(ErrorKind::ParseError, "malformed region tag '" + text + "'");
    std::string inner = text.substr(open + 1, close - open - 1);
    const auto comma = inner.find(',');
    try {
      t.a = std::stoi(inner.substr(0, comma));
      if (comma != std::string::npos) t.b = std::stoi(inner.substr(comma + 1));
    } catch (const std::exception&) {
      throw Error(ErrorKind::ParseError, "malformed region tag '" + text + "'");
    }
  }
  return t;
}

const char* to_string(Resolution r) {
  switch (r) {
    case Resolution::Coarse: return "coarse";
    case Resolution::Medium: return "medium";
    case Resolution::Fine: return "fine";
  }
  return "?";
}

Resolution resolution_from_string(const std::string& s) {
  if (s == "coarse") return Resolution::Coarse;
  if (s == "medium") return Resolution::Medium;
  if (s == "fine") return Resolution::Fine;
  throw Error(ErrorKind::InvalidArgument, "unknown resolution '" + s + "'");
}

MeshOptions MeshOptions::for_resolution(Resolution r) {
  MeshOptions o;
  o.resolution = r;
  switch (r) {
    case Resolution::Coarse:
      o.medium_max_step = 0.2;
      break;
    case Resolution::Medium:
      o.conductor_rings = 4;
      o.insulation_rings = 2;
      o.sheath_layers = 1;
      o.sheath_nodes = 48;
      o.filler_size = 5.5e-3;
      o.wire_layers = 2;
      o.medium_growth = 0.07;
      o.medium_min_nodes = 48;
      o.medium_max_step = 0.12;
      o.stretch_rings = 4;
      o.n_slices = 4;
      break;
    case Resolution::Fine:
      o.conductor_rings = 6;
      o.insulation_rings = 3;
      o.sheath_layers = 2;
      o.sheath_nodes = 60;
      o.filler_size = 4.0e-3;
      o.slot_cells = 6;
      o.wire_cells = 5;
      o.wire_layers = 3;
      o.medium_growth = 0.06;
      o.medium_min_nodes = 56;
      o.medium_max_step = 0.1;
      o.stretch_rings = 6;
      o.n_slices = 4;
      break;
  }
  return o;
}

double PlanarMesh::triangle_area(int t) const {
  const auto& tr = triangles[t];
  return 0.5 * cross(nodes[tr[0]], nodes[tr[1]], nodes[tr[2]]);
}

double default_medium_radius(const CableDesign& design) {
  double d_outer = 2.0 * design.core_bundle_radius();
  for (const auto& l : design.armor_layers) d_outer = std::max(d_outer, l.outer_diameter);
  return std::max(5.0 * d_outer, 6.0);
}

PlanarMesh build_cross_section(const CableDesign& design, Resolution resolution) {
  return build_cross_section(design, MeshOptions::for_resolution(resolution));
}

PlanarMesh build_cross_section(const CableDesign& design, const MeshOptions& opt) {
  if (const auto v = validate_design(design); !v.empty())
    throw Error(ErrorKind::InvalidArgument, "invalid design: " + v.front().message);
  if (opt.conductor_rings < 1 || opt.sheath_nodes < 6 || opt.slot_cells < 2 || opt.wire_cells < 1 ||
      opt.wire_cells >= opt.slot_cells || (opt.slot_cells - opt.wire_cells) % 2 == 0 || opt.wire_layers < 1 ||
      opt.medium_growth <= 0 || opt.stretch_rings < 1 || opt.filler_size <= 0)
    throw Error(ErrorKind::InvalidArgument, "invalid mesh options");

  Builder b;
  PlanarMesh& m = b.mesh;
  m.frame_lay.push_back(design.core_lay_length);
  for (const auto& l : design.armor_layers) m.frame_lay.push_back(l.lay_length);

  const double r_c = 0.5 * design.conductor_diameter;
  const double r_so = 0.5 * design.sheath_outer_diameter;
  const double r_si = design.sheath_inner_radius();
  const double r_t = design.trefoil_radius();
  const double sheath_extent = r_t + r_so;
  const int n_s = opt.sheath_nodes;
  const double r_so_adj = area_radius(r_so, n_s);

  std::vector<ArmorGeometry> ag;
  for (const auto& l : design.armor_layers) ag.push_back(armor_geometry(l, opt));

  // --- outer ring of the core band -------------------------------------------------
  Ring ring_a;
  double r_a;
  if (design.armored()) {
    const double gap = ag[0].r_in - sheath_extent;
    if (gap < 1e-3)
      throw Error(ErrorKind::MeshFailure, "gap between core bundle and armor below 1 mm");
    r_a = ag[0].r_in - 0.5 * gap;
    ring_a = b.slot_ring(r_a, design.armor_layers[0].wire_count, 1, 0.0, 0);
  } else {
    r_a = std::max(sheath_extent + 1.5e-3, design.core_bundle_radius());
    const int n = std::max(24, static_cast<int>(std::ceil(kTwoPi * r_a / opt.filler_size)));
    ring_a = b.ring(area_radius(r_a, n), n, 0.0, 0);
  }

  // --- filler: Delaunay between ring A and the three sheath circles ------------------
  std::array<Eigen::Vector2d, 3> centre;
  for (int k = 0; k < 3; ++k) centre[k] = r_t * Eigen::Vector2d(std::cos(kTwoPi * k / 3), std::sin(kTwoPi * k / 3));

  std::array<std::vector<double>, 3> sheath_angles;  // about each core centre
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < n_s; ++i) sheath_angles[k].push_back(kTwoPi * i / n_s);

  // Interior lattice points, away from every boundary.
  std::vector<Eigen::Vector2d> lattice;
  {
    // The jitter keeps lattice points away from cocircular configurations.
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> jitter(-0.02, 0.02);
    const double h = opt.filler_size;
    const double dy = h * std::sqrt(3.0) / 2.0;
    const double ring_gap = kTwoPi * r_a / ring_a.ids.size();
    const double sheath_gap = kTwoPi * r_so / n_s;
    for (int iy = -static_cast<int>(r_a / dy) - 1; iy * dy <= r_a; ++iy) {
      const double y = iy * dy;
      const double xshift = (iy % 2 == 0) ? 0.0 : 0.5 * h;
      for (int ix = -static_cast<int>(r_a / h) - 2; ix * h <= r_a + h; ++ix) {
        const Eigen::Vector2d p(ix * h + xshift + jitter(rng) * h, y + jitter(rng) * h);
        if (r_a - p.norm() < 0.7 * std::max(h, ring_gap)) continue;
        bool ok = true;
        for (int k = 0; k < 3 && ok; ++k)
          if ((p - centre[k]).norm() - r_so_adj < 0.7 * std::max(h, sheath_gap)) ok = false;
        if (ok) lattice.push_back(p);
      }
    }
  }

  std::vector<std::array<int, 3>> filler_tris;  // indices into `pts`
  std::vector<Eigen::Vector2d> pts;
  std::vector<int> pt_owner;   // -1 ring A, -2 lattice, k = sheath of core k
  std::vector<int> pt_index;   // index within the owner list
  for (int iter = 0;; ++iter) {
    if (iter > 12) throw Error(ErrorKind::MeshFailure, "filler boundary recovery did not converge");
    pts.clear();
    pt_owner.clear();
    pt_index.clear();
    for (std::size_t i = 0; i < ring_a.ids.size(); ++i) {
      pts.push_back(m.nodes[ring_a.ids[i]]);
      pt_owner.push_back(-1);
      pt_index.push_back(static_cast<int>(i));
    }
    for (int k = 0; k < 3; ++k) {
      for (std::size_t i = 0; i < sheath_angles[k].size(); ++i) {
        const double a = sheath_angles[k][i];
        pts.push_back(centre[k] + r_so_adj * Eigen::Vector2d(std::cos(a), std::sin(a)));
        pt_owner.push_back(k);
        pt_index.push_back(static_cast<int>(i));
      }
    }
    for (std::size_t i = 0; i < lattice.size(); ++i) {
      pts.push_back(lattice[i]);
      pt_owner.push_back(-2);
      pt_index.push_back(static_cast<int>(i));
    }
    const auto all = detail::delaunay(pts);
    filler_tris.clear();
    std::set<std::pair<int, int>> edges;
    for (const auto& t : all) {
      const Eigen::Vector2d c = (pts[t[0]] + pts[t[1]] + pts[t[2]]) / 3.0;
      bool inside = false;
      for (int k = 0; k < 3; ++k)
        if ((c - centre[k]).norm() < r_so_adj) inside = true;
      if (inside) continue;
      filler_tris.push_back(t);
      for (int e = 0; e < 3; ++e) edges.insert(std::minmax(t[e], t[(e + 1) % 3]));
    }
    // Every sheath chord must be present; split the missing ones.
    bool refined = false;
    int base = static_cast<int>(ring_a.ids.size());
    for (int k = 0; k < 3; ++k) {
      const int n = static_cast<int>(sheath_angles[k].size());
      std::vector<double> next;
      for (int i = 0; i < n; ++i) {
        next.push_back(sheath_angles[k][i]);
        if (!edges.count(std::minmax(base + i, base + (i + 1) % n))) {
          double a1 = sheath_angles[k][(i + 1) % n];
          if (i + 1 == n) a1 += kTwoPi;
          next.push_back(0.5 * (sheath_angles[k][i] + a1));
          refined = true;
        }
      }
      base += n;
      sheath_angles[k] = next;
    }
    for (std::size_t i = 0; i < ring_a.ids.size(); ++i)
      if (!edges.count(std::minmax<int>(i, (i + 1) % ring_a.ids.size())))
        throw Error(ErrorKind::MeshFailure, "core band outer ring not recovered by the filler triangulation");
    if (!refined) break;
  }

  // Materialise filler nodes: sheath outer rings become the cores' outer rings.
  std::array<CoreRing, 3> sheath_outer;
  std::vector<int> pt_node(pts.size(), -1);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pt_owner[i] == -1) {
      pt_node[i] = ring_a.ids[pt_index[i]];
    } else {
      pt_node[i] = b.node(pts[i], 0);
      if (pt_owner[i] >= 0) {
        sheath_outer[pt_owner[i]].ids.push_back(pt_node[i]);
        sheath_outer[pt_owner[i]].angles.push_back(sheath_angles[pt_owner[i]][pt_index[i]]);
      }
    }
  }
  for (const auto& t : filler_tris) b.tri(pt_node[t[0]], pt_node[t[1]], pt_node[t[2]], RegionTag::filler());

  // --- cores -----------------------------------------------------------------------
  for (int k = 0; k < 3; ++k) {
    auto core_ring = [&](double r, int n) {
      CoreRing cr;
      const double ra = area_radius(r, n);
      for (int i = 0; i < n; ++i) {
        const double a = kTwoPi * i / n;
        cr.ids.push_back(b.node(centre[k] + ra * Eigen::Vector2d(std::cos(a), std::sin(a)), 0));
        cr.angles.push_back(a);
      }
      return cr;
    };
    const int centre_node = b.node(centre[k], 0);
    CoreRing prev = core_ring(r_c / opt.conductor_rings, 6);
    for (int i = 0; i < 6; ++i) b.tri(centre_node, prev.ids[i], prev.ids[(i + 1) % 6], RegionTag::conductor(k));
    for (int j = 2; j <= opt.conductor_rings; ++j) {
      CoreRing next = core_ring(r_c * j / opt.conductor_rings, 6 * j);
      core_zipper(b, prev, next, RegionTag::conductor(k));
      prev = next;
    }
    const int n_cond = 6 * opt.conductor_rings;
    for (int j = 1; j <= opt.insulation_rings; ++j) {
      const double f = static_cast<double>(j) / (opt.insulation_rings + 1);
      const double r = r_c + f * (r_si - r_c);
      const int n = static_cast<int>(std::lround(n_cond + f * (n_s - n_cond)));
      CoreRing next = core_ring(r, n);
      core_zipper(b, prev, next, RegionTag::insulation(k));
      prev = next;
    }
    CoreRing si = core_ring(r_si, n_s);
    core_zipper(b, prev, si, RegionTag::insulation(k));
    prev = si;
    for (int j = 1; j < opt.sheath_layers; ++j) {
      CoreRing next = core_ring(r_si + (r_so - r_si) * j / opt.sheath_layers, n_s);
      core_zipper(b, prev, next, RegionTag::sheath(k));
      prev = next;
    }
    core_zipper(b, prev, sheath_outer[k], RegionTag::sheath(k));
  }

  // --- armor bands ---------------------------------------------------------------
  double r_last = r_a;
  Ring last = ring_a;
  const int n_layers = static_cast<int>(design.armor_layers.size());
  for (int l = 0; l < n_layers; ++l) {
    const auto& layer = design.armor_layers[l];
    const int n = layer.wire_count;
    const int frame = 1 + l;
    const ArmorGeometry& g = ag[l];
    const bool outermost = (l + 1 == n_layers);

    // Inner side: `last` is a core-frame ring of n nodes at slot boundaries.
    if (static_cast<int>(last.ids.size()) != n)
      throw Error(ErrorKind::MeshFailure, "armor strip ring mismatch");
    const double r_ring_in = 0.5 * (r_last + g.r_in);
    Ring ring_in = b.slot_ring(r_ring_in, n, 1, 0.5, frame);
    b.strip(last, ring_in, 0, frame, RegionTag::filler());

    const int s = opt.slot_cells;
    const double offset = 0.5;
    std::vector<Ring> wire_rings;
    for (int j = 0; j <= opt.wire_layers; ++j)
      wire_rings.push_back(b.slot_ring(g.r_in + g.t_w * j / opt.wire_layers, n, s, offset, frame));
    b.zipper(ring_in, wire_rings[0], [](const Eigen::Vector2d&) { return RegionTag::filler(); });

    const double lo = 0.5 * s - 0.5 * opt.wire_cells;
    for (int j = 0; j < opt.wire_layers; ++j) {
      const Ring& ri = wire_rings[j];
      const Ring& ro = wire_rings[j + 1];
      const int total = n * s;
      for (int k = 0; k < n; ++k) {
        const RegionTag wire_tag = layer.is_steel(k) ? RegionTag::wire(l, k) : RegionTag::separator(l, k);
        for (int c = 0; c < s; ++c) {
          const int i0 = k * s + c, i1 = (i0 + 1) % total;
          const bool in_wire = (c + offset) >= lo - 1e-9 && (c + 1 + offset) <= lo + opt.wire_cells + 1e-9;
          const RegionTag tag = in_wire ? wire_tag : RegionTag::filler();
          b.tri(ri.ids[i0], ri.ids[i1], ro.ids[i1], tag);
          b.tri(ri.ids[i0], ro.ids[i1], ro.ids[i0], tag);
        }
      }
    }

    const RegionTag around = outermost ? RegionTag::jacket() : RegionTag::filler();
    double r_ring_out, r_core_side;
    if (outermost) {
      const double gap = design.jacket_outer_radius() - g.r_out;
      if (gap < 1e-3) throw Error(ErrorKind::MeshFailure, "jacket thinner than 1 mm over the armor");
      const double step = std::min(gap / 5.0, 1e-3);
      r_ring_out = g.r_out + step;
      r_core_side = g.r_out + 2.0 * step;
    } else {
      const double gap = ag[l + 1].r_in - g.r_out;
      if (gap < 1e-3) throw Error(ErrorKind::MeshFailure, "armor layers closer than 1 mm");
      r_ring_out = g.r_out + gap / 6.0;
      r_core_side = g.r_out + 2.0 * gap / 6.0;
    }
    Ring ring_out = b.slot_ring(r_ring_out, n, 1, 0.0, frame);
    b.zipper(wire_rings.back(), ring_out, [&](const Eigen::Vector2d&) { return around; });
    Ring core_side = b.slot_ring(r_core_side, n, 1, 0.5, 0);
    b.strip(ring_out, core_side, frame, 0, around);

    if (!outermost) {
      // Core-frame annulus between the layers, ending on the next layer's slot boundaries.
      const double gap = ag[l + 1].r_in - g.r_out;
      const int n1 = design.armor_layers[l + 1].wire_count;
      const double r2 = g.r_out + 3.5 * gap / 6.0;
      Ring next = b.slot_ring(r2, n1, 1, 0.0, 0);
      b.zipper(core_side, next, [](const Eigen::Vector2d&) { return RegionTag::filler(); });
      last = next;
      r_last = r2;
    } else {
      last = core_side;
      r_last = r_core_side;
    }
  }

  // --- jacket, medium and stretch layer -------------------------------------------
  const double r_jacket = design.jacket_outer_radius();
  const double r_med = opt.medium_radius > 0 ? opt.medium_radius : default_medium_radius(design);
  double d_outer = 2.0 * design.core_bundle_radius();
  for (const auto& l : design.armor_layers) d_outer = std::max(d_outer, l.outer_diameter);
  // Thin far rings invert under the cell twist; the map to infinity does not care about the width.
  const double t_stretch = opt.stretch_thickness > 0 ? opt.stretch_thickness : std::max(d_outer, 0.1 * r_med);
  const double r_ext = r_med + t_stretch;
  if (r_med <= r_jacket * 1.5) throw Error(ErrorKind::InvalidArgument, "medium radius too small for the cable");
  m.medium_radius = r_med;
  m.outer_radius = r_ext;

  std::vector<double> radii;
  if (r_jacket > r_last + 0.5e-3) radii.push_back(r_jacket);
  {
    double r = radii.empty() ? r_last : radii.back();
    while (true) {
      const double step = std::clamp(opt.medium_growth * r, 1e-3, opt.medium_max_step);
      if (r + 1.5 * step >= r_med) break;
      r += step;
      radii.push_back(r);
    }
    radii.push_back(r_med);
    for (int j = 1; j <= opt.stretch_rings; ++j) radii.push_back(r_med + t_stretch * j / opt.stretch_rings);
  }
  auto tag_at = [&](const Eigen::Vector2d& p) {
    const double r = p.norm();
    if (r < r_jacket) return RegionTag::jacket();
    if (r < r_med) return RegionTag::medium();
    return RegionTag::stretch();
  };
  int count = static_cast<int>(last.ids.size());
  for (double r : radii) {
    const int by_size = static_cast<int>(std::ceil(kTwoPi / (opt.medium_growth * 1.5)));
    int target = std::max({opt.medium_min_nodes, by_size, static_cast<int>(std::ceil(count / 1.5))});
    target = std::min(target, count);
    Ring next = b.ring(area_radius(r, target), target, 0.0, 0);
    b.zipper(last, next, tag_at);
    last = next;
    count = target;
  }
  m.outer_loop = last.ids;

  // Sanity: orientation and total area.
  double total = 0.0;
  for (int t = 0; t < m.num_triangles(); ++t) {
    const double a = m.triangle_area(t);
    if (a <= 0) throw Error(ErrorKind::MeshFailure, "inverted triangle");
    total += a;
  }
  const int n_out = static_cast<int>(m.outer_loop.size());
  const double expected = 0.5 * n_out * std::pow(area_radius(r_ext, n_out), 2) * std::sin(kTwoPi / n_out);
  if (std::abs(total - expected) > 1e-9 * expected)
    throw Error(ErrorKind::MeshFailure, "cross-section does not tile the disk (area mismatch " +
                                            std::to_string((total - expected) / expected) + ")");
  return m;
}

std::map<RegionTag, double> region_areas(const PlanarMesh& mesh) {
  std::map<RegionTag, double> out;
  for (int t = 0; t < mesh.num_triangles(); ++t) out[mesh.tags[t]] += mesh.triangle_area(t);
  return out;
}

std::map<RegionTag, double> nominal_region_areas(const CableDesign& design) {
  std::map<RegionTag, double> out;
  const double r_c = 0.5 * design.conductor_diameter;
  const double r_so = 0.5 * design.sheath_outer_diameter;
  const double r_si = design.sheath_inner_radius();
  for (int k = 0; k < 3; ++k) {
    out[RegionTag::conductor(k)] = kPi * r_c * r_c;
    out[RegionTag::insulation(k)] = kPi * (r_si * r_si - r_c * r_c);
    out[RegionTag::sheath(k)] = kPi * (r_so * r_so - r_si * r_si);
  }
  for (int l = 0; l < static_cast<int>(design.armor_layers.size()); ++l) {
    const auto& layer = design.armor_layers[l];
    const double a = 0.25 * kPi * layer.wire_diameter * layer.wire_diameter;
    for (int k = 0; k < layer.wire_count; ++k)
      out[layer.is_steel(k) ? RegionTag::wire(l, k) : RegionTag::separator(l, k)] = a;
  }
  return out;
}

}  // namespace tcac
