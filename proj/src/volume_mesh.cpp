#include "tcac/volume_mesh.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include <Eigen/Geometry>

#include "tcac/errors.hpp"

namespace tcac {

namespace {

constexpr double kTwoPi = 2.0 * kPi;

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

double signed_volume(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& c,
                     const Eigen::Vector3d& d) {
  return (b - a).cross(c - a).dot(d - a) / 6.0;
}

// floor(num / den) for den > 0
long floor_div(long num, long den) {
  long q = num / den;
  if ((num % den != 0) && (num < 0)) --q;
  return q;
}

int find_edge(const VolumeMesh& m, int a, int b) {
  if (a > b) std::swap(a, b);
  const std::array<int, 2> key{a, b};
  auto it = std::lower_bound(m.edges.begin(), m.edges.end(), key);
  if (it == m.edges.end() || *it != key) return -1;
  return static_cast<int>(it - m.edges.begin());
}

class Extruder {
 public:
  Extruder(const PlanarMesh& planar, VolumeMesh& mesh, int n_slices)
      : planar_(planar), mesh_(mesh), np_(planar.num_nodes()), n_(n_slices) {}

  int id(int slice, int planar_node) const { return slice * np_ + planar_node; }

  void add_tet(std::array<int, 4> t, const RegionTag& tag, int expected_sign) {
    const auto& x = mesh_.nodes;
    const double v = signed_volume(x[t[0]], x[t[1]], x[t[2]], x[t[3]]);
    if (v * expected_sign <= 0.0)
      throw Error(ErrorKind::InvertedElement,
                  "tetrahedron in region " + tag.str() + " inverted by the twist; use more slices");
    if (v < 0) std::swap(t[2], t[3]);
    mesh_.tets.push_back(t);
    mesh_.tet_tags.push_back(tag);
  }

  // Prism over a planar triangle in slab i, split by the smallest-index rule.
  void prism(std::array<int, 3> tri, int i, const RegionTag& tag) {
    std::sort(tri.begin(), tri.end());
    // Orientation of the triangle as it lies in the bottom slice.
    const auto& x = mesh_.nodes;
    const Eigen::Vector3d& p0 = x[id(i, tri[0])];
    const Eigen::Vector3d e1 = x[id(i, tri[1])] - p0, e2 = x[id(i, tri[2])] - p0;
    const int s = e1.x() * e2.y() - e1.y() * e2.x() > 0 ? 1 : -1;
    const int v0 = id(i, tri[0]), v1 = id(i, tri[1]), v2 = id(i, tri[2]);
    const int w0 = id(i + 1, tri[0]), w1 = id(i + 1, tri[1]), w2 = id(i + 1, tri[2]);
    add_tet({v0, v1, v2, w2}, tag, s);
    add_tet({v0, v1, w1, w2}, tag, -s);
    add_tet({v0, w0, w1, w2}, tag, s);
  }

  // Cell between two strip triangulations: cone every boundary face to a
  // centre node. `ring` is the planar quad in any cyclic order, `bottom` and
  // `top` the two planar triangle pairs covering it.
  void flip_cell(const std::array<int, 4>& ring, const std::array<std::array<int, 3>, 2>& bottom,
                 const std::array<std::array<int, 3>, 2>& top, int i, const RegionTag& tag) {
    auto& x = mesh_.nodes;
    Eigen::Vector3d c = Eigen::Vector3d::Zero();
    for (int v : ring) c += x[id(i, v)] + x[id(i + 1, v)];
    c /= 8.0;
    x.push_back(c);
    const int cid = static_cast<int>(x.size()) - 1;

    auto planar_area = [&](int slice, const std::vector<int>& poly) {
      double a = 0.0;
      for (std::size_t k = 0; k < poly.size(); ++k) {
        const auto& p = x[id(slice, poly[k])];
        const auto& q = x[id(slice, poly[(k + 1) % poly.size()])];
        a += p.x() * q.y() - p.y() * q.x();
      }
      return 0.5 * a;
    };
    // End faces: outward normal is -z at the bottom, +z at the top.
    for (auto t : bottom) {
      if (planar_area(i, {t[0], t[1], t[2]}) < 0) std::swap(t[1], t[2]);
      add_tet({id(i, t[0]), id(i, t[1]), id(i, t[2]), cid}, tag, 1);
    }
    for (auto t : top) {
      if (planar_area(i + 1, {t[0], t[1], t[2]}) < 0) std::swap(t[1], t[2]);
      add_tet({id(i + 1, t[0]), id(i + 1, t[2]), id(i + 1, t[1]), cid}, tag, 1);
    }
    // Side faces, walked counter-clockwise so (u, v) has the cell on its left.
    std::vector<int> poly(ring.begin(), ring.end());
    if (planar_area(i, poly) < 0) std::reverse(poly.begin(), poly.end());
    for (int k = 0; k < 4; ++k) {
      const int u = poly[k], v = poly[(k + 1) % 4];
      const int ub = id(i, u), vb = id(i, v), ut = id(i + 1, u), vt = id(i + 1, v);
      // Outward-oriented face triangles; the centre lies behind them.
      std::array<std::array<int, 3>, 2> f;
      if (u < v) f = {{{ub, vb, vt}, {ub, vt, ut}}};
      else f = {{{ub, vb, ut}, {vb, vt, ut}}};
      for (const auto& t : f) add_tet({t[0], t[2], t[1], cid}, tag, 1);
    }
  }

  void run(const std::vector<double>& rate, double length) {
    const auto& pl = planar_;
    std::vector<double> z(n_ + 1);
    for (int i = 0; i <= n_; ++i) z[i] = (i == n_) ? length : length * i / n_;

    mesh_.nodes.reserve(static_cast<std::size_t>(np_) * (n_ + 1));
    for (int i = 0; i <= n_; ++i) {
      for (int p = 0; p < np_; ++p) {
        const double a = rate[pl.node_frame[p]] * z[i];
        const double c = std::cos(a), s = std::sin(a);
        const auto& q = pl.nodes[p];
        mesh_.nodes.emplace_back(c * q.x() - s * q.y(), s * q.x() + c * q.y(), z[i]);
      }
    }

    // Flip parameter per strip and slice.
    const int ns = static_cast<int>(pl.strips.size());
    std::vector<std::vector<int>> flip(ns, std::vector<int>(n_ + 1, 0));
    for (int k = 0; k < ns; ++k) {
      const auto& st = pl.strips[k];
      const int m = static_cast<int>(st.inner.size());
      const double shift_real = (rate[st.outer_frame] - rate[st.inner_frame]) * length * m / kTwoPi;
      const long shift = std::lround(shift_real);
      if (std::abs(shift_real - shift) > 1e-6)
        throw Error(ErrorKind::InvalidArgument,
                    "cell length does not map strip " + std::to_string(k) + " onto itself (shift " +
                        std::to_string(shift_real) + ")");
      for (int i = 0; i <= n_; ++i) flip[k][i] = static_cast<int>(-floor_div(2 * shift * i + n_, 2L * n_));
      for (int i = 0; i < n_; ++i)
        if (std::abs(flip[k][i + 1] - flip[k][i]) > 1)
          throw Error(ErrorKind::InvalidArgument, "n_slices too small for the armor shift over the cell (need " +
                                                      std::to_string(std::abs(shift)) + ")");
    }

    for (int i = 0; i < n_; ++i) {
      for (int t = 0; t < pl.num_triangles(); ++t)
        if (pl.triangle_strip[t] < 0) prism(pl.triangles[t], i, pl.tags[t]);
      for (int k = 0; k < ns; ++k) {
        const auto& st = pl.strips[k];
        const int m = static_cast<int>(st.inner.size());
        auto a = [&](int j) { return st.inner[((j % m) + m) % m]; };
        auto b = [&](int j) { return st.outer[((j % m) + m) % m]; };
        const int p0 = flip[k][i], p1 = flip[k][i + 1];
        if (p0 == p1) {
          for (int j = 0; j < m; ++j) {
            prism({a(j), a(j + 1), b(j + p0)}, i, st.tag);
            prism({b(j + p0), b(j + p0 + 1), a(j + 1)}, i, st.tag);
          }
          continue;
        }
        const int lo = std::min(p0, p1);
        for (int j = 0; j < m; ++j) {
          const std::array<int, 4> quad{a(j), a(j + 1), b(j + lo + 1), b(j + lo)};
          const std::array<std::array<int, 3>, 2> t_lo{{{a(j), a(j + 1), b(j + lo)}, {b(j + lo), b(j + lo + 1), a(j + 1)}}};
          const std::array<std::array<int, 3>, 2> t_hi{{{a(j), a(j + 1), b(j + lo + 1)}, {b(j + lo), b(j + lo + 1), a(j)}}};
          if (p0 == lo) flip_cell(quad, t_lo, t_hi, i, st.tag);
          else flip_cell(quad, t_hi, t_lo, i, st.tag);
        }
      }
    }
  }

 private:
  const PlanarMesh& planar_;
  VolumeMesh& mesh_;
  int np_;
  int n_;
};

}  // namespace

double VolumeMesh::tet_volume(int t) const {
  const auto& v = tets[t];
  return signed_volume(nodes[v[0]], nodes[v[1]], nodes[v[2]], nodes[v[3]]);
}

std::vector<RegionTag> VolumeMesh::regions() const {
  std::set<RegionTag> s(tet_tags.begin(), tet_tags.end());
  return {s.begin(), s.end()};
}

void finalize_topology(VolumeMesh& m) {
  static constexpr int kLocal[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
  std::vector<std::uint64_t> keys;
  keys.reserve(m.tets.size() * 6);
  for (const auto& t : m.tets)
    for (const auto& e : kLocal) keys.push_back(edge_key(t[e[0]], t[e[1]]));
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  m.edges.resize(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i)
    m.edges[i] = {static_cast<int>(keys[i] >> 32), static_cast<int>(keys[i] & 0xffffffffu)};

  m.tet_edges.resize(m.tets.size());
  m.tet_edge_signs.resize(m.tets.size());
  for (std::size_t t = 0; t < m.tets.size(); ++t) {
    for (int e = 0; e < 6; ++e) {
      const int a = m.tets[t][kLocal[e][0]], b = m.tets[t][kLocal[e][1]];
      const auto it = std::lower_bound(keys.begin(), keys.end(), edge_key(a, b));
      m.tet_edges[t][e] = static_cast<int>(it - keys.begin());
      m.tet_edge_signs[t][e] = a < b ? 1 : -1;
    }
  }

  double r_max = 0.0;
  for (const auto& x : m.nodes) r_max = std::max(r_max, std::hypot(x.x(), x.y()));
  auto outer = [&](int v) { return std::hypot(m.nodes[v].x(), m.nodes[v].y()) > r_max * (1.0 - 1e-9); };
  m.bottom_edges.clear();
  m.top_edges.clear();
  m.outer_edges.clear();
  for (int e = 0; e < m.num_edges(); ++e) {
    const auto& x0 = m.nodes[m.edges[e][0]];
    const auto& x1 = m.nodes[m.edges[e][1]];
    if (x0.z() == 0.0 && x1.z() == 0.0) m.bottom_edges.push_back(e);
    if (x0.z() == m.length && x1.z() == m.length) m.top_edges.push_back(e);
    if (outer(m.edges[e][0]) && outer(m.edges[e][1])) m.outer_edges.push_back(e);
  }
}

VolumeMesh twisted_extrude(const PlanarMesh& planar, const CableDesign& design, double length, int n_slices) {
  if (!(length > 0.0) || !std::isfinite(length)) throw Error(ErrorKind::InvalidArgument, "cell length must be positive");
  if (n_slices < 2) throw Error(ErrorKind::InvalidArgument, "n_slices must be at least 2");
  if (planar.frame_lay.size() != 1 + design.armor_layers.size())
    throw Error(ErrorKind::InvalidArgument, "planar mesh does not belong to this design");

  std::vector<double> rate;
  for (double lay : planar.frame_lay) rate.push_back(std::isfinite(lay) ? kTwoPi / lay : 0.0);

  VolumeMesh m;
  m.length = length;
  m.rotation = rotation_angle(length, design.core_lay_length);
  m.medium_radius = planar.medium_radius;
  Extruder(planar, m, n_slices).run(rate, length);
  // The outer ring sits slightly beyond the nominal radius (area-preserving
  // polygon); the stretch map must reach infinity at the actual boundary.
  for (const auto& x : m.nodes) m.outer_radius = std::max(m.outer_radius, std::hypot(x.x(), x.y()));
  finalize_topology(m);
  m.periodic = periodic_face_map(m, m.rotation);
  return m;
}

namespace {

struct FaceMatch {
  std::vector<int> bottom_of;  // node id -> matched bottom node (top nodes only), -1 otherwise
  double worst = 0.0;
  int unmatched = 0;
};

FaceMatch match_faces(const VolumeMesh& m, double theta) {
  FaceMatch r;
  r.bottom_of.assign(m.nodes.size(), -1);
  std::vector<int> bottom, top;
  for (int v = 0; v < m.num_nodes(); ++v) {
    if (m.nodes[v].z() == 0.0) bottom.push_back(v);
    else if (m.nodes[v].z() == m.length) top.push_back(v);
  }
  const double cell = 1e-6;
  auto cell_of = [&](double x, double y) {
    return std::make_pair(static_cast<long>(std::floor(x / cell)), static_cast<long>(std::floor(y / cell)));
  };
  struct Hash {
    std::size_t operator()(const std::pair<long, long>& p) const {
      return std::hash<long>()(p.first * 1000003L) ^ std::hash<long>()(p.second);
    }
  };
  std::unordered_map<std::pair<long, long>, std::vector<int>, Hash> grid;
  for (int v : bottom) grid[cell_of(m.nodes[v].x(), m.nodes[v].y())].push_back(v);

  const double c = std::cos(-theta), s = std::sin(-theta);
  std::vector<char> used(m.nodes.size(), 0);
  for (int v : top) {
    const auto& p = m.nodes[v];
    const double x = c * p.x() - s * p.y(), y = s * p.x() + c * p.y();
    const auto [cx, cy] = cell_of(x, y);
    int best = -1;
    double best_d = 1e300;
    for (long dx = -1; dx <= 1; ++dx)
      for (long dy = -1; dy <= 1; ++dy) {
        auto it = grid.find({cx + dx, cy + dy});
        if (it == grid.end()) continue;
        for (int w : it->second) {
          const double d = std::hypot(m.nodes[w].x() - x, m.nodes[w].y() - y);
          if (d < best_d) best_d = d, best = w;
        }
      }
    if (best < 0 || best_d > 1e-9 || used[best]) {
      ++r.unmatched;
      for (int w : bottom) best_d = std::min(best_d, std::hypot(m.nodes[w].x() - x, m.nodes[w].y() - y));
      r.worst = std::max(r.worst, best_d);
      continue;
    }
    used[best] = 1;
    r.bottom_of[v] = best;
    r.worst = std::max(r.worst, best_d);
  }
  if (top.size() != bottom.size()) ++r.unmatched;
  return r;
}

}  // namespace

double periodic_node_residual(const VolumeMesh& mesh, double theta) { return match_faces(mesh, theta).worst; }

CellMesh build_cell_mesh(const CableDesign& design, const MeshOptions& options) {
  CellMesh out;
  out.design = design.armored() ? commensurate_design(design) : design;
  const PlanarMesh section = build_cross_section(out.design, options);
  int slices = options.n_slices;
  double length = default_cell_length(out.design);
  if (out.design.armored()) {
    const PeriodicCell cell = periodic_cell(out.design);
    length = cell.length;
    for (int s : cell.wire_shift) slices = std::max(slices, std::abs(s));
  }
  out.mesh = std::make_shared<const VolumeMesh>(twisted_extrude(section, out.design, length, slices));
  return out;
}

CellMesh build_cell_mesh(const CableDesign& design, Resolution resolution) {
  return build_cell_mesh(design, MeshOptions::for_resolution(resolution));
}

std::vector<PeriodicEdge> periodic_face_map(const VolumeMesh& m, double theta) {
  const FaceMatch fm = match_faces(m, theta);
  if (fm.unmatched > 0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%d end-face nodes without a partner, worst residual %.3e m", fm.unmatched,
                  fm.worst);
    throw Error(ErrorKind::NonCongruentFaces, buf);
  }
  std::vector<PeriodicEdge> out;
  out.reserve(m.top_edges.size());
  for (int e : m.top_edges) {
    const int u = fm.bottom_of[m.edges[e][0]], v = fm.bottom_of[m.edges[e][1]];
    const int src = find_edge(m, u, v);
    if (src < 0)
      throw Error(ErrorKind::NonCongruentFaces, "end faces are triangulated differently (edge " + std::to_string(e) + ")");
    out.push_back({e, src, u < v ? 1 : -1});
  }
  if (out.size() != m.bottom_edges.size())
    throw Error(ErrorKind::NonCongruentFaces, "end faces have different edge counts");
  return out;
}

void export_mesh(const VolumeMesh& m, const std::string& path) {
  FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw Error(ErrorKind::Io, "cannot write " + path);
  std::fprintf(f, "TCACMESH 1\n");
  std::fprintf(f, "META length %.17g medium_radius %.17g outer_radius %.17g\n", m.length, m.medium_radius,
               m.outer_radius);
  std::fprintf(f, "NODES %d\n", m.num_nodes());
  for (int i = 0; i < m.num_nodes(); ++i)
    std::fprintf(f, "%d %.17g %.17g %.17g\n", i, m.nodes[i].x(), m.nodes[i].y(), m.nodes[i].z());
  std::fprintf(f, "TETS %d\n", m.num_tets());
  for (int i = 0; i < m.num_tets(); ++i) {
    const auto& t = m.tets[i];
    std::fprintf(f, "%d %d %d %d %d %s\n", i, t[0], t[1], t[2], t[3], m.tet_tags[i].str().c_str());
  }
  std::fprintf(f, "PERIODIC %.17g %zu\n", m.rotation, m.periodic.size());
  for (const auto& p : m.periodic) std::fprintf(f, "%d %d %d\n", p.destination, p.source, p.sign);
  if (std::fclose(f) != 0) throw Error(ErrorKind::Io, "error writing " + path);
}

VolumeMesh import_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path);
  int line_no = 0;
  std::string line;
  auto fail = [&](const std::string& what) -> Error {
    return Error(ErrorKind::ParseError, path + ":" + std::to_string(line_no) + ": " + what);
  };
  auto next = [&]() -> std::istringstream {
    if (!std::getline(in, line)) {
      ++line_no;
      throw fail("unexpected end of file");
    }
    ++line_no;
    return std::istringstream(line);
  };
  auto header = [&](const std::string& name) {
    auto is = next();
    std::string word;
    is >> word;
    if (word != name) throw fail("expected section " + name);
    return is;
  };
  auto read_double = [&](std::istringstream& is) {
    std::string tok;
    if (!(is >> tok)) throw fail("missing number");
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0') throw fail("bad number '" + tok + "'");
    return v;
  };
  auto read_int = [&](std::istringstream& is) {
    long long v;
    if (!(is >> v)) throw fail("missing integer");
    return static_cast<int>(v);
  };

  VolumeMesh m;
  {
    auto is = next();
    std::string magic, version;
    is >> magic >> version;
    if (magic != "TCACMESH") throw fail("not a TCACMESH file");
    if (version != "1") throw fail("unsupported version '" + version + "', expected TCACMESH 1");
  }
  auto is = next();
  std::string word;
  is >> word;
  if (word == "META") {
    std::string key;
    while (is >> key) {
      const double v = read_double(is);
      if (key == "length") m.length = v;
      else if (key == "medium_radius") m.medium_radius = v;
      else if (key == "outer_radius") m.outer_radius = v;
    }
    is = header("NODES");
  } else if (word != "NODES") {
    throw fail("expected section NODES");
  }
  const int nn = read_int(is);
  if (nn < 0) throw fail("negative node count");
  m.nodes.resize(nn);
  for (int i = 0; i < nn; ++i) {
    auto ls = next();
    if (read_int(ls) != i) throw fail("node index out of sequence");
    const double x = read_double(ls), y = read_double(ls), z = read_double(ls);
    m.nodes[i] = {x, y, z};
  }
  is = header("TETS");
  const int nt = read_int(is);
  if (nt < 0) throw fail("negative tet count");
  m.tets.resize(nt);
  m.tet_tags.resize(nt);
  for (int i = 0; i < nt; ++i) {
    auto ls = next();
    if (read_int(ls) != i) throw fail("tet index out of sequence");
    for (int k = 0; k < 4; ++k) {
      const int v = read_int(ls);
      if (v < 0 || v >= nn) throw fail("node id out of range");
      m.tets[i][k] = v;
    }
    std::string tag;
    if (!(ls >> tag)) throw fail("missing region tag");
    try {
      m.tet_tags[i] = RegionTag::parse(tag);
    } catch (const Error& e) {
      throw fail(e.what());
    }
  }
  is = header("PERIODIC");
  m.rotation = read_double(is);
  const int np = read_int(is);
  if (m.length == 0.0)
    for (const auto& x : m.nodes) m.length = std::max(m.length, x.z());
  if (m.outer_radius == 0.0)
    for (const auto& x : m.nodes) m.outer_radius = std::max(m.outer_radius, std::hypot(x.x(), x.y()));
  finalize_topology(m);
  m.periodic.resize(np);
  for (int i = 0; i < np; ++i) {
    auto ls = next();
    const int d = read_int(ls), s = read_int(ls), sg = read_int(ls);
    if (d < 0 || d >= m.num_edges() || s < 0 || s >= m.num_edges()) throw fail("edge id out of range");
    if (sg != 1 && sg != -1) throw fail("sign must be +1 or -1");
    m.periodic[i] = {d, s, sg};
  }
  return m;
}

}  // namespace tcac
