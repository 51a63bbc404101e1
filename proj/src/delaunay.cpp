#include "delaunay.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <utility>

namespace tcac::detail {

namespace {

using Real = long double;

struct Tri {
  std::array<int, 3> v;
  Real cx, cy, r2;
  bool alive;
};

Real orient(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c) {
  return (Real(b.x()) - a.x()) * (Real(c.y()) - a.y()) - (Real(b.y()) - a.y()) * (Real(c.x()) - a.x());
}

Tri make_tri(const std::vector<Eigen::Vector2d>& p, int a, int b, int c) {
  if (orient(p[a], p[b], p[c]) < 0) std::swap(b, c);
  const Real ax = p[a].x(), ay = p[a].y();
  const Real bx = p[b].x() - ax, by = p[b].y() - ay;
  const Real cx = p[c].x() - ax, cy = p[c].y() - ay;
  const Real d = 2 * (bx * cy - by * cx);
  const Real b2 = bx * bx + by * by, c2 = cx * cx + cy * cy;
  const Real ux = (cy * b2 - by * c2) / d;
  const Real uy = (bx * c2 - cx * b2) / d;
  return {{a, b, c}, ax + ux, ay + uy, ux * ux + uy * uy, true};
}

}  // namespace

std::vector<std::array<int, 3>> delaunay(const std::vector<Eigen::Vector2d>& input) {
  const int n = static_cast<int>(input.size());
  std::vector<Eigen::Vector2d> p = input;
  Eigen::Vector2d lo = p.empty() ? Eigen::Vector2d::Zero() : p[0], hi = lo;
  for (const auto& q : p) {
    lo = lo.cwiseMin(q);
    hi = hi.cwiseMax(q);
  }
  // Exactly cocircular inputs (rings) make the incircle test ambiguous; a
  // tiny deterministic perturbation breaks the ties consistently.
  {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double eps = 1e-9 * std::max(1e-12, (hi - lo).maxCoeff());
    for (int i = 0; i < n; ++i) p[i] += eps * Eigen::Vector2d(u(rng), u(rng));
  }
  const Eigen::Vector2d mid = 0.5 * (lo + hi);
  const double span = std::max(1e-12, (hi - lo).maxCoeff()) * 50.0;
  p.push_back(mid + Eigen::Vector2d(-span, -span));
  p.push_back(mid + Eigen::Vector2d(span, -span));
  p.push_back(mid + Eigen::Vector2d(0.0, span));

  std::vector<Tri> tris;
  tris.reserve(4 * n + 8);
  tris.push_back(make_tri(p, n, n + 1, n + 2));

  // Insert in a coarse spatial order so cavities stay small.
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  const double cell = std::max(1e-12, (hi - lo).maxCoeff() / 32.0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const long ra = static_cast<long>((p[a].y() - lo.y()) / cell);
    const long rb = static_cast<long>((p[b].y() - lo.y()) / cell);
    if (ra != rb) return ra < rb;
    const double xa = (ra % 2 == 0) ? p[a].x() : -p[a].x();
    const double xb = (rb % 2 == 0) ? p[b].x() : -p[b].x();
    return xa < xb;
  });

  std::vector<int> bad;
  std::map<std::pair<int, int>, int> edge_count;
  for (int idx : order) {
    const Real px = p[idx].x(), py = p[idx].y();
    bad.clear();
    for (int t = 0; t < static_cast<int>(tris.size()); ++t) {
      const Tri& tr = tris[t];
      if (!tr.alive) continue;
      const Real dx = px - tr.cx, dy = py - tr.cy;
      if (dx * dx + dy * dy < tr.r2 * (1 - 1e-14L)) bad.push_back(t);
    }
    edge_count.clear();
    for (int t : bad) {
      tris[t].alive = false;
      for (int e = 0; e < 3; ++e) {
        int a = tris[t].v[e], b = tris[t].v[(e + 1) % 3];
        auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
        ++edge_count[key];
      }
    }
    for (int t : bad) {
      for (int e = 0; e < 3; ++e) {
        int a = tris[t].v[e], b = tris[t].v[(e + 1) % 3];
        auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
        if (edge_count[key] == 1) tris.push_back(make_tri(p, a, b, idx));
      }
    }
    // Compact occasionally.
    if (tris.size() > 8u * static_cast<std::size_t>(n) + 64) {
      std::vector<Tri> keep;
      keep.reserve(tris.size());
      for (auto& t : tris)
        if (t.alive) keep.push_back(t);
      tris.swap(keep);
    }
  }

  std::vector<std::array<int, 3>> out;
  for (const auto& t : tris) {
    if (!t.alive) continue;
    if (t.v[0] >= n || t.v[1] >= n || t.v[2] >= n) continue;
    out.push_back(t.v);
  }
  return out;
}

}  // namespace tcac::detail
