#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "fem_detail.hpp"
#include "tcac/errors.hpp"
#include "tcac/fem.hpp"

namespace tcac {

namespace {

// Two uniform bucket grids over the xy-plane: a fine one around the cable
// and a coarse one for the large medium elements.
class Locator {
 public:
  explicit Locator(const VolumeMesh& m) : m_(m) {
    fine_half_ = std::min(0.3, m.medium_radius);
    coarse_half_ = m.outer_radius * 1.001;
    fine_.assign(static_cast<std::size_t>(kFine) * kFine, {});
    coarse_.assign(static_cast<std::size_t>(kCoarse) * kCoarse, {});
    const double fine_cell = 2.0 * fine_half_ / kFine;
    for (int t = 0; t < m.num_tets(); ++t) {
      if (m.tet_tags[t].kind == RegionKind::StretchLayer) continue;
      Eigen::Vector2d lo(1e300, 1e300), hi(-1e300, -1e300);
      for (int v : m.tets[t]) {
        lo = lo.cwiseMin(m.nodes[v].head<2>());
        hi = hi.cwiseMax(m.nodes[v].head<2>());
      }
      const bool small = (hi - lo).maxCoeff() < 8.0 * fine_cell;
      const bool inside = lo.minCoeff() > -fine_half_ && hi.maxCoeff() < fine_half_;
      if (small && inside) insert(fine_, kFine, fine_half_, lo, hi, t);
      else insert(coarse_, kCoarse, coarse_half_, lo, hi, t);
    }
  }

  // Containing tet or -1.
  int find(const Eigen::Vector3d& p) const {
    int best = -1;
    double best_score = -1e-9;
    auto scan = [&](const std::vector<std::vector<int>>& grid, int n, double half) {
      const int ix = cell(p.x(), n, half), iy = cell(p.y(), n, half);
      if (ix < 0 || iy < 0) return;
      for (int t : grid[static_cast<std::size_t>(iy) * n + ix]) {
        const double s = min_barycentric(t, p);
        if (s > best_score) {
          best_score = s;
          best = t;
        }
      }
    };
    if (std::abs(p.x()) < fine_half_ && std::abs(p.y()) < fine_half_) scan(fine_, kFine, fine_half_);
    scan(coarse_, kCoarse, coarse_half_);
    return best;
  }

 private:
  static constexpr int kFine = 200;
  static constexpr int kCoarse = 160;

  static int cell(double x, int n, double half) {
    const int i = static_cast<int>(std::floor((x + half) / (2.0 * half) * n));
    return (i < 0 || i >= n) ? -1 : i;
  }

  static void insert(std::vector<std::vector<int>>& grid, int n, double half, const Eigen::Vector2d& lo,
                     const Eigen::Vector2d& hi, int t) {
    auto clampi = [&](double x) {
      return std::clamp(static_cast<int>(std::floor((x + half) / (2.0 * half) * n)), 0, n - 1);
    };
    for (int iy = clampi(lo.y()); iy <= clampi(hi.y()); ++iy)
      for (int ix = clampi(lo.x()); ix <= clampi(hi.x()); ++ix) grid[static_cast<std::size_t>(iy) * n + ix].push_back(t);
  }

  double min_barycentric(int t, const Eigen::Vector3d& p) const {
    const auto& v = m_.tets[t];
    Eigen::Matrix3d d;
    for (int k = 0; k < 3; ++k) d.col(k) = m_.nodes[v[k + 1]] - m_.nodes[v[0]];
    const Eigen::Vector3d l = d.partialPivLu().solve(p - m_.nodes[v[0]]);
    return std::min({1.0 - l.sum(), l(0), l(1), l(2)});
  }

  const VolumeMesh& m_;
  double fine_half_, coarse_half_;
  std::vector<std::vector<int>> fine_, coarse_;
};

}  // namespace

ProbeResult probe_b_field(const FieldSolution& s, const std::vector<Eigen::Vector3d>& points) {
  const auto& m = *s.mesh;
  const Locator loc(m);
  const auto b = element_b_fields(s);

  // node -> tets
  std::vector<int> start(m.num_nodes() + 1, 0);
  for (const auto& t : m.tets)
    for (int v : t) ++start[v + 1];
  for (int i = 0; i < m.num_nodes(); ++i) start[i + 1] += start[i];
  std::vector<int> adj(start.back());
  {
    std::vector<int> fill(start.begin(), start.end() - 1);
    for (int t = 0; t < m.num_tets(); ++t)
      for (int v : m.tets[t]) adj[fill[v]++] = t;
  }

  ProbeResult out;
  for (const auto& p : points) {
    if (!p.allFinite()) throw Error(ErrorKind::InvalidArgument, "probe point is not finite");
    if (std::hypot(p.x(), p.y()) > m.medium_radius)
      throw Error(ErrorKind::PointOutsideDomain, "probe point beyond the physical medium radius");
    const double k = std::floor(p.z() / m.length);
    const double ang = -k * m.rotation;
    const double c = std::cos(ang), sn = std::sin(ang);
    Eigen::Vector3d q(c * p.x() - sn * p.y(), sn * p.x() + c * p.y(), p.z() - k * m.length);
    q.z() = std::clamp(q.z(), 0.0, m.length);
    const int t = loc.find(q);
    if (t < 0) throw Error(ErrorKind::PointOutsideDomain, "probe point not inside any element");

    // Linear least-squares fit in the plane over the same-region vertex patch.
    const RegionTag& tag = m.tet_tags[t];
    std::vector<int> patch;
    for (int v : m.tets[t])
      for (int i = start[v]; i < start[v + 1]; ++i)
        if (m.tet_tags[adj[i]] == tag) patch.push_back(adj[i]);
    std::sort(patch.begin(), patch.end());
    patch.erase(std::unique(patch.begin(), patch.end()), patch.end());
    Eigen::Vector3cd bq = b[t];
    if (patch.size() >= 6) {
      Eigen::MatrixXd a(patch.size(), 3);
      Eigen::MatrixXcd rhs(patch.size(), 3);
      double h = 0.0;
      for (std::size_t i = 0; i < patch.size(); ++i) {
        Eigen::Vector3d cen = Eigen::Vector3d::Zero();
        for (int v : m.tets[patch[i]]) cen += 0.25 * m.nodes[v];
        h = std::max(h, (cen - q).head<2>().norm());
      }
      if (h > 0) {
        for (std::size_t i = 0; i < patch.size(); ++i) {
          Eigen::Vector3d cen = Eigen::Vector3d::Zero();
          for (int v : m.tets[patch[i]]) cen += 0.25 * m.nodes[v];
          const double w = std::sqrt(m.tet_volume(patch[i]));
          a.row(i) << w, w * (cen.x() - q.x()) / h, w * (cen.y() - q.y()) / h;
          rhs.row(i) = w * b[patch[i]].transpose();
        }
        const auto qr = a.colPivHouseholderQr();
        if (qr.rank() == 3) {
          const Eigen::MatrixXd re = qr.solve(Eigen::MatrixXd(rhs.real()));
          const Eigen::MatrixXd im = qr.solve(Eigen::MatrixXd(rhs.imag()));
          for (int c3 = 0; c3 < 3; ++c3) bq(c3) = Complex(re(0, c3), im(0, c3));
        }
      }
    }
    // Rotate back to the probe location.
    const double cb = std::cos(-ang), sb = std::sin(-ang);
    Eigen::Vector3cd bp(cb * bq.x() - sb * bq.y(), sb * bq.x() + cb * bq.y(), bq.z());
    out.b.push_back(bp);
    out.b_meter_uT.push_back(meter_magnitude_uT(bp));
  }
  return out;
}

}  // namespace tcac
