#include "tcac/oracle.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Geometry>

#include "tcac/errors.hpp"

namespace tcac {

namespace {

constexpr int kOrder = 10;
constexpr double kOnFilament = 1e-9;  // m

struct GaussRule {
  std::array<double, kOrder> x{}, w{};
};

const GaussRule& gauss_rule() {
  static const GaussRule rule = [] {
    GaussRule r;
    for (int i = 0; i < kOrder; ++i) {
      double x = std::cos(kPi * (i + 0.75) / (kOrder + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= kOrder; ++k) {
          const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = kOrder * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      r.x[i] = x;
      r.w[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
  }();
  return rule;
}

using Vec3c = Eigen::Vector3cd;

// Field of the straight segment a -> b (or the ray from a along b - a when
// `ray`), per ampere and without mu0 / 4 pi.
Eigen::Vector3d segment_field(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& p, bool ray) {
  const Eigen::Vector3d d = b - a;
  const double len = d.norm();
  if (len == 0.0) return Eigen::Vector3d::Zero();
  const Eigen::Vector3d u = d / len;
  const Eigen::Vector3d w = p - a;
  const double t = w.dot(u);
  const Eigen::Vector3d perp = w - t * u;
  const double h = perp.norm();
  if (h < kOnFilament) {
    if (t >= -kOnFilament && (ray || t <= len + kOnFilament))
      throw Error(ErrorKind::PointOnFilament, "probe point lies on a straight filament");
    return Eigen::Vector3d::Zero();
  }
  const double far = ray ? 1.0 : (len - t) / std::hypot(len - t, h);
  const double near = t / std::hypot(t, h);
  return u.cross(perp) * ((far + near) / (h * h));
}

double helix_distance(const HelixPath& path, const Eigen::Vector3d& p) {
  // The nearest point lies within |z - z_p| <= rho + a.
  const double reach = std::hypot(p.x(), p.y()) + path.axis_radius + 1e-12;
  auto dist = [&](double z) { return (path.point(z) - p).norm(); };
  const int n = 400;
  double best_z = p.z(), best = dist(p.z());
  for (int i = 0; i <= n; ++i) {
    const double z = p.z() - reach + 2.0 * reach * i / n;
    const double d = dist(z);
    if (d < best) {
      best = d;
      best_z = z;
    }
  }
  double lo = best_z - 2.0 * reach / n, hi = best_z + 2.0 * reach / n;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 80; ++it) {
    const double m1 = hi - g * (hi - lo), m2 = lo + g * (hi - lo);
    if (dist(m1) < dist(m2)) hi = m2;
    else lo = m1;
  }
  return std::min(best, dist(0.5 * (lo + hi)));
}

class HelixIntegrator {
 public:
  HelixIntegrator(const std::vector<const Filament*>& helices, const Eigen::Vector3d& p) : helices_(helices), p_(p) {}

  Vec3c integrand(double z) const {
    Vec3c out = Vec3c::Zero();
    for (const Filament* f : helices_) {
      const Eigen::Vector3d r = p_ - f->path.point(z);
      const double n = r.norm();
      out += f->current * (f->path.derivative(z).cross(r) / (n * n * n)).cast<Complex>();
    }
    return out;
  }

  Vec3c panel(double a, double b) const {
    const auto& g = gauss_rule();
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    Vec3c s = Vec3c::Zero();
    for (int i = 0; i < kOrder; ++i) s += g.w[i] * integrand(mid + half * g.x[i]);
    return s * half;
  }

  // Step halving until the refined and coarse panel sums agree.
  Vec3c adaptive(double a, double b, const Vec3c& whole, double tol, int depth) const {
    const double m = 0.5 * (a + b);
    const Vec3c left = panel(a, m), right = panel(m, b);
    const Vec3c both = left + right;
    if ((both - whole).norm() <= tol || depth >= 40) return both;
    return adaptive(a, m, left, 0.5 * tol, depth + 1) + adaptive(m, b, right, 0.5 * tol, depth + 1);
  }

 private:
  const std::vector<const Filament*>& helices_;
  Eigen::Vector3d p_;
};

}  // namespace

Eigen::Vector3cd filament_field(const std::vector<Filament>& filaments, const Eigen::Vector3d& point,
                                const OracleOptions& opt) {
  if (!point.allFinite()) throw Error(ErrorKind::InvalidArgument, "probe point is not finite");
  if (!(opt.abs_tol > 0) || !(opt.span_pitches > 0))
    throw Error(ErrorKind::InvalidArgument, "oracle tolerance and span must be positive");
  constexpr double kScale = kMu0 / (4.0 * kPi);

  Vec3c raw = Vec3c::Zero();
  std::vector<const Filament*> helices;
  double max_pitch = 0.0, min_pitch = kInfinity, max_radius = 0.0;
  Complex helix_current{};
  for (const auto& f : filaments) {
    if (!std::isfinite(std::abs(f.current))) throw Error(ErrorKind::InvalidArgument, "filament current is not finite");
    if (f.path.straight()) {
      const Eigen::Vector3d a(f.path.axis_radius * std::cos(f.path.phase), f.path.axis_radius * std::sin(f.path.phase), 0);
      const Eigen::Vector3d b = a + Eigen::Vector3d::UnitZ();
      // Two opposite rays make the infinite line.
      const Eigen::Vector3d up = segment_field(a, b, point, true);
      const Eigen::Vector3d down = segment_field(a, a - Eigen::Vector3d::UnitZ(), point, true);
      raw += f.current * (up - down).cast<Complex>();
      continue;
    }
    if (helix_distance(f.path, point) < kOnFilament)
      throw Error(ErrorKind::PointOnFilament, "probe point lies on a helical filament");
    helices.push_back(&f);
    max_pitch = std::max(max_pitch, std::abs(f.path.pitch));
    min_pitch = std::min(min_pitch, std::abs(f.path.pitch));
    max_radius = std::max(max_radius, f.path.axis_radius);
    helix_current += f.current;
  }

  if (!helices.empty()) {
    const double half_span = std::max(opt.span_pitches * max_pitch, opt.min_half_span);
    const double z0 = point.z() - half_span, z1 = point.z() + half_span;

    // Panels grow geometrically away from the probe station, capped to
    // resolve the helix turns.
    const double rho = std::hypot(point.x(), point.y());
    const double gap = std::max(std::abs(rho - max_radius), 1e-3);
    const double cap = min_pitch / 12.0;
    std::vector<double> edges;
    {
      double h = std::min(0.5 * gap, cap), z = 0.0;
      std::vector<double> right;
      while (z < half_span) {
        z = std::min(z + h, half_span);
        right.push_back(z);
        h = std::min(h * 1.25, cap);
      }
      std::vector<double> all;
      all.reserve(2 * right.size() + 1);
      for (auto it = right.rbegin(); it != right.rend(); ++it) all.push_back(point.z() - *it);
      all.push_back(point.z());
      for (double r : right) all.push_back(point.z() + r);
      edges.swap(all);
    }
    const HelixIntegrator integ(helices, point);
    const double tol = opt.abs_tol / kScale / static_cast<double>(edges.size());
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
      const double a = edges[i], b = edges[i + 1];
      raw += integ.adaptive(a, b, integ.panel(a, b), tol, 0);
    }

    // Closure: radial leads to the axis and semi-infinite axial tails.
    const Eigen::Vector3d axis0(0, 0, z0), axis1(0, 0, z1);
    for (const Filament* f : helices) {
      raw += f->current * segment_field(axis0, f->path.point(z0), point, false).cast<Complex>();
      raw += f->current * segment_field(f->path.point(z1), axis1, point, false).cast<Complex>();
    }
    raw += helix_current * segment_field(axis1, axis1 + Eigen::Vector3d::UnitZ(), point, true).cast<Complex>();
    raw -= helix_current * segment_field(axis0, axis0 - Eigen::Vector3d::UnitZ(), point, true).cast<Complex>();
  }
  return raw * kScale;
}

Eigen::Vector3cd helix_filament_field(const HelixPath& path, Complex current, const Eigen::Vector3d& point,
                                      const OracleOptions& options) {
  return filament_field({Filament{path, current}}, point, options);
}

ProbeResult cable_filament_field(const CableDesign& design, const std::vector<Complex>& currents,
                                 const std::vector<Eigen::Vector3d>& points, const OracleOptions& options) {
  if (currents.size() != 3 && currents.size() != 6)
    throw Error(ErrorKind::InvalidArgument, "expected 3 core currents or 3 core + 3 sheath currents");
  std::vector<Filament> fil;
  for (std::size_t k = 0; k < currents.size(); ++k)
    fil.push_back({phase_centerline(design, static_cast<int>(k % 3)), currents[k]});
  ProbeResult out;
  for (const auto& p : points) {
    out.b.push_back(filament_field(fil, p, options));
    out.b_meter_uT.push_back(meter_magnitude_uT(out.b.back()));
  }
  return out;
}

Eigen::Vector3cd parallel_threephase_field(double spacing, const std::array<Complex, 3>& currents,
                                           const Eigen::Vector3d& point) {
  if (!(spacing > 0)) throw Error(ErrorKind::InvalidArgument, "trefoil spacing must be > 0");
  const double radius = spacing / std::sqrt(3.0);
  Vec3c b = Vec3c::Zero();
  for (int k = 0; k < 3; ++k) {
    const double a = 2.0 * kPi * k / 3.0;
    const Eigen::Vector2d d = point.head<2>() - radius * Eigen::Vector2d(std::cos(a), std::sin(a));
    const double r2 = d.squaredNorm();
    if (r2 < kOnFilament * kOnFilament) throw Error(ErrorKind::PointOnFilament, "probe point lies on a conductor axis");
    b.x() += currents[k] * (-d.y() / r2);
    b.y() += currents[k] * (d.x() / r2);
  }
  return b * (kMu0 / (2.0 * kPi));
}

}  // namespace tcac
