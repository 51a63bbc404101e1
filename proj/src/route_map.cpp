#include "tcac/route_map.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "tcac/design_io.hpp"
#include "tcac/errors.hpp"

namespace tcac {

void validate_route(const RouteProfile& route) {
  const auto& v = route.vertices;
  if (v.size() < 2) throw Error(ErrorKind::InvalidArgument, "a route needs at least two vertices");
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i].x) || !std::isfinite(v[i].y) || !std::isfinite(v[i].depth))
      throw Error(ErrorKind::InvalidArgument, "route vertex " + std::to_string(i) + " is not finite");
    if (v[i].depth < 0) throw Error(ErrorKind::InvalidArgument, "route vertex " + std::to_string(i) + " has negative depth");
    if (i > 0 && std::hypot(v[i].x - v[i - 1].x, v[i].y - v[i - 1].y) == 0.0)
      throw Error(ErrorKind::InvalidArgument, "route segment " + std::to_string(i - 1) + " has zero length");
  }
}

RoutePosition locate_on_route(const RouteProfile& route, const Eigen::Vector2d& p) {
  const auto& v = route.vertices;
  RoutePosition best;
  best.lateral = INFINITY;
  double start = 0.0;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    const Eigen::Vector2d a(v[i].x, v[i].y), b(v[i + 1].x, v[i + 1].y);
    const Eigen::Vector2d d = b - a;
    const double len = d.norm();
    const double t = std::clamp((p - a).dot(d) / (len * len), 0.0, 1.0);
    const double dist = (a + t * d - p).norm();
    if (dist < best.lateral) {
      best.lateral = dist;
      best.chainage = start + t * len;
      best.depth = (1.0 - t) * v[i].depth + t * v[i + 1].depth;
    }
    start += len;
  }
  return best;
}

double seabed_field(const RouteProfile& route, const Eigen::Vector2d& point, unsigned char* flags) {
  const RoutePosition pos = locate_on_route(route, point);
  const auto& range = route.model.validity;
  double r = std::hypot(pos.depth, pos.lateral);
  unsigned char f = 0;
  if (r < range.r_min) {
    r = range.r_min;
    f |= kClampedToRMin;
  }
  if (!range.contains(route.current, r)) f |= kOutsideValidity;
  if (flags) *flags = f;
  return eval_fit(route.model, route.current, r, true);
}

EmissionMap map_route(const RouteProfile& route, double half_width, double pitch) {
  validate_route(route);
  if (!(pitch > 0) || !(half_width >= 0)) throw Error(ErrorKind::InvalidArgument, "grid pitch must be > 0, corridor >= 0");
  if (!(route.current > 0)) throw Error(ErrorKind::InvalidArgument, "route current must be > 0");
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const auto& v : route.vertices) {
    xmin = std::min(xmin, v.x);
    xmax = std::max(xmax, v.x);
    ymin = std::min(ymin, v.y);
    ymax = std::max(ymax, v.y);
  }
  EmissionMap m;
  m.pitch = pitch;
  m.current = route.current;
  m.label = route.model.label;
  m.x0 = xmin - half_width;
  m.y0 = ymin - half_width;
  m.nx = static_cast<int>(std::floor((xmax + half_width - m.x0) / pitch)) + 1;
  m.ny = static_cast<int>(std::floor((ymax + half_width - m.y0) / pitch)) + 1;
  if (static_cast<double>(m.nx) * m.ny > 5e7) throw Error(ErrorKind::InvalidArgument, "map grid too large; raise the pitch");
  m.b_uT.resize(m.size());
  m.flags.resize(m.size());
  m.chainage.resize(m.size());
  const auto fill = [&](int begin, int end) {
    for (int i = begin; i < end; ++i) {
      const Eigen::Vector2d c = m.center(i);
      m.b_uT[i] = seabed_field(route, c, &m.flags[i]);
      m.chainage[i] = locate_on_route(route, c).chainage;
    }
  };
  // contiguous bands of cells, one per hardware thread
  const int workers = std::clamp(static_cast<int>(std::thread::hardware_concurrency()), 1, std::max(1, m.size() / 4096));
  if (workers == 1) {
    fill(0, m.size());
    return m;
  }
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back(fill, static_cast<int>(static_cast<long long>(m.size()) * w / workers),
                      static_cast<int>(static_cast<long long>(m.size()) * (w + 1) / workers));
  for (auto& t : pool) t.join();
  return m;
}

std::vector<Hotspot> detect_hotspots(const EmissionMap& m, double threshold) {
  std::vector<Hotspot> out;
  std::vector<int> label(m.size(), -1);
  std::vector<int> stack;
  for (int s = 0; s < m.size(); ++s) {
    if (label[s] >= 0 || !(m.b_uT[s] >= threshold)) continue;
    Hotspot h;
    h.peak_uT = -INFINITY;
    h.chainage_begin = INFINITY;
    h.chainage_end = -INFINITY;
    label[s] = static_cast<int>(out.size());
    stack.assign(1, s);
    while (!stack.empty()) {
      const int c = stack.back();
      stack.pop_back();
      h.cells.push_back(c);
      if (m.b_uT[c] > h.peak_uT) {
        h.peak_uT = m.b_uT[c];
        h.peak_location = m.center(c);
      }
      if (!m.chainage.empty()) {
        h.chainage_begin = std::min(h.chainage_begin, m.chainage[c]);
        h.chainage_end = std::max(h.chainage_end, m.chainage[c]);
      }
      const int ix = c % m.nx, iy = c / m.nx;
      const int nb[4][2] = {{ix - 1, iy}, {ix + 1, iy}, {ix, iy - 1}, {ix, iy + 1}};
      for (const auto& q : nb) {
        if (q[0] < 0 || q[0] >= m.nx || q[1] < 0 || q[1] >= m.ny) continue;
        const int n = m.index(q[0], q[1]);
        if (label[n] < 0 && m.b_uT[n] >= threshold) {
          label[n] = label[s];
          stack.push_back(n);
        }
      }
    }
    if (m.chainage.empty()) h.chainage_begin = h.chainage_end = 0.0;
    std::sort(h.cells.begin(), h.cells.end());
    out.push_back(std::move(h));
  }
  std::stable_sort(out.begin(), out.end(), [](const Hotspot& a, const Hotspot& b) { return a.peak_uT > b.peak_uT; });
  return out;
}

void export_map(const EmissionMap& m, const std::string& path) {
  std::unique_ptr<FILE, int (*)(FILE*)> f(std::fopen(path.c_str(), "w"), &std::fclose);
  if (!f) throw Error(ErrorKind::Io, "cannot write " + path);
  std::fprintf(f.get(), "easting,northing,B_uT,clamped_flag\n");
  for (int i = 0; i < m.size(); ++i) {
    const Eigen::Vector2d c = m.center(i);
    std::fprintf(f.get(), "%.17g,%.17g,%.17g,%d\n", c.x(), c.y(), m.b_uT[i], static_cast<int>(m.flags[i]));
  }
}

EmissionMap import_map(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open map file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::ParseError, path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "easting,northing,B_uT,clamped_flag") throw Error(ErrorKind::ParseError, path + ": unexpected header");
  struct Row {
    double x, y, b;
    int flag;
  };
  std::vector<Row> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \r\t") == std::string::npos) continue;
    Row r{};
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%d", &r.x, &r.y, &r.b, &r.flag) != 4)
      throw Error(ErrorKind::ParseError, path + ":" + std::to_string(line_no) + ": malformed row");
    rows.push_back(r);
  }
  EmissionMap m;
  if (rows.empty()) return m;
  // Rows were written x fastest; the first change of y gives nx.
  int nx = 1;
  while (nx < static_cast<int>(rows.size()) && rows[nx].y == rows[0].y) ++nx;
  if (rows.size() % nx != 0) throw Error(ErrorKind::ParseError, path + ": rows do not form a grid");
  m.nx = nx;
  m.ny = static_cast<int>(rows.size()) / nx;
  m.x0 = rows[0].x;
  m.y0 = rows[0].y;
  m.pitch = nx > 1 ? rows[1].x - rows[0].x : (m.ny > 1 ? rows[nx].y - rows[0].y : 0.0);
  for (const auto& r : rows) {
    m.b_uT.push_back(r.b);
    m.flags.push_back(static_cast<unsigned char>(r.flag));
  }
  return m;
}

RouteProfile load_route(const std::string& path) {
  std::ifstream in(resolve_data_file(path));
  if (!in) throw Error(ErrorKind::Io, "cannot open route file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(ss.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::ParseError, std::string("invalid JSON: ") + e.what());
  }
  try {
    RouteProfile r;
    r.name = j.value("name", std::string("route"));
    r.current = j.value("current_A", 0.0);
    for (const auto& v : j.at("vertices")) r.vertices.push_back({v.at("x").get<double>(), v.at("y").get<double>(), v.at("depth").get<double>()});
    validate_route(r);
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("route file: ") + e.what());
  }
}

}  // namespace tcac
