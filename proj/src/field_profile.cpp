#include "tcac/field_profile.hpp"

#include <cmath>
#include <cstdio>
#include <memory>

#include "tcac/errors.hpp"

namespace tcac {

void write_probe_csv(const std::string& path, const std::vector<Eigen::Vector3d>& points, const ProbeResult& r) {
  if (points.size() != r.b.size()) throw Error(ErrorKind::ShapeMismatch, "points and probe values differ in length");
  std::unique_ptr<FILE, int (*)(FILE*)> f(std::fopen(path.c_str(), "w"), &std::fclose);
  if (!f) throw Error(ErrorKind::Io, "cannot write " + path);
  std::fprintf(f.get(), "x,y,z,ReBx,ImBx,ReBy,ImBy,ReBz,ImBz,Bm_uT\n");
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    const auto& b = r.b[i];
    std::fprintf(f.get(), "%.9g,%.9g,%.9g,%.9e,%.9e,%.9e,%.9e,%.9e,%.9e,%.9e\n", p.x(), p.y(), p.z(), b.x().real(),
                 b.x().imag(), b.y().real(), b.y().imag(), b.z().real(), b.z().imag(), r.b_meter_uT[i]);
  }
}

std::vector<double> parse_probe_line(const std::string& spec) {
  const auto bad = [&](const std::string& why) {
    return Error(ErrorKind::ParseError, "probe line '" + spec + "': " + why + " (expected start:stop:count[log])");
  };
  const auto c1 = spec.find(':');
  const auto c2 = c1 == std::string::npos ? c1 : spec.find(':', c1 + 1);
  if (c2 == std::string::npos) throw bad("missing fields");
  std::string count_s = spec.substr(c2 + 1);
  bool log = false;
  if (count_s.size() > 3 && count_s.compare(count_s.size() - 3, 3, "log") == 0) {
    log = true;
    count_s.resize(count_s.size() - 3);
  }
  double a = 0, b = 0;
  int n = 0;
  try {
    std::size_t used = 0;
    a = std::stod(spec.substr(0, c1), &used);
    if (used != c1) throw bad("bad start");
    b = std::stod(spec.substr(c1 + 1, c2 - c1 - 1), &used);
    if (used != c2 - c1 - 1) throw bad("bad stop");
    n = std::stoi(count_s, &used);
    if (used != count_s.size()) throw bad("bad count");
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    throw bad("not a number");
  }
  if (n < 1) throw bad("count must be >= 1");
  if (!(a > 0) || !(b >= a)) throw bad("need 0 < start <= stop");
  std::vector<double> r(n);
  for (int i = 0; i < n; ++i) {
    const double t = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
    r[i] = log ? a * std::pow(b / a, t) : a + (b - a) * t;
  }
  r.back() = n == 1 ? a : b;
  return r;
}

}  // namespace tcac
