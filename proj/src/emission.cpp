#include "tcac/emission.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "lsq.hpp"
#include "tcac/design_io.hpp"
#include "tcac/errors.hpp"

namespace tcac {

namespace {

using json = nlohmann::json;

// log10 B of the k-model at x = log10 r.
double log_model(const Eigen::Vector4d& k, double x) { return k(0) * std::exp(k(1) * x) + k(2) * std::exp(k(3) * x); }

// Non-finite trial points get a large but finite residual so LM backs off.
double guard(double v) { return std::isfinite(v) ? v : 1e3; }

struct Curve {
  std::vector<double> x, y;
};

double curve_cost(const Curve& c, const Eigen::Vector4d& k) {
  double s = 0.0;
  for (std::size_t j = 0; j < c.x.size(); ++j) s += std::pow(guard(log_model(k, c.x[j]) - c.y[j]), 2);
  return s;
}

// Exponents on a grid, amplitudes by linear least squares.
Eigen::Vector4d separable_start(const Curve& c) {
  const int n = static_cast<int>(c.x.size());
  Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(c.y.data(), n);
  Eigen::Vector4d best(0, 0, 0, 0);
  double best_cost = INFINITY;
  for (double a = -6.0; a <= 6.0 + 1e-9; a += 0.2) {
    for (double b = -6.0; b < a - 0.1; b += 0.2) {
      Eigen::MatrixXd m(n, 2);
      for (int j = 0; j < n; ++j) m.row(j) << std::exp(a * c.x[j]), std::exp(b * c.x[j]);
      const Eigen::Vector2d amp = m.colPivHouseholderQr().solve(y);
      const double cost = (m * amp - y).squaredNorm();
      if (cost < best_cost) {
        best_cost = cost;
        best << amp(0), a, amp(1), b;
      }
    }
  }
  return best;
}

Eigen::Vector4d refine_curve(const Curve& c, Eigen::Vector4d k) {
  Eigen::VectorXd x = k;
  detail::least_squares(
      [&](const Eigen::VectorXd& p, Eigen::VectorXd& r) {
        for (std::size_t j = 0; j < c.x.size(); ++j) r(j) = guard(log_model(p, c.x[j]) - c.y[j]);
      },
      static_cast<int>(c.x.size()), x);
  k = x;
  // The model is symmetric under swapping the two terms; keep the faster-growing one first.
  if (k(1) < k(3)) {
    std::swap(k(0), k(2));
    std::swap(k(1), k(3));
  }
  return k;
}

// alpha1 I^alpha2 + alpha3 through (I_j, k_j).
Eigen::Vector3d fit_power_law(const std::vector<double>& current, const std::vector<double>& k) {
  const int n = static_cast<int>(current.size());
  const Eigen::VectorXd kv = Eigen::Map<const Eigen::VectorXd>(k.data(), n);
  Eigen::Vector3d best(0, 0, kv.mean());
  double best_cost = (kv.array() - kv.mean()).square().sum();
  for (double e = -3.0; e <= 3.0 + 1e-9; e += 0.01) {
    if (std::abs(e) < 1e-6) continue;
    Eigen::MatrixXd m(n, 2);
    for (int j = 0; j < n; ++j) m.row(j) << std::pow(current[j], e), 1.0;
    const Eigen::Vector2d c = m.colPivHouseholderQr().solve(kv);
    const double cost = (m * c - kv).squaredNorm();
    if (cost < best_cost) {
      best_cost = cost;
      best << c(0), e, c(1);
    }
  }
  Eigen::VectorXd x = best;
  detail::least_squares(
      [&](const Eigen::VectorXd& p, Eigen::VectorXd& r) {
        for (int j = 0; j < n; ++j) r(j) = guard(p(0) * std::pow(current[j], p(1)) + p(2) - k[j]);
      },
      n, x);
  return x;
}

double log_cost(const EmissionFit& fit, const MFProfileSet& s) {
  double c = 0.0;
  for (const auto& p : s) c += std::pow(guard(std::log10(eval_fit(fit, p.current, p.r, true)) - std::log10(p.b_uT)), 2);
  return c;
}

bool same(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(std::abs(a), std::abs(b)); }

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    out.push_back(cell);
  }
  return out;
}

}  // namespace

Eigen::Vector4d k_coefficients(const EmissionFit& fit, double current) {
  Eigen::Vector4d k;
  for (int i = 0; i < 4; ++i) k(i) = fit.alpha(0, i) * std::pow(current, fit.alpha(1, i)) + fit.alpha(2, i);
  return k;
}

double eval_k(const Eigen::Vector4d& k, double r) { return std::pow(10.0, log_model(k, std::log10(r))); }

double eval_fit(const EmissionFit& fit, double current, double r, bool force) {
  if (!(current > 0) || !(r > 0)) throw Error(ErrorKind::InvalidArgument, "current and distance must be > 0");
  if (!force && !fit.validity.contains(current, r)) {
    std::ostringstream msg;
    msg << "I = " << current << " A, r = " << r << " m outside the validity range of '" << fit.label << "' (r in ["
        << fit.validity.r_min << ", " << fit.validity.r_max << "] m, I in [" << fit.validity.current_min << ", "
        << fit.validity.current_max << "] A)";
    throw Error(ErrorKind::OutOfValidityRange, msg.str());
  }
  return eval_k(k_coefficients(fit, current), r);
}

FitQuality fit_quality(const EmissionFit& fit, const MFProfileSet& profiles) {
  FitQuality q;
  if (profiles.empty()) return q;
  double mean = 0.0;
  for (const auto& p : profiles) mean += std::log10(p.b_uT);
  mean /= static_cast<double>(profiles.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (const auto& p : profiles) {
    const double b = eval_fit(fit, p.current, p.r, true);
    const double e = (b - p.b_uT) / p.b_uT;
    q.eps.push_back(e);
    q.max_abs_eps = std::max(q.max_abs_eps, std::abs(e));
    ss_res += std::pow(std::log10(b) - std::log10(p.b_uT), 2);
    ss_tot += std::pow(std::log10(p.b_uT) - mean, 2);
  }
  q.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : (ss_res == 0 ? 1.0 : 0.0);
  return q;
}

FitResult fit_coefficients(const MFProfileSet& profiles, const FitOptions& options) {
  std::map<double, Curve> by_current;
  for (const auto& p : profiles) {
    if (!(p.current > 0) || !(p.r > 0) || !(p.b_uT > 0))
      throw Error(ErrorKind::InvalidArgument, "fitting needs I > 0, r > 0 and B > 0 in every sample");
    auto& c = by_current[p.current];
    c.x.push_back(std::log10(p.r));
    c.y.push_back(std::log10(p.b_uT));
  }
  if (by_current.size() < 3)
    throw Error(ErrorKind::FitDivergence, "stage 1: need at least 3 distinct currents, got " +
                                              std::to_string(by_current.size()));
  for (const auto& [i, c] : by_current) {
    std::vector<double> xs = c.x;
    std::sort(xs.begin(), xs.end());
    const auto distinct = std::unique(xs.begin(), xs.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; });
    if (distinct - xs.begin() < 5) {
      std::ostringstream msg;
      msg << "stage 1: I = " << i << " A has " << (distinct - xs.begin()) << " distinct distances, need 5";
      throw Error(ErrorKind::FitDivergence, msg.str());
    }
  }

  FitResult out;
  std::ostringstream trace;
  // Stage 1, continued from the previous current so k_i(I) stays on one branch.
  std::optional<Eigen::Vector4d> previous;
  for (const auto& [current, curve] : by_current) {
    Eigen::Vector4d k = refine_curve(curve, separable_start(curve));
    double cost = curve_cost(curve, k);
    if (previous) {
      const Eigen::Vector4d kc = refine_curve(curve, *previous);
      const double cc = curve_cost(curve, kc);
      if (cc <= 1.05 * cost + 1e-14) {
        k = kc;
        cost = cc;
      }
    }
    trace << " I=" << current << ":" << cost;
    if (!k.allFinite() || !std::isfinite(cost))
      throw Error(ErrorKind::FitDivergence, "stage 1 diverged; residual trace" + trace.str());
    out.currents.push_back(current);
    out.stage1_k.push_back(k);
    previous = k;
  }

  // Stage 2.
  EmissionFit fit;
  fit.label = options.label;
  for (int i = 0; i < 4; ++i) {
    std::vector<double> ki;
    for (const auto& k : out.stage1_k) ki.push_back(k(i));
    fit.alpha.col(i) = fit_power_law(out.currents, ki);
  }
  if (!fit.alpha.allFinite()) throw Error(ErrorKind::FitDivergence, "stage 2 diverged; stage 1 residuals" + trace.str());

  if (options.joint_refine) {
    const double before = log_cost(fit, profiles);
    Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(fit.alpha.data(), 12);
    EmissionFit trial = fit;
    const auto residual = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r) {
      trial.alpha = Eigen::Map<const Eigen::Matrix<double, 3, 4>>(p.data());
      for (std::size_t j = 0; j < profiles.size(); ++j) {
        const auto& s = profiles[j];
        r(j) = guard(log_model(k_coefficients(trial, s.current), std::log10(s.r)) - std::log10(s.b_uT));
      }
    };
    const double after = detail::least_squares(residual, static_cast<int>(profiles.size()), x);
    if (x.allFinite() && after < before) fit.alpha = Eigen::Map<const Eigen::Matrix<double, 3, 4>>(x.data());
  }

  double r_lo = INFINITY, r_hi = 0, i_lo = INFINITY, i_hi = 0;
  for (const auto& p : profiles) {
    r_lo = std::min(r_lo, p.r);
    r_hi = std::max(r_hi, p.r);
    i_lo = std::min(i_lo, p.current);
    i_hi = std::max(i_hi, p.current);
  }
  fit.validity = {r_lo, r_hi, i_lo, i_hi};
  out.fit = fit;
  out.quality = fit_quality(fit, profiles);
  if (!std::isfinite(out.quality.max_abs_eps))
    throw Error(ErrorKind::FitDivergence, "fit produced non-finite values; stage 1 residuals" + trace.str());
  return out;
}

double shielding_factor(double b0, double b) {
  if (b == 0.0) throw Error(ErrorKind::DivisionByZero, "shielded field is zero");
  if (!(b > 0) || !(b0 >= 0)) throw Error(ErrorKind::InvalidArgument, "field magnitudes must be non-negative");
  return b0 / b;
}

std::vector<double> shielding_factor(const std::vector<double>& b0, const std::vector<double>& b) {
  if (b0.size() != b.size())
    throw Error(ErrorKind::ShapeMismatch, "base has " + std::to_string(b0.size()) + " samples, shielded " +
                                              std::to_string(b.size()));
  std::vector<double> sf(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) sf[i] = shielding_factor(b0[i], b[i]);
  return sf;
}

MFProfileSet shielding_factor(const MFProfileSet& base, const MFProfileSet& shielded) {
  if (base.size() != shielded.size())
    throw Error(ErrorKind::ShapeMismatch, "base has " + std::to_string(base.size()) + " samples, shielded " +
                                              std::to_string(shielded.size()));
  MFProfileSet out;
  for (const auto& p : base) {
    const auto it = std::find_if(shielded.begin(), shielded.end(),
                                 [&](const ProfileSample& q) { return same(q.current, p.current) && same(q.r, p.r); });
    if (it == shielded.end()) {
      std::ostringstream msg;
      msg << "no shielded sample at I = " << p.current << " A, r = " << p.r << " m";
      throw Error(ErrorKind::ShapeMismatch, msg.str());
    }
    out.push_back({p.current, p.r, shielding_factor(p.b_uT, it->b_uT)});
  }
  return out;
}

EmissionFit fit_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ParseError, std::string("invalid JSON: ") + e.what());
  }
  try {
    EmissionFit f;
    f.label = j.value("label", std::string("fit"));
    const auto& a = j.at("alpha");
    if (!a.is_array() || a.size() != 3) throw Error(ErrorKind::ParseError, "alpha must be a 3 x 4 array");
    for (int r = 0; r < 3; ++r) {
      if (!a[r].is_array() || a[r].size() != 4) throw Error(ErrorKind::ParseError, "alpha must be a 3 x 4 array");
      for (int c = 0; c < 4; ++c) f.alpha(r, c) = a[r][c].get<double>();
    }
    if (!f.alpha.allFinite()) throw Error(ErrorKind::ParseError, "alpha has non-finite entries");
    if (j.contains("validity")) {
      const auto& v = j["validity"];
      f.validity.r_min = v.value("r_min_m", f.validity.r_min);
      f.validity.r_max = v.value("r_max_m", f.validity.r_max);
      f.validity.current_min = v.value("current_min_A", f.validity.current_min);
      f.validity.current_max = v.value("current_max_A", f.validity.current_max);
    }
    return f;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("coefficient file: ") + e.what());
  }
}

std::string fit_to_json_text(const EmissionFit& f) {
  json a = json::array();
  for (int r = 0; r < 3; ++r) a.push_back({f.alpha(r, 0), f.alpha(r, 1), f.alpha(r, 2), f.alpha(r, 3)});
  json j{{"label", f.label},
         {"validity",
          {{"r_min_m", f.validity.r_min},
           {"r_max_m", f.validity.r_max},
           {"current_min_A", f.validity.current_min},
           {"current_max_A", f.validity.current_max}}},
         {"alpha", a}};
  return j.dump(2) + "\n";
}

EmissionFit load_fit(const std::string& path) {
  std::ifstream in(resolve_data_file(path));
  if (!in) throw Error(ErrorKind::Io, "cannot open coefficient file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return fit_from_json_text(ss.str());
}

void save_fit(const EmissionFit& fit, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
  out << fit_to_json_text(fit);
}

MFProfileSet load_profiles(const std::string& path) {
  std::ifstream in(resolve_data_file(path));
  if (!in) throw Error(ErrorKind::Io, "cannot open profile file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::ParseError, path + ": empty file");
  const auto header = split_csv(line);
  const auto col = [&](std::initializer_list<const char*> names) {
    for (const char* n : names) {
      const auto it = std::find(header.begin(), header.end(), n);
      if (it != header.end()) return static_cast<int>(it - header.begin());
    }
    return -1;
  };
  const int ci = col({"I_A"}), cr = col({"r_m"}), cb = col({"B_uT", "Bm_uT", "SF"});
  if (ci < 0 || cr < 0 || cb < 0) throw Error(ErrorKind::ParseError, path + ": header must contain I_A, r_m and B_uT");
  MFProfileSet out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \r\t") == std::string::npos) continue;
    const auto cells = split_csv(line);
    try {
      if (static_cast<int>(cells.size()) <= std::max({ci, cr, cb})) throw std::invalid_argument("short row");
      std::size_t used = 0;
      ProfileSample s;
      s.current = std::stod(cells[ci], &used);
      s.r = std::stod(cells[cr], &used);
      s.b_uT = std::stod(cells[cb], &used);
      out.push_back(s);
    } catch (const std::exception&) {
      throw Error(ErrorKind::ParseError, path + ":" + std::to_string(line_no) + ": malformed row");
    }
  }
  return out;
}

void save_profiles(const MFProfileSet& profiles, const std::string& path, const std::string& value_column) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
  out << "I_A,r_m," << value_column << "\n";
  out.precision(10);
  for (const auto& p : profiles) out << p.current << ',' << p.r << ',' << p.b_uT << '\n';
}

}  // namespace tcac
