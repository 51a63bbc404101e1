#pragma once

// Distance/current emission model B(I, r) fitted to simulated field profiles,
// and the shielding factor used to compare armor layouts.

#include <string>
#include <vector>

#include <Eigen/Core>

namespace tcac {

struct ValidityRange {
  double r_min = 0.15;         // m
  double r_max = 5.0;          // m
  double current_min = 40.0;   // A
  double current_max = 890.0;  // A

  bool contains(double current, double r) const {
    return r >= r_min && r <= r_max && current >= current_min && current <= current_max;
  }
};

/// alpha(j, i) holds alpha_{j+1, i+1}: k_i = alpha(0,i) * I^alpha(1,i) + alpha(2,i).
struct EmissionFit {
  std::string label;
  Eigen::Matrix<double, 3, 4> alpha = Eigen::Matrix<double, 3, 4>::Zero();
  ValidityRange validity;
};

struct ProfileSample {
  double current = 0.0;  // A
  double r = 0.0;        // m
  double b_uT = 0.0;
};

using MFProfileSet = std::vector<ProfileSample>;

/// k_1..k_4 at a phase current.
Eigen::Vector4d k_coefficients(const EmissionFit& fit, double current);

/// B = 10^(k1 exp(k2 log10 r) + k3 exp(k4 log10 r)), uT.
double eval_k(const Eigen::Vector4d& k, double r);

/// Throws OutOfValidityRange outside the fit's envelope unless `force`.
double eval_fit(const EmissionFit& fit, double current, double r, bool force = false);

struct FitQuality {
  double r_squared = 0.0;    // on log10 B
  double max_abs_eps = 0.0;  // max |B_fit - B_ref| / B_ref
  std::vector<double> eps;   // per sample, same order as the profile set
};

FitQuality fit_quality(const EmissionFit& fit, const MFProfileSet& profiles);

struct FitOptions {
  std::string label = "fitted";
  bool joint_refine = true;  // final pass over all twelve coefficients on the full grid
};

struct FitResult {
  EmissionFit fit;
  FitQuality quality;
  std::vector<double> currents;            // distinct currents, ascending
  std::vector<Eigen::Vector4d> stage1_k;   // per-current k from the first stage
};

/// Two-stage least squares in log10 B: per-current k_i, then alpha per k_i
/// across currents. Needs at least 3 currents and 5 distinct distances.
FitResult fit_coefficients(const MFProfileSet& profiles, const FitOptions& options = {});

double shielding_factor(double b0, double b);
/// Elementwise b0 / b.
std::vector<double> shielding_factor(const std::vector<double>& b0, const std::vector<double>& b);
/// Matches samples on (current, r); both sets must cover the same points.
MFProfileSet shielding_factor(const MFProfileSet& base, const MFProfileSet& shielded);

EmissionFit fit_from_json_text(const std::string& text);
std::string fit_to_json_text(const EmissionFit& fit);
EmissionFit load_fit(const std::string& path);
void save_fit(const EmissionFit& fit, const std::string& path);

/// CSV with header `I_A,r_m,B_uT` (extra columns ignored on read).
MFProfileSet load_profiles(const std::string& path);
void save_profiles(const MFProfileSet& profiles, const std::string& path, const std::string& value_column = "B_uT");

}  // namespace tcac
