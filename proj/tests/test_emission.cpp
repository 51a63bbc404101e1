#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>

#include "tcac/design_io.hpp"
#include "tcac/emission.hpp"
#include "tcac/errors.hpp"

using namespace tcac;

namespace {

EmissionFit contralay() { return load_fit(resolve_data_file("coeffs-contralay.json")); }
EmissionFit unilay() { return load_fit(resolve_data_file("coeffs-unilay.json")); }

// Direct transcription of the model, written out term by term.
double model_by_hand(const EmissionFit& f, double i, double r) {
  double k[4];
  for (int n = 0; n < 4; ++n) k[n] = f.alpha(0, n) * std::pow(i, f.alpha(1, n)) + f.alpha(2, n);
  const double lr = std::log10(r);
  return std::pow(10.0, k[0] * std::exp(k[1] * lr) + k[2] * std::exp(k[3] * lr));
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::Io;  // sentinel: nothing thrown
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("tcac_test_" + name)).string();
}

}  // namespace

TEST_CASE("model evaluation matches the closed form") {
  const EmissionFit f = contralay();
  for (double i : {40.0, 100.0, 450.0, 890.0})
    for (double r : {0.15, 0.5, 1.0, 2.7, 5.0}) CHECK(eval_fit(f, i, r) == doctest::Approx(model_by_hand(f, i, r)).epsilon(1e-12));
}

TEST_CASE("published coefficients reproduce the tabulated fit") {
  const EmissionFit f = contralay();
  const MFProfileSet bfit = load_profiles(resolve_data_file("profiles-fitted.csv"));
  REQUIRE(bfit.size() == 36);
  for (const auto& s : bfit) {
    CAPTURE(s.current);
    CAPTURE(s.r);
    // the table carries three to four significant digits
    CHECK(eval_fit(f, s.current, s.r) == doctest::Approx(s.b_uT).epsilon(0.01));
  }
}

TEST_CASE("validity envelope") {
  const EmissionFit f = contralay();
  CHECK(kind_of([&] { eval_fit(f, 745.0, 6.0); }) == ErrorKind::OutOfValidityRange);
  CHECK(kind_of([&] { eval_fit(f, 10.0, 1.0); }) == ErrorKind::OutOfValidityRange);
  CHECK(kind_of([&] { eval_fit(f, 745.0, 0.1); }) == ErrorKind::OutOfValidityRange);
  CHECK(std::isfinite(eval_fit(f, 745.0, 6.0, true)));
  CHECK(f.validity.contains(40.0, 0.15));
  CHECK(f.validity.contains(890.0, 5.0));
}

TEST_CASE("field decays with distance and grows with current") {
  for (const EmissionFit& f : {contralay(), unilay()}) {
    CAPTURE(f.label);
    for (double i : {40.0, 200.0, 890.0}) {
      double prev = INFINITY;
      for (double r = 0.15; r <= 5.0; r += 0.05) {
        const double b = eval_fit(f, i, r);
        CHECK(b < prev);
        prev = b;
      }
    }
    for (double r : {0.3, 1.0, 3.0}) CHECK(eval_fit(f, 100.0, r) < eval_fit(f, 800.0, r));
  }
}

TEST_CASE("unilay armor emits more than contralay") {
  const EmissionFit c = contralay(), u = unilay();
  for (double i : {100.0, 450.0, 890.0})
    for (double r : {0.5, 1.0, 2.0, 4.0}) CHECK(eval_fit(u, i, r) > eval_fit(c, i, r));
}

TEST_CASE("refit of the simulated profiles") {
  const MFProfileSet sim = load_profiles(resolve_data_file("profiles-simulated.csv"));
  const FitResult r = fit_coefficients(sim, {"refit", true});
  CHECK(r.currents.size() == 4);
  CHECK(r.quality.r_squared >= 0.99);
  CHECK(r.quality.max_abs_eps <= 0.15);
  // the refit is at least as good as the published coefficients
  CHECK(r.quality.r_squared >= fit_quality(contralay(), sim).r_squared - 1e-9);
  for (const auto& k : r.stage1_k) CHECK(k[1] > k[3]);
}

TEST_CASE("fit recovers a synthetic model") {
  EmissionFit truth;
  truth.alpha << -1.2, -1.1, 9.0, -2.5,  //
      -0.4, -0.45, 0.03, -0.35,         //
      -0.8, 2.3, -10.0, -0.45;
  MFProfileSet set;
  std::mt19937 rng(7);
  std::normal_distribution<double> noise(0.0, 1e-4);
  for (double i : {50.0, 120.0, 250.0, 450.0, 700.0, 880.0})
    for (double r : {0.15, 0.3, 0.5, 0.8, 1.2, 2.0, 3.0, 5.0})
      set.push_back({i, r, eval_fit(truth, i, r) * std::pow(10.0, noise(rng))});
  const FitResult r = fit_coefficients(set);
  CHECK(r.quality.r_squared > 0.9999);
  CHECK(r.quality.max_abs_eps < 0.01);
  for (double i : {60.0, 500.0})
    for (double d : {0.2, 1.0, 4.0}) CHECK(eval_fit(r.fit, i, d) == doctest::Approx(eval_fit(truth, i, d)).epsilon(0.01));
}

TEST_CASE("fit rejects degenerate input") {
  MFProfileSet one_r;
  for (double i : {50.0, 200.0, 800.0}) one_r.push_back({i, 1.0, 1.0});
  CHECK(kind_of([&] { fit_coefficients(one_r); }) == ErrorKind::FitDivergence);

  MFProfileSet two_i;
  for (double i : {50.0, 200.0})
    for (double r : {0.2, 0.5, 1.0, 2.0, 4.0}) two_i.push_back({i, r, 1.0 / r});
  CHECK(kind_of([&] { fit_coefficients(two_i); }) == ErrorKind::FitDivergence);

  MFProfileSet neg = two_i;
  neg.push_back({800.0, 1.0, -1.0});
  CHECK(kind_of([&] { fit_coefficients(neg); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("shielding factor") {
  CHECK(shielding_factor(10.0, 4.0) == doctest::Approx(2.5));
  CHECK(kind_of([] { shielding_factor(1.0, 0.0); }) == ErrorKind::DivisionByZero);
  CHECK(kind_of([] { shielding_factor(std::vector<double>{1, 2}, std::vector<double>{1}); }) == ErrorKind::ShapeMismatch);
  const auto v = shielding_factor(std::vector<double>{2, 9}, std::vector<double>{1, 3});
  CHECK(v == std::vector<double>{2.0, 3.0});

  const MFProfileSet base{{100, 1.0, 8.0}, {100, 2.0, 2.0}};
  const MFProfileSet shielded{{100, 2.0, 0.5}, {100, 1.0, 4.0}};
  const MFProfileSet sf = shielding_factor(base, shielded);
  REQUIRE(sf.size() == 2);
  CHECK(sf[0].b_uT == doctest::Approx(2.0));
  CHECK(sf[1].b_uT == doctest::Approx(4.0));
  const MFProfileSet partial{{100, 1.0, 4.0}};
  CHECK(kind_of([&] { shielding_factor(base, partial); }) == ErrorKind::ShapeMismatch);
}

TEST_CASE("coefficient and profile files round trip") {
  const EmissionFit f = contralay();
  const EmissionFit back = fit_from_json_text(fit_to_json_text(f));
  CHECK(back.label == f.label);
  CHECK(back.alpha == f.alpha);
  CHECK(back.validity.r_max == f.validity.r_max);

  const std::string path = temp_path("profiles.csv");
  const MFProfileSet sim = load_profiles(resolve_data_file("profiles-simulated.csv"));
  save_profiles(sim, path);
  const MFProfileSet again = load_profiles(path);
  std::remove(path.c_str());
  REQUIRE(again.size() == sim.size());
  for (std::size_t k = 0; k < sim.size(); ++k) {
    CHECK(again[k].current == sim[k].current);
    CHECK(again[k].r == sim[k].r);
    CHECK(again[k].b_uT == sim[k].b_uT);
  }
  CHECK(kind_of([] { fit_from_json_text("{\"alpha\": [[1,2],[3]]}"); }) == ErrorKind::ParseError);
  CHECK(kind_of([] { fit_from_json_text("not json"); }) == ErrorKind::ParseError);
}
