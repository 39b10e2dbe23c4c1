#include <doctest.h>

#include <cmath>

#include "vit/error.hpp"
#include "vit/estimation.hpp"
#include "vit/recipes.hpp"

using namespace vit;
using units::mhz_to_angular;

namespace {

Spectrum two_level_spectrum(const PhysicalConfig& c) {
  Spectrum s;
  for (double dp = -15.0; dp <= 15.0; dp += 0.1) {
    s.detuning.push_back(mhz_to_angular(dp));
    s.value.push_back(transmission(c, 0.0, {mhz_to_angular(dp), 0.0}));
  }
  return s;
}

std::vector<VitDataset> noiseless_datasets(const SpectrumModel& m, std::uint64_t seed) {
  const io::RunConfig cfg = io::default_run_config();
  const ScanPlan plan = recipes::reference_scan_plan(
      cfg, {mhz_to_angular(0.5), mhz_to_angular(-2.2), mhz_to_angular(2.8)},
      recipes::uniform_grid(mhz_to_angular(-6.0), mhz_to_angular(6.0), mhz_to_angular(0.1)), seed);
  return recipes::datasets_from_scan(generate_scan_serial(m, plan), plan, true);
}

}  // namespace

TEST_CASE("Beer-Lambert line shape") {
  CHECK(lorentzian_line(1.0, 1.0, 2.0, 0.4, 0.9) == doctest::Approx(0.9 * std::exp(-0.4)));
  CHECK(lorentzian_line(2.0, 1.0, 2.0, 0.4, 1.0) == doctest::Approx(std::exp(-0.2)));
}

TEST_CASE("Lorentzian fit recovers the natural linewidth") {
  PhysicalConfig c;
  const FitResult f = fit_lorentzian(two_level_spectrum(c));
  REQUIRE(f.converged);
  CHECK(f.value("fwhm") == doctest::Approx(c.gamma).epsilon(1e-7));
  CHECK(f.value("depth") == doctest::Approx(c.od).epsilon(1e-7));
  CHECK(f.value("baseline") == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(f.value("center")) < 1e-6 * c.gamma);
}

TEST_CASE("Lorentzian fit tracks a shifted, scaled line") {
  Spectrum s;
  const double center = mhz_to_angular(1.3), fwhm = mhz_to_angular(3.0);
  for (double dp = -10.0; dp <= 10.0; dp += 0.2) {
    s.detuning.push_back(mhz_to_angular(dp));
    s.value.push_back(lorentzian_line(mhz_to_angular(dp), center, fwhm, 1.2, 0.8));
  }
  const FitResult f = fit_lorentzian(s);
  CHECK(f.value("center") == doctest::Approx(center).epsilon(1e-7));
  CHECK(f.value("fwhm") == doctest::Approx(fwhm).epsilon(1e-7));
  CHECK(f.value("depth") == doctest::Approx(1.2).epsilon(1e-7));
  CHECK(f.value("baseline") == doctest::Approx(0.8).epsilon(1e-7));
}

TEST_CASE("Lorentzian fit on a flat line is rank deficient") {
  Spectrum s;
  for (int i = 0; i < 50; ++i) {
    s.detuning.push_back(mhz_to_angular(i * 0.1));
    s.value.push_back(1.0);
  }
  const FitResult f = fit_lorentzian(s);
  CHECK(f.status == FitStatus::RankDeficient);
  CHECK_FALSE(f.offending_parameter.empty());
  Spectrum tiny;
  tiny.detuning = {0.0, 1.0};
  tiny.value = {1.0, 1.0};
  CHECK_THROWS_AS(fit_lorentzian(tiny), DomainError);
}

TEST_CASE("joint VIT fit recovers noiseless truth") {
  PhysicalConfig c;
  ModelOptions o;
  o.standing_wave = true;
  const SpectrumModel truth(c, 5.0, o);
  const auto data = noiseless_datasets(truth, 3);
  VitFitSetup setup;
  setup.cfg = c;
  setup.model = o;
  const FitResult f = fit_vit_spectra(data, setup);
  REQUIRE(f.converged);
  CHECK(f.value("eta_eff") == doctest::Approx(5.0).epsilon(1e-4));
  CHECK(f.value("od") == doctest::Approx(0.4).epsilon(1e-4));
  CHECK(f.value("scale_d2") == doctest::Approx(0.05).epsilon(1e-4));
  CHECK(f.error("eta_eff") > 0.0);
}

TEST_CASE("VIT fit honours the free mask and offsets") {
  PhysicalConfig c;
  const SpectrumModel truth(c, 3.0);
  auto data = noiseless_datasets(truth, 3);
  VitFitSetup setup;
  setup.cfg = c;
  setup.free.od = false;
  setup.od = 0.4;
  FitResult f = fit_vit_spectra(data, setup);
  CHECK(f.names == std::vector<std::string>{"eta_eff", "scale_d2"});
  CHECK(f.value("eta_eff") == doctest::Approx(3.0).epsilon(1e-4));

  // Shift the recorded cavity detunings; a free offset undoes it.
  for (auto& d : data) d.delta_cavity -= mhz_to_angular(0.05);
  setup.free.od = true;
  setup.free.delta_offset = true;
  f = fit_vit_spectra(data, setup);
  REQUIRE(f.converged);
  CHECK(f.value("delta_offset") == doctest::Approx(mhz_to_angular(0.05)).epsilon(1e-3));
  CHECK(f.value("eta_eff") == doctest::Approx(3.0).epsilon(1e-3));
}

TEST_CASE("VIT fit without D2 drops the scale parameter") {
  PhysicalConfig c;
  const SpectrumModel truth(c, 3.0);
  auto data = noiseless_datasets(truth, 3);
  for (auto& d : data) d.d2.reset();
  VitFitSetup setup;
  setup.cfg = c;
  const FitResult f = fit_vit_spectra(data, setup);
  CHECK_FALSE(f.has("scale_d2"));
  CHECK(f.value("eta_eff") == doctest::Approx(3.0).epsilon(1e-4));

  setup.free = {false, false, false, false, false};
  CHECK_THROWS_AS(fit_vit_spectra(data, setup), DomainError);
  CHECK_THROWS_AS(fit_vit_spectra({}, VitFitSetup{}), DomainError);
}

TEST_CASE("initial guess lands near the truth") {
  PhysicalConfig c;
  const SpectrumModel truth(c, 4.0);
  const auto data = noiseless_datasets(truth, 3);
  VitFitSetup setup;
  setup.cfg = c;
  const auto g = vit_initial_guess(data, setup);
  REQUIRE(g.size() == 5);
  CHECK(g[1] == doctest::Approx(0.4).epsilon(0.1));
  CHECK(g[0] == doctest::Approx(4.0).epsilon(0.3));
  CHECK(g[2] == doctest::Approx(0.05).epsilon(0.3));
}

TEST_CASE("weighted linear fit") {
  const std::vector<double> x = {3, 4, 5, 6, 7, 8};
  std::vector<double> y, s;
  for (double v : x) y.push_back(3.4 * v + 3.4), s.push_back(0.5);
  const LinearFit f = fit_linear_weighted(x, y, s);
  CHECK(f.slope == doctest::Approx(3.4).epsilon(1e-12));
  CHECK(f.intercept == doctest::Approx(3.4).epsilon(1e-12));
  CHECK(f.chi2 < 1e-20);
  CHECK(f.points == 6);
  // sigma_m^2 = sigma^2 / sum (x - xbar)^2
  CHECK(f.slope_err == doctest::Approx(0.5 / std::sqrt(17.5)).epsilon(1e-12));
  CHECK(f.covariance < 0.0);

  const LinearFit two = fit_linear_weighted({1, 2}, {1, 3}, {1, 1});
  CHECK(two.slope == doctest::Approx(2.0));
  CHECK_THROWS_AS(fit_linear_weighted({2, 2, 2}, {1, 2, 3}, {1, 1, 1}), DomainError);
  CHECK_THROWS_AS(fit_linear_weighted({1}, {1}, {1}), DomainError);

  const LinearFit above = fit_linear_above({0, 1, 2, 3, 4, 5}, {9, 9, 9, 3, 4, 5}, {1, 1, 1, 1, 1, 1}, 2.0);
  CHECK(above.points == 3);
  CHECK(above.slope == doctest::Approx(1.0));
  CHECK(above.intercept == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("ratio error propagation") {
  const Ratio r = ratio_with_error(5.0, 1.0, 3.7, 0.1);
  CHECK(r.value == doctest::Approx(5.0 / 3.7));
  CHECK(r.error == doctest::Approx(std::hypot(1.0 / 3.7, 5.0 * 0.1 / (3.7 * 3.7))));
  // Fully correlated errors in the same proportion cancel.
  const Ratio c = ratio_with_error(2.0, 0.2, 4.0, 0.4, 0.08);
  CHECK(c.error < 1e-8);
  CHECK_THROWS_AS(ratio_with_error(1.0, 0.1, 0.0, 0.1), DomainError);
}

TEST_CASE("transparency from a model and from a spectrum") {
  PhysicalConfig c;
  const double eta = 2.0;
  const SpectrumModel m(c, eta);
  const double t_peak = std::exp(-c.od / (eta + 1.0));
  const double t_ref = std::exp(-c.od);
  const TransparencyEstimate est = extract_transparency(m, 0.0);
  CHECK(est.peak_transmission == doctest::Approx(t_peak).epsilon(1e-9));
  CHECK(est.theta == doctest::Approx((t_peak - t_ref) / (1.0 - t_ref)).epsilon(1e-8));
  CHECK(est.reference_transmission == doctest::Approx(t_ref));

  Spectrum s;
  for (double dp = -2.0; dp <= 2.0; dp += 0.01) {
    s.detuning.push_back(mhz_to_angular(dp));
    s.value.push_back(m.at({mhz_to_angular(dp), 0.0}).transmission);
    s.sigma.push_back(0.01);
  }
  const TransparencyEstimate from_data = extract_transparency(s, 0.0, c.od, 0.01);
  CHECK(from_data.theta == doctest::Approx(est.theta).epsilon(1e-6));
  CHECK(from_data.error > 0.0);
  CHECK_THROWS_AS(extract_transparency(s, mhz_to_angular(50.0), c.od), DomainError);
}

TEST_CASE("peak transmission search finds off-centre maxima") {
  PhysicalConfig c;
  const SpectrumModel m(c, 3.4);
  const double dc = mhz_to_angular(-2.2);
  const double peak = peak_transmission(m, dc, mhz_to_angular(1.0));
  for (double dp = -3.2; dp <= -1.2; dp += 0.001) {
    CHECK(m.at({mhz_to_angular(dp), dc}).transmission <= peak + 1e-12);
  }
}

TEST_CASE("Poisson sigma floor") {
  CHECK(poisson_sigma(0.0) == 1.0);
  CHECK(poisson_sigma(100.0) == 10.0);
}
