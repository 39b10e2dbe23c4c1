#include <doctest.h>

#include <cmath>

#include "vit/error.hpp"
#include "vit/recipes.hpp"

using namespace vit;
using units::mhz_to_angular;

TEST_CASE("uniform grid includes both ends") {
  const auto g = recipes::uniform_grid(-1.0, 1.0, 0.1);
  CHECK(g.size() == 21);
  CHECK(g.front() == -1.0);
  CHECK(g.back() == doctest::Approx(1.0));
  CHECK(recipes::uniform_grid(2.0, 2.0, 0.5).size() == 1);
  CHECK_THROWS_AS(recipes::uniform_grid(0.0, 1.0, 0.0), DomainError);
  CHECK_THROWS_AS(recipes::uniform_grid(1.0, 0.0, 0.1), DomainError);
}

TEST_CASE("photon flux of a femtowatt probe") {
  const double flux = recipes::photon_flux_from_power(220e-15, 852e-9);
  CHECK(flux == doctest::Approx(220e-15 * 852e-9 / (6.62607015e-34 * 299792458.0)));
  CHECK(flux == doctest::Approx(9.4e5).epsilon(0.01));
}

TEST_CASE("scan datasets are normalised to transmission") {
  const io::RunConfig cfg = io::default_run_config();
  const SpectrumModel m(cfg.physics, 3.4);
  const ScanPlan plan = recipes::reference_scan_plan(cfg, {mhz_to_angular(0.5)},
                                                 {mhz_to_angular(-1.0), mhz_to_angular(0.5)}, 1);
  const auto data = recipes::datasets_from_scan(generate_scan_serial(m, plan), plan, true);
  REQUIRE(data.size() == 1);
  REQUIRE(data[0].d2);
  for (std::size_t i = 0; i < 2; ++i) {
    const SpectrumSample s = m.at({plan.probe_grid[i], mhz_to_angular(0.5)});
    CHECK(data[0].d1.value[i] == doctest::Approx(s.transmission).epsilon(1e-14));
    CHECK(data[0].d2->value[i] == doctest::Approx(0.05 * s.cavity_emission).epsilon(1e-14));
    CHECK(data[0].d1.sigma[i] > 0.0);
  }
}

TEST_CASE("all-corrections config") {
  const io::RunConfig cfg = recipes::with_all_corrections(io::default_run_config());
  CHECK(cfg.corrections.standing_wave);
  CHECK(cfg.corrections.side_channel);
  CHECK(cfg.corrections.jitter);
}

TEST_CASE("fig3 recipe delays the pulse") {
  const recipes::Fig3Result r = recipes::run_fig3(io::default_run_config());
  CHECK(r.output.delay_centroid > 0.5 * r.exact_delay);
  CHECK(r.output.delay_centroid < r.exact_delay);
  CHECK(r.analytic_delay > r.exact_delay);
  CHECK(r.output.energy_transmission < 1.0);
}

TEST_CASE("fig4 recipe recovers a noiseless linear law") {
  recipes::Fig4Options opt;
  opt.photon_numbers = {3, 6, 10, 15};
  opt.noiseless = true;
  const recipes::Fig4Result r = recipes::run_fig4(io::default_run_config(), opt);
  REQUIRE(r.points.size() == 4);
  for (const auto& p : r.points) {
    CHECK(p.fit.converged);
    CHECK(p.fit.value("eta_eff") == doctest::Approx(p.eta_true).epsilon(1e-4));
  }
  CHECK(r.line.points == 4);
  CHECK(r.line.slope == doctest::Approx(3.4).epsilon(1e-4));
  CHECK(r.line.intercept == doctest::Approx(3.4).epsilon(1e-3));
  CHECK(r.ratio.value == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("fig2 recipe produces four panels and converged fits") {
  const recipes::Fig2Result r = recipes::run_fig2(io::default_run_config(), 5);
  REQUIRE(r.panels.size() == 4);
  CHECK(r.panels[0].name == "A");
  for (const auto& p : r.panels) CHECK(p.spectrum.size() == r.probe_grid.size());
  CHECK(r.scan.size() == 3);
  CHECK(r.joint_fit.converged);
  CHECK(r.linewidth_fit.converged);
  CHECK(r.linewidth_fit.value("fwhm") == doctest::Approx(mhz_to_angular(5.2)).epsilon(0.05));
}
