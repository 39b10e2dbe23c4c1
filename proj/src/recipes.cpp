#include "vit/recipes.hpp"

#include <cmath>

#include "vit/error.hpp"
#include "vit/kernels.hpp"

namespace vit::recipes {

using units::mhz_to_angular;

double photon_flux_from_power(double power, double lambda) {
  constexpr double kPlanck = 6.62607015e-34;
  constexpr double kLightSpeed = 299792458.0;
  detail::require(power >= 0.0 && lambda > 0.0, "power must be nonnegative, lambda positive");
  return power * lambda / (kPlanck * kLightSpeed);
}

std::vector<double> uniform_grid(double from, double to, double step) {
  detail::require(step > 0.0, "grid step must be positive");
  detail::require(to >= from, "grid end precedes its start");
  const auto n = static_cast<std::size_t>(std::floor((to - from) / step + 0.5)) + 1;
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) grid[i] = from + static_cast<double>(i) * step;
  return grid;
}

std::vector<VitDataset> datasets_from_scan(const std::vector<ScanBlock>& blocks,
                                           const ScanPlan& plan, bool use_expected) {
  const double incident = plan.photons_per_point();
  detail::require(incident > 0.0, "scan has no incident photons");
  const double d1_norm = incident * plan.efficiency_d1;
  detail::require(d1_norm > 0.0, "D1 efficiency is zero; transmission cannot be normalised");

  std::vector<VitDataset> out;
  out.reserve(blocks.size());
  for (const ScanBlock& block : blocks) {
    VitDataset d;
    d.delta_cavity = block.delta_cavity;
    Spectrum d2;
    for (const CountRecord& r : block.records) {
      const double c1 = use_expected ? r.expected_d1 : static_cast<double>(r.counts_d1);
      const double c2 = use_expected ? r.expected_d2 : static_cast<double>(r.counts_d2);
      d.d1.detuning.push_back(r.delta_probe);
      d.d1.value.push_back(c1 / d1_norm);
      d.d1.sigma.push_back(poisson_sigma(c1) / d1_norm);
      d2.detuning.push_back(r.delta_probe);
      d2.value.push_back(c2 / incident);
      d2.sigma.push_back(poisson_sigma(c2) / incident);
    }
    d.d1_counts_per_unit = d1_norm;
    if (plan.efficiency_d2 > 0.0) {
      d.d2 = std::move(d2);
      d.d2_counts_per_unit = incident;
    }
    out.push_back(std::move(d));
  }
  return out;
}

io::RunConfig with_all_corrections(io::RunConfig cfg) {
  cfg.corrections.standing_wave = true;
  cfg.corrections.side_channel = cfg.side_channel;
  cfg.corrections.jitter = cfg.jitter;
  return cfg;
}

ScanPlan reference_scan_plan(const io::RunConfig& cfg, std::vector<double> delta_cavity_list,
                         std::vector<double> probe_grid, std::uint64_t seed) {
  ScanPlan plan;
  plan.delta_cavity_list = std::move(delta_cavity_list);
  plan.probe_grid = std::move(probe_grid);
  plan.photon_flux = photon_flux_from_power(220e-15, cfg.physics.lambda);
  plan.dwell = 10e-3;
  plan.efficiency_d1 = 0.3;
  plan.efficiency_d2 = 0.05;
  plan.rng_seed = seed;
  return plan;
}

// ---- fig2 -------------------------------------------------------------------

Fig2Result run_fig2(const io::RunConfig& cfg, std::uint64_t seed) {
  Fig2Result out;
  out.probe_grid = uniform_grid(mhz_to_angular(-15.0), mhz_to_angular(15.0), mhz_to_angular(0.05));
  const double far = 1e3 * cfg.physics.gamma;
  const std::vector<std::pair<std::string, double>> panels = {
      {"A", far}, {"B", mhz_to_angular(0.5)}, {"C", mhz_to_angular(-2.2)}, {"D", mhz_to_angular(2.8)}};

  const SpectrumModel model(cfg.physics, cfg.eta_vacuum(), cfg.corrections, cfg.emission_scale);
  for (const auto& [name, delta] : panels) {
    out.panels.push_back({name, delta, kernels::evaluate_spectrum_parallel(model, out.probe_grid, delta)});
  }

  // Synthetic counts and the joint fit use a coarser grid around the lines.
  std::vector<double> scan_grid =
      uniform_grid(mhz_to_angular(-8.0), mhz_to_angular(8.0), mhz_to_angular(0.1));
  out.plan = reference_scan_plan(cfg, {panels[1].second, panels[2].second, panels[3].second},
                             scan_grid, seed);
  out.scan = generate_scan_parallel(model, out.plan);

  VitFitSetup setup;
  setup.cfg = cfg.physics;
  setup.model = cfg.corrections;
  out.joint_fit = fit_vit_spectra(datasets_from_scan(out.scan, out.plan), setup);

  // Panel A: far-detuned cavity, D1 only, Lorentzian linewidth.
  ScanPlan plan_a = reference_scan_plan(cfg, {far}, scan_grid, seed ^ 0xA);
  const std::vector<ScanBlock> scan_a = generate_scan_parallel(model, plan_a);
  const std::vector<VitDataset> data_a = datasets_from_scan(scan_a, plan_a);
  out.linewidth_fit = fit_lorentzian(data_a.front().d1);
  return out;
}

// ---- fig3 -------------------------------------------------------------------

Fig3Result run_fig3(const io::RunConfig& cfg, const Fig3Options& options) {
  Fig3Result out;
  PhysicalConfig phys = cfg.physics;
  phys.od = options.od;
  out.eta = cfg.eta_vacuum();
  out.analytic_delay = group_delay_analytic(phys.od, phys.kappa, out.eta);
  out.exact_delay = group_delay_exact(phys.od, phys.kappa, phys.gamma, out.eta);

  PulseSpec spec;
  spec.duration = options.duration;
  out.input = make_gaussian_pulse(spec, options.grid);
  const SpectrumModel model(phys, out.eta, cfg.corrections);
  out.output = propagate_through(out.input, model, 0.0);
  return out;
}

// ---- fig4 -------------------------------------------------------------------

Fig4Result run_fig4(const io::RunConfig& cfg, const Fig4Options& options) {
  std::vector<double> photon_numbers = options.photon_numbers;
  if (photon_numbers.empty()) {
    for (int n = 0; n <= 22; ++n) photon_numbers.push_back(n);
  }
  const std::vector<double> probe_grid =
      uniform_grid(mhz_to_angular(-6.0), mhz_to_angular(6.0), mhz_to_angular(0.1));

  Fig4Result out;
  out.points.resize(photon_numbers.size());
  std::vector<std::string> failures(photon_numbers.size());

#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(photon_numbers.size()); ++k) {
    try {
      Fig4Point& pt = out.points[k];
      pt.n_c = photon_numbers[k];
      pt.eta_true = effective_cooperativity(options.eta_eff_0, pt.n_c);
      const SpectrumModel model(cfg.physics, pt.eta_true, options.model, cfg.emission_scale);
      const ScanPlan plan =
          reference_scan_plan(cfg, {0.0}, probe_grid, splitmix64(options.seed + static_cast<std::uint64_t>(k)));
      const std::vector<ScanBlock> scan = generate_scan_serial(model, plan);
      const std::vector<VitDataset> data = datasets_from_scan(scan, plan, options.noiseless);

      VitFitSetup setup;
      setup.cfg = cfg.physics;
      setup.model = options.model;
      pt.fit = fit_vit_spectra(data, setup);
      const double od = pt.fit.has("od") ? pt.fit.value("od") : cfg.physics.od;
      const double od_err = pt.fit.has("od") ? pt.fit.error("od") : 0.0;
      pt.transparency = extract_transparency(data.front().d1, 0.0, od, od_err);
    } catch (const std::exception& e) {
      failures[k] = e.what();
    }
  }
  for (const std::string& f : failures) {
    if (!f.empty()) throw ConvergenceError("fig4 point failed: " + f);
  }

  std::vector<double> x, y, s;
  for (const Fig4Point& pt : out.points) {
    if (!pt.fit.converged) continue;
    x.push_back(pt.n_c);
    y.push_back(pt.fit.value("eta_eff"));
    s.push_back(pt.fit.error("eta_eff"));
  }
  out.line = fit_linear_above(x, y, s, options.threshold);
  out.ratio = ratio_with_error(out.line.intercept, out.line.intercept_err, out.line.slope,
                               out.line.slope_err, out.line.covariance);
  return out;
}

}  // namespace vit::recipes
