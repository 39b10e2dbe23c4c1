#include "vit/synth.hpp"

#include <cmath>

#include "vit/error.hpp"
#include "vit/physics.hpp"

namespace vit {

using detail::require;

void ScanPlan::validate() const {
  require(!delta_cavity_list.empty(), "scan plan needs at least one cavity detuning");
  require(!probe_grid.empty(), "scan plan needs a probe grid");
  require(dwell > 0.0, "dwell must be positive");
  require(photon_flux >= 0.0, "photon flux must be nonnegative");
  require(efficiency_d1 >= 0.0 && efficiency_d1 <= 1.0, "efficiency_d1 must lie in [0, 1]");
  require(efficiency_d2 >= 0.0 && efficiency_d2 <= 1.0, "efficiency_d2 must lie in [0, 1]");
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::mt19937_64 point_stream(std::uint64_t seed, std::uint64_t index) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(index)));
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::uint64_t sample_poisson(double mean, std::mt19937_64& rng) {
  require(mean >= 0.0 && std::isfinite(mean), "Poisson mean must be finite and nonnegative");
  if (mean == 0.0) return 0;

  if (mean < 30.0) {
    const double limit = std::exp(-mean);
    std::uint64_t k = 0;
    double product = uniform01(rng);
    while (product > limit) {
      ++k;
      product *= uniform01(rng);
    }
    return k;
  }

  // PTRS, transformed rejection with squeeze.
  const double sq = std::sqrt(mean);
  const double log_mean = std::log(mean);
  const double b = 0.931 + 2.53 * sq;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  while (true) {
    const double u = uniform01(rng) - 0.5;
    const double v = uniform01(rng);
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<std::uint64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -mean + k * log_mean - std::lgamma(k + 1.0)) {
      return static_cast<std::uint64_t>(k);
    }
  }
}

namespace {

CountRecord make_record(const SpectrumModel& model, const ScanPlan& plan, std::size_t block,
                        std::size_t point) {
  CountRecord rec;
  rec.delta_cavity = plan.delta_cavity_list[block];
  rec.delta_probe = plan.probe_grid[point];
  const SpectrumSample s = model.at({rec.delta_probe, rec.delta_cavity});
  const double n = plan.photons_per_point();
  rec.expected_d1 = n * plan.efficiency_d1 * s.transmission;
  rec.expected_d2 = n * plan.efficiency_d2 * s.cavity_emission;

  const std::uint64_t index = block * plan.probe_grid.size() + point;
  std::mt19937_64 rng = point_stream(plan.rng_seed, index);
  rec.counts_d1 = sample_poisson(rec.expected_d1, rng);
  rec.counts_d2 = sample_poisson(rec.expected_d2, rng);
  return rec;
}

std::vector<ScanBlock> empty_blocks(const ScanPlan& plan) {
  std::vector<ScanBlock> blocks(plan.delta_cavity_list.size());
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    blocks[b].delta_cavity = plan.delta_cavity_list[b];
    blocks[b].records.resize(plan.probe_grid.size());
  }
  return blocks;
}

}  // namespace

std::vector<ScanBlock> generate_scan_serial(const SpectrumModel& model, const ScanPlan& plan) {
  plan.validate();
  std::vector<ScanBlock> blocks = empty_blocks(plan);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    for (std::size_t p = 0; p < plan.probe_grid.size(); ++p) {
      blocks[b].records[p] = make_record(model, plan, b, p);
    }
  }
  return blocks;
}

std::vector<ScanBlock> generate_scan_parallel(const SpectrumModel& model, const ScanPlan& plan) {
  plan.validate();
  std::vector<ScanBlock> blocks = empty_blocks(plan);
  const std::size_t per_block = plan.probe_grid.size();
  const auto total = static_cast<std::ptrdiff_t>(blocks.size() * per_block);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < total; ++j) {
    const auto b = static_cast<std::size_t>(j) / per_block;
    const auto p = static_cast<std::size_t>(j) % per_block;
    blocks[b].records[p] = make_record(model, plan, b, p);
  }
  return blocks;
}

double absorbed_photon_budget(double od, double eta, double flux, double duration) {
  require(od >= 0.0 && eta >= 0.0 && flux >= 0.0 && duration >= 0.0,
          "budget inputs must be nonnegative");
  return flux * duration * (1.0 - resonant_transmission(od, eta));
}

double absorbed_photon_budget_scan(const SpectrumModel& model, const std::vector<double>& probe_grid,
                                   double delta_cavity, double flux, double duration) {
  require(!probe_grid.empty(), "probe grid is empty");
  require(flux >= 0.0 && duration >= 0.0, "budget inputs must be nonnegative");
  const double per_point = flux * duration / static_cast<double>(probe_grid.size());
  double total = 0.0;
  for (double delta : probe_grid) {
    total += per_point * (1.0 - model.at({delta, delta_cavity}).transmission);
  }
  return total;
}

}  // namespace vit
