#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "vit/spatial.hpp"

// Synthetic photon-counting data for D1 (transmission) and D2 (cavity
// emission) spectrum scans.
//
// Noise streams are portable: grid point j (row-major over cavity
// detunings, then probe detunings) draws from std::mt19937_64 seeded with
// splitmix64(seed ^ splitmix64(j)); D1 is sampled before D2. Uniform
// variates take the top 53 bits of a 64-bit draw. Poisson variates use
// Knuth's product method for mean < 30 and Hormann's PTRS otherwise.
namespace vit {

struct ScanPlan {
  std::vector<double> delta_cavity_list;  // rad/s
  std::vector<double> probe_grid;         // rad/s
  double photon_flux = 0.0;               // probe photons/s
  double dwell = 0.0;                     // s per grid point
  double efficiency_d1 = 1.0;
  double efficiency_d2 = 1.0;
  std::uint64_t rng_seed = 0;

  void validate() const;
  /// photon_flux * dwell
  double photons_per_point() const { return photon_flux * dwell; }
};

struct CountRecord {
  double delta_probe = 0.0;
  double delta_cavity = 0.0;
  std::uint64_t counts_d1 = 0;
  std::uint64_t counts_d2 = 0;
  double expected_d1 = 0.0;
  double expected_d2 = 0.0;
};

struct ScanBlock {
  double delta_cavity = 0.0;
  std::vector<CountRecord> records;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Generator for grid point `index` of a scan seeded with `seed`.
std::mt19937_64 point_stream(std::uint64_t seed, std::uint64_t index);

/// Uniform in [0, 1) from the top 53 bits.
double uniform01(std::mt19937_64& rng);

std::uint64_t sample_poisson(double mean, std::mt19937_64& rng);

/// One block per cavity detuning. The model's emission scale multiplies
/// the cavity-emission probability before efficiency_d2.
std::vector<ScanBlock> generate_scan_serial(const SpectrumModel& model, const ScanPlan& plan);
std::vector<ScanBlock> generate_scan_parallel(const SpectrumModel& model, const ScanPlan& plan);

inline std::vector<ScanBlock> generate_scan(const SpectrumModel& model, const ScanPlan& plan) {
  return generate_scan_parallel(model, plan);
}

/// flux * duration * (1 - e^{-OD/(eta+1)}): absorbed photons on double resonance.
double absorbed_photon_budget(double od, double eta, double flux, double duration);

/// Absorbed photons when `duration` is spread evenly over the probe grid.
double absorbed_photon_budget_scan(const SpectrumModel& model, const std::vector<double>& probe_grid,
                                   double delta_cavity, double flux, double duration);

}  // namespace vit
