#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vit/estimation.hpp"
#include "vit/io.hpp"
#include "vit/pulse.hpp"
#include "vit/synth.hpp"

// End-to-end pipelines behind `vit_lab reproduce`: model spectra and
// synthetic scans (fig2), pulse delay (fig3) and the cooperativity versus
// cavity photon number analysis (fig4).
namespace vit::recipes {

/// Photons per second carried by `power` watts at `lambda`.
double photon_flux_from_power(double power, double lambda);

/// from, from + step, ... up to and including `to` (within step/2).
std::vector<double> uniform_grid(double from, double to, double step);

/// D1 normalised by photons_per_point * efficiency_d1, D2 by photons_per_point,
/// both with Poisson sigmas. With use_expected the noiseless means stand in
/// for the counts.
std::vector<VitDataset> datasets_from_scan(const std::vector<ScanBlock>& blocks,
                                           const ScanPlan& plan, bool use_expected = false);

/// The config with standing-wave averaging, side channel and jitter enabled.
io::RunConfig with_all_corrections(io::RunConfig cfg);

/// 220 fW probe, 10 ms per point, D1/D2 efficiencies 0.3/0.05.
ScanPlan reference_scan_plan(const io::RunConfig& cfg, std::vector<double> delta_cavity_list,
                         std::vector<double> probe_grid, std::uint64_t seed);

// ---- fig2 -------------------------------------------------------------------

struct Fig2Panel {
  std::string name;
  double delta_cavity = 0.0;
  std::vector<SpectrumSample> spectrum;
};

struct Fig2Result {
  std::vector<double> probe_grid;
  std::vector<Fig2Panel> panels;  // A (cavity far detuned), B, C, D
  ScanPlan plan;
  std::vector<ScanBlock> scan;    // panels B-D
  FitResult joint_fit;            // eta_eff, od, scale_d2 over B-D
  FitResult linewidth_fit;        // Lorentzian on panel A's synthetic D1
};

Fig2Result run_fig2(const io::RunConfig& cfg, std::uint64_t seed);

// ---- fig3 -------------------------------------------------------------------

struct Fig3Options {
  double od = 0.5;
  double duration = 1.73e-6;
  GridConfig grid;
};

struct Fig3Result {
  SampledPulse input;
  PropagationResult output;
  double eta = 0.0;
  double analytic_delay = 0.0;  // (OD/kappa) eta/(eta+1)^2 at the antinode value
  double exact_delay = 0.0;     // phase slope incl. the atomic-line term
};

Fig3Result run_fig3(const io::RunConfig& cfg, const Fig3Options& options = {});

// ---- fig4 -------------------------------------------------------------------

struct Fig4Options {
  std::vector<double> photon_numbers;  // empty: 0, 1, ..., 22
  double eta_eff_0 = 3.4;
  double threshold = 2.0;  // linear fit uses n_c > threshold
  std::uint64_t seed = 1;
  bool noiseless = false;
  ModelOptions model;      // generator and fit model
};

struct Fig4Point {
  double n_c = 0.0;
  double eta_true = 0.0;
  FitResult fit;
  TransparencyEstimate transparency;
};

struct Fig4Result {
  std::vector<Fig4Point> points;
  LinearFit line;
  Ratio ratio;  // intercept / slope
};

Fig4Result run_fig4(const io::RunConfig& cfg, const Fig4Options& options);

}  // namespace vit::recipes
