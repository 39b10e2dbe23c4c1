#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "vit/physics.hpp"

// Corrections that turn the single-coupling model into the experimental
// one: standing-wave coupling averaging, photon-number-dependent
// cooperativity, the Zeeman-shifted side channel and cavity jitter.
namespace vit {

/// Discrete distribution of single-atom cooperativities seen by the probe.
struct CouplingDistribution {
  double eta_max = 0.0;
  std::vector<double> eta;     // coupling value per node, in [0, eta_max]
  std::vector<double> weight;  // nonnegative, sums to 1

  /// eta(z) = eta_max cos^2(kz), z uniform over a quarter period,
  /// Gauss-Legendre nodes.
  static CouplingDistribution standing_wave(double eta_max, int nodes = 64);
  /// All weight at one coupling value.
  static CouplingDistribution point(double eta);

  void validate() const;
};

/// Weaker Lambda transition sharing the probe line, shifted in two-photon
/// detuning. weight is its strength relative to the main channel.
struct SideChannel {
  double weight = 0.25;
  double zeeman_shift = units::mhz_to_angular(0.6);

  void validate() const;
};

/// Gaussian fluctuation of the cavity frequency, FWHM in rad/s.
struct CavityJitter {
  double fwhm = units::mhz_to_angular(0.2);
  int nodes = 16;

  double sigma() const { return fwhm / units::kFwhmPerSigma; }
};

/// eta_eff_0 (n_c + 1)
double effective_cooperativity(double eta_eff_0, double n_c);

/// Sum_z w(z) |t(eta(z), det)|^2
double averaged_transmission(const PhysicalConfig& cfg, const CouplingDistribution& dist,
                             const Detunings& det);

/// chi_main/(1+w) + w chi_side/(1+w), the side channel evaluated with its
/// two-photon resonance moved by zeeman_shift. Total resonant OD is unchanged.
Susceptibility composite_susceptibility(const PhysicalConfig& cfg, double eta,
                                        const Detunings& det, const SideChannel& side);

using SpectrumFunction = std::function<double(const Detunings&)>;

/// Gauss-Hermite average of spectrum_fn over cavity detunings
/// delta + sigma x. The rule at `nodes` is compared against one at
/// nodes/2; a gap above tolerance throws ConvergenceError.
double jitter_broadened_value(const SpectrumFunction& spectrum_fn, double sigma_cavity,
                              const Detunings& det, int nodes = 24, double tolerance = 1e-6);

/// jitter_broadened_value over a probe-detuning grid at fixed cavity detuning.
std::vector<double> jitter_broadened_spectrum(const SpectrumFunction& spectrum_fn,
                                              double sigma_cavity,
                                              const std::vector<double>& probe_grid,
                                              double delta_cavity, int nodes = 24,
                                              double tolerance = 1e-6);

/// Which corrections the full spectrum model applies.
struct ModelOptions {
  bool standing_wave = false;
  int standing_wave_nodes = 64;
  std::optional<SideChannel> side_channel;
  std::optional<CavityJitter> jitter;
};

struct SpectrumSample {
  double transmission = 1.0;
  double cavity_emission = 0.0;
};

/// Transfer function of one homogeneous path through the medium, with the
/// weight of that path in the detected intensity.
struct MediumBranch {
  double weight = 1.0;
  std::function<cdouble(double delta_probe)> transfer;
};

/// Detector-level model: transmission and cavity emission averaged over
/// coupling nodes and jitter nodes. Node tables are built once; evaluation
/// is const and thread-safe.
class SpectrumModel {
 public:
  SpectrumModel(PhysicalConfig cfg, double eta, ModelOptions opts = {},
                double emission_scale = 1.0);

  SpectrumSample at(const Detunings& det) const;

  /// One branch per (coupling node, jitter node) at the given cavity detuning.
  std::vector<MediumBranch> branches(double delta_cavity) const;

  const PhysicalConfig& config() const { return cfg_; }
  double eta() const { return eta_; }
  const ModelOptions& options() const { return opts_; }

 private:
  struct Node {
    double weight;
    double eta;
    double cavity_shift;
  };

  PhysicalConfig cfg_;
  double eta_;
  ModelOptions opts_;
  double emission_scale_;
  std::vector<Node> nodes_;
};

}  // namespace vit
