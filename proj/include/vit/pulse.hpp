#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "vit/physics.hpp"
#include "vit/spatial.hpp"

// Time-domain probe pulses pushed through the medium's transfer function
// by an FFT round trip. Envelopes are baseband; frequency offset nu in the
// envelope spectrum maps to probe detuning carrier_detuning + nu.
namespace vit {

enum class PulseWidth {
  IntensityFwhm,  // duration is the FWHM of |E|^2
  IntensityOneOverESquared,  // duration is the full width at 1/e^2 of |E|^2
};

struct PulseSpec {
  double duration = 1.73e-6;  // s
  double carrier_detuning = 0.0;  // rad/s
  PulseWidth width = PulseWidth::IntensityFwhm;
};

struct GridConfig {
  std::size_t samples = std::size_t{1} << 14;
  double span = 0.0;  // s; 0 selects 16 x duration
};

/// Uniformly sampled complex envelope. Sample i sits at t0 + i dt.
struct SampledPulse {
  double t0 = 0.0;
  double dt = 0.0;
  double carrier_detuning = 0.0;
  std::vector<cdouble> samples;

  double time(std::size_t i) const { return t0 + static_cast<double>(i) * dt; }
  std::vector<double> intensity() const;
  double energy() const;
};

using TransferFunction = std::function<cdouble(double delta_probe)>;

/// Gaussian envelope with unit peak amplitude at t = 0 on the symmetric grid
/// t_i = (i - (N-1)/2) dt.
SampledPulse make_gaussian_pulse(const PulseSpec& spec, const GridConfig& grid = {});

/// Analytic envelope of make_gaussian_pulse.
double gaussian_envelope(const PulseSpec& spec, double t);

/// Samples an arbitrary envelope on the symmetric grid.
SampledPulse sample_pulse(const std::function<cdouble(double)>& envelope, double dt,
                          std::size_t samples, double carrier_detuning = 0.0);

/// Output envelope for a single homogeneous path: spectrum times t(Delta).
/// Throws DomainError if |t| is not flat (to 1e-6) over the outer 1% of the band.
SampledPulse propagate(const SampledPulse& pulse, const TransferFunction& medium);

struct DelayEstimate {
  double centroid = 0.0;  // s
  double peak = 0.0;      // s
};

/// Delay of `output` relative to `input` by first moment and by the
/// parabolically interpolated intensity maximum.
DelayEstimate extract_delay(const SampledPulse& input, const SampledPulse& output);
DelayEstimate extract_delay(std::span<const double> time, std::span<const double> input_intensity,
                            std::span<const double> output_intensity);

/// sum |out|^2 / sum |in|^2
double attenuation(const SampledPulse& input, const SampledPulse& output);

struct PropagationResult {
  double delay_centroid = 0.0;
  double delay_peak = 0.0;
  double energy_transmission = 0.0;
  /// Single path: the output envelope. Several paths: sqrt of the detected
  /// intensity with zero phase (the incoherent sum has no common phase).
  SampledPulse output;
  std::vector<double> output_intensity;
};

/// Detected intensity sum_b w_b |E_b(t)|^2 over independent paths.
/// Branches are reduced in fixed blocks, so serial and parallel agree exactly.
PropagationResult propagate_incoherent_serial(const SampledPulse& pulse,
                                              std::span<const MediumBranch> branches);
PropagationResult propagate_incoherent_parallel(const SampledPulse& pulse,
                                                std::span<const MediumBranch> branches);

/// Pulse through the full spectrum model at the given cavity detuning.
PropagationResult propagate_through(const SampledPulse& pulse, const SpectrumModel& model,
                                    double delta_cavity = 0.0);

}  // namespace vit
