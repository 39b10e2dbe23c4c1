#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "vit/least_squares.hpp"
#include "vit/spatial.hpp"

namespace vit {

/// Values on a probe-detuning grid (rad/s) with optional 1-sigma errors.
struct Spectrum {
  std::vector<double> detuning;
  std::vector<double> value;
  std::vector<double> sigma;  // empty: unit weights

  std::size_t size() const { return detuning.size(); }
  void validate() const;
};

/// sqrt(max(counts, 1)): Poisson error with a floor for empty bins.
double poisson_sigma(double counts);

// ---- Lorentzian line -------------------------------------------------------

/// Beer-Lambert line: baseline exp(-depth / (1 + (2 (x - center)/fwhm)^2)).
double lorentzian_line(double x, double center, double fwhm, double depth, double baseline);

/// Parameters: center, fwhm (rad/s), depth (resonant OD), baseline.
/// A line without absorption comes back RankDeficient on "center".
FitResult fit_lorentzian(const Spectrum& spectrum, const LmOptions& options = {});

// ---- Joint VIT spectrum fit ------------------------------------------------

struct VitDataset {
  double delta_cavity = 0.0;      // rad/s
  Spectrum d1;                    // transmission (normalised to the incident reference)
  std::optional<Spectrum> d2;     // cavity counts / incident photons
  /// Detected counts per unit of d1/d2 value; 0 when unknown.
  double d1_counts_per_unit = 0.0;
  double d2_counts_per_unit = 0.0;
};

struct VitFreeMask {
  bool eta_eff = true;
  bool od = true;
  bool scale_d2 = true;
  bool delta_offset = false;
  bool probe_offset = false;
};

/// Starting/fixed values. NaN selects the deterministic heuristic:
/// OD from the deepest transmission point, eta from inverting the peak
/// transmission near two-photon resonance (doubled under standing-wave
/// averaging), scale_d2 by linear least squares at the start point.
struct VitFitSetup {
  PhysicalConfig cfg;
  ModelOptions model;
  VitFreeMask free;
  double eta_eff = std::numeric_limits<double>::quiet_NaN();
  double od = std::numeric_limits<double>::quiet_NaN();
  double scale_d2 = std::numeric_limits<double>::quiet_NaN();
  double delta_offset = 0.0;  // added to every cavity detuning (rad/s)
  double probe_offset = 0.0;  // added to every probe detuning (rad/s)
  /// Refit with sigma = sqrt(expected counts) from the first-pass model,
  /// for spectra whose counts_per_unit is known.
  bool model_variance = true;
  LmOptions lm;
};

/// Names of the VIT fit parameters in fit order.
inline constexpr const char* kVitParameterNames[] = {"eta_eff", "od", "scale_d2", "delta_offset",
                                                     "probe_offset"};

/// Joint weighted fit of D1 transmission and D2 emission over all datasets.
/// Only free parameters appear in the FitResult.
FitResult fit_vit_spectra(const std::vector<VitDataset>& datasets, const VitFitSetup& setup);

/// Initial values the heuristic picks for these datasets (all five, in fit order).
std::vector<double> vit_initial_guess(const std::vector<VitDataset>& datasets,
                                      const VitFitSetup& setup);

// ---- Linear regression -----------------------------------------------------

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_err = 0.0;
  double intercept_err = 0.0;
  double covariance = 0.0;  // cov(slope, intercept)
  double chi2 = 0.0;
  std::size_t points = 0;
};

/// Weighted least squares y = slope x + intercept, errors from the inverse
/// normal matrix. Needs two or more points with distinct x.
LinearFit fit_linear_weighted(const std::vector<double>& x, const std::vector<double>& y,
                              const std::vector<double>& sigma);

/// fit_linear_weighted restricted to points with x > threshold.
LinearFit fit_linear_above(const std::vector<double>& x, const std::vector<double>& y,
                           const std::vector<double>& sigma, double threshold = 2.0);

struct Ratio {
  double value = 0.0;
  double error = 0.0;
};

/// numerator/denominator with first-order error propagation.
Ratio ratio_with_error(double numerator, double numerator_err, double denominator,
                       double denominator_err, double covariance = 0.0);

// ---- Transparency ----------------------------------------------------------

struct TransparencyEstimate {
  double theta = 0.0;
  double error = 0.0;
  double peak_transmission = 0.0;
  double reference_transmission = 0.0;  // e^{-OD}
};

/// Theta from the highest transmission within +-window of two-photon
/// resonance in a measured D1 spectrum. Errors from the spectrum's sigma at
/// the peak and od_error.
TransparencyEstimate extract_transparency(const Spectrum& d1, double delta_cavity, double od,
                                          double od_error = 0.0,
                                          double window = units::mhz_to_angular(1.0));

/// Theta from a model's peak transmission near two-photon resonance.
TransparencyEstimate extract_transparency(const SpectrumModel& model, double delta_cavity,
                                          double od_error = 0.0,
                                          double window = units::mhz_to_angular(1.0));

/// Maximum model transmission within +-window of delta_cavity
/// (grid scan then golden-section refinement).
double peak_transmission(const SpectrumModel& model, double delta_cavity, double window);

}  // namespace vit
