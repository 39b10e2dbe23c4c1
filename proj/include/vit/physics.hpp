#pragma once

#include <complex>
#include <vector>

#include "vit/units.hpp"

// Analytic weak-probe model of a three-level ensemble whose control
// transition is driven by a single cavity mode (vacuum or few photons).
namespace vit {

using cdouble = std::complex<double>;

/// Atomic/cavity constants and ensemble parameters. Linewidths are FWHM in rad/s.
struct PhysicalConfig {
  double gamma = units::mhz_to_angular(5.2);    // atomic linewidth
  double kappa = units::mhz_to_angular(0.173);  // cavity linewidth
  double lambda = 852e-9;                       // probe wavelength (m)
  double od = 0.4;                              // resonant optical depth
  double ensemble_length = 20e-6;               // L along the probe (m)
  double f_probe = 0.42;                        // oscillator strength f_ef
  double f_cavity = 0.47;                       // oscillator strength f_eg

  double wavenumber() const { return units::kTwoPi / lambda; }
  void validate() const;
};

/// Cavity mode geometry; sets the single-atom antinode cooperativity.
struct CavityGeometry {
  double finesse = 6.3e4;
  double waist = 35e-6;   // m
  double lambda = 852e-9; // m

  void validate() const;
};

/// Probe-atom detuning Delta and cavity-atom detuning delta (rad/s).
struct Detunings {
  double delta_probe = 0.0;
  double delta_cavity = 0.0;

  /// 2 Delta / Gamma
  double probe_normalized(double gamma) const { return 2.0 * delta_probe / gamma; }
  /// 2 (Delta - delta) / kappa
  double two_photon_normalized(double kappa) const {
    return 2.0 * (delta_probe - delta_cavity) / kappa;
  }
};

struct Susceptibility {
  cdouble value;
};

/// Linear susceptibility of the ensemble for a single probe photon.
///
/// chi = -(OD/kL) [a - (eta - a b) b - i(eta + 1 + b^2)]
///                / [(eta + 1 - a b)^2 + (a + b)^2]
/// with a = 2 Delta/Gamma and b = 2 (Delta - delta)/kappa.
Susceptibility susceptibility(const PhysicalConfig& cfg, double eta, const Detunings& det);

/// e^{i k L chi / 2}
cdouble transfer_amplitude(const Susceptibility& chi, const PhysicalConfig& cfg);

/// |t|^2 for the ideal single-coupling medium.
double transmission(const PhysicalConfig& cfg, double eta, const Detunings& det);

/// Optical phase k L Re(chi)/2 accumulated across the ensemble.
double transfer_phase(const Susceptibility& chi, const PhysicalConfig& cfg);

/// n = sqrt(1 + Re chi), without the small-chi expansion.
double refractive_index(const Susceptibility& chi);

/// 24 F / (pi k^2 w^2)
double cooperativity_geometric(const CavityGeometry& geom);

/// 4 g^2 / (kappa Gamma); g is half the vacuum Rabi frequency.
double cooperativity_from_coupling(double g, double kappa, double gamma);

/// Inverse of cooperativity_from_coupling.
double coupling_from_cooperativity(double eta, double kappa, double gamma);

/// e^{-OD/(eta+1)}
double resonant_transmission(double od, double eta);

/// (OD/kappa) eta/(eta+1)^2. Neglects the broad atomic line's own
/// (negative) dispersion, i.e. valid for kappa << eta Gamma.
double group_delay_analytic(double od, double kappa, double eta);

/// Exact phase slope of the model at double resonance:
/// OD (eta/kappa - 1/Gamma)/(eta+1)^2.
double group_delay_exact(double od, double kappa, double gamma, double eta);

struct NumericDelay {
  double delay = 0.0;           // s
  double richardson_gap = 0.0;  // |extrapolated - fine estimate| (s)
};

/// Phase slope d(arg t)/d(omega_p) at the given detunings (default double
/// resonance) with the cavity detuning held fixed while the probe scans.
/// Five-point central difference at steps h and h/2, one Richardson step.
/// step <= 0 selects kappa/100. Throws ConvergenceError when the two
/// stencils disagree by more than rel_tolerance.
NumericDelay group_delay_numeric(const PhysicalConfig& cfg, double eta, double step = 0.0,
                                 const Detunings& at = {}, double rel_tolerance = 5e-3);

/// path_length / delay
double group_velocity(double delay, double path_length);

/// (T' - T) / (1 - T)
double transparency(double t_with, double t_without);

/// (1 + eta) kappa
double transparency_window_width(double eta, double kappa);

/// Delays tau(n) = group_delay_analytic(OD, kappa, eta_vacuum (n+1)), n = 0..n_max.
std::vector<double> fock_delay_ladder(const PhysicalConfig& cfg, double eta_vacuum, int n_max);

}  // namespace vit
