#include "vit/oracle.hpp"

#include <cmath>

#include "vit/error.hpp"

namespace vit {

using detail::require;

namespace {
// Probe drive used where only ratios of amplitudes matter.
constexpr double kReferenceDriveFraction = 1e-3;
}  // namespace

AmplitudeState steady_state_amplitudes(const PhysicalConfig& cfg, const DriveSpec& drive,
                                       const Detunings& det) {
  cfg.validate();
  require(drive.g >= 0.0 && std::isfinite(drive.g), "coupling g must be nonnegative");
  require(drive.omega_p >= 0.0 && drive.omega_p < 0.1 * cfg.gamma,
          "probe Rabi frequency outside the weak-probe regime");

  const cdouble i(0.0, 1.0);
  // [ a11 a12 ] [c_e]   [ -i Omega_p/2 ]
  // [ a21 a22 ] [c_g] = [      0       ]
  const cdouble a11 = -(0.5 * cfg.gamma - i * det.delta_probe);
  const cdouble a12 = i * drive.g;
  const cdouble a21 = i * drive.g;
  const cdouble a22 = -(0.5 * cfg.kappa - i * (det.delta_probe - det.delta_cavity));
  const cdouble rhs = -i * 0.5 * drive.omega_p;

  const cdouble determinant = a11 * a22 - a12 * a21;
  if (std::abs(determinant) == 0.0) throw DomainError("singular amplitude system");
  return {rhs * a22 / determinant, -a21 * rhs / determinant};
}

Susceptibility susceptibility_from_oracle(const PhysicalConfig& cfg, const DriveSpec& drive,
                                          const Detunings& det) {
  require(drive.omega_p > 0.0, "susceptibility needs a nonzero probe drive");
  const AmplitudeState s = steady_state_amplitudes(cfg, drive, det);
  const double scale = cfg.od / (cfg.wavenumber() * cfg.ensemble_length) * cfg.gamma / drive.omega_p;
  return {scale * s.c_e};
}

double branching_ratio(const AmplitudeState& state, const PhysicalConfig& cfg) {
  const double cavity = cfg.kappa * std::norm(state.c_g);
  const double free_space = cfg.gamma * std::norm(state.c_e);
  if (cavity + free_space == 0.0) {
    throw DomainError("branching ratio undefined for a zero amplitude state");
  }
  return cavity / (cavity + free_space);
}

double branching_ratio_at(const PhysicalConfig& cfg, double eta, const Detunings& det) {
  require(eta >= 0.0, "cooperativity must be nonnegative");
  const DriveSpec drive{kReferenceDriveFraction * cfg.gamma,
                        coupling_from_cooperativity(eta, cfg.kappa, cfg.gamma)};
  return branching_ratio(steady_state_amplitudes(cfg, drive, det), cfg);
}

double cavity_emission_probability(const PhysicalConfig& cfg, double eta, const Detunings& det,
                                   double scale) {
  require(scale > 0.0, "emission scale must be positive");
  const double absorbed = 1.0 - transmission(cfg, eta, det);
  if (absorbed <= 0.0) return 0.0;
  return scale * absorbed * branching_ratio_at(cfg, eta, det);
}

}  // namespace vit
