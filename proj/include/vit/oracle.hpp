#pragma once

#include "vit/physics.hpp"

// Second route to the linear response: steady state of the driven
// single-excitation amplitude equations for |f;1;0>, |e;0;0>, |g;0;1>.
// Nothing here calls susceptibility().
namespace vit {

/// Amplitudes of |e;0;0> and |g;0;1>; the ground amplitude is pinned to 1.
struct AmplitudeState {
  cdouble c_e;
  cdouble c_g;
};

struct DriveSpec {
  double omega_p = 0.0;  // probe Rabi frequency (rad/s), weak
  double g = 0.0;        // atom-cavity coupling, half the vacuum Rabi frequency (rad/s)
};

/// Solves
///   0 = -(Gamma/2 - i Delta) c_e + i g c_g + i Omega_p/2
///   0 = -(kappa/2 - i (Delta - delta)) c_g + i g c_e
AmplitudeState steady_state_amplitudes(const PhysicalConfig& cfg, const DriveSpec& drive,
                                       const Detunings& det);

/// chi = (OD/kL) (Gamma/Omega_p) c_e; the constant is fixed by the g = 0 limit.
Susceptibility susceptibility_from_oracle(const PhysicalConfig& cfg, const DriveSpec& drive,
                                          const Detunings& det);

/// Fraction of scattered light leaving through the cavity:
/// kappa|c_g|^2 / (kappa|c_g|^2 + Gamma|c_e|^2).
double branching_ratio(const AmplitudeState& state, const PhysicalConfig& cfg);

/// Cavity branching ratio for cooperativity eta (weak probe, g from eta).
double branching_ratio_at(const PhysicalConfig& cfg, double eta, const Detunings& det);

/// scale (1 - |t|^2) beta: absorbed fraction routed into the cavity mode.
double cavity_emission_probability(const PhysicalConfig& cfg, double eta, const Detunings& det,
                                   double scale = 1.0);

}  // namespace vit
