#pragma once

#include <numbers>

// Internal quantities are SI with angular frequencies (rad/s). The CLI and
// file formats use MHz, um, us and ns; conversion happens only here.
namespace vit::units {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr double mhz_to_angular(double mhz) { return kTwoPi * 1e6 * mhz; }
constexpr double angular_to_mhz(double omega) { return omega / (kTwoPi * 1e6); }

constexpr double um_to_m(double um) { return um * 1e-6; }
constexpr double m_to_um(double m) { return m * 1e6; }

constexpr double us_to_s(double us) { return us * 1e-6; }
constexpr double s_to_us(double s) { return s * 1e6; }
constexpr double s_to_ns(double s) { return s * 1e9; }
constexpr double ns_to_s(double ns) { return ns * 1e-9; }

// Gaussian FWHM = 2 sqrt(2 ln 2) sigma
inline constexpr double kFwhmPerSigma = 2.3548200450309493;

}  // namespace vit::units
